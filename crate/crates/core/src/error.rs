use thiserror::Error;

/// Errors raised by the spectral laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported basis: {0}")]
    UnsupportedBasis(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("relaxation time tau must be positive for this operation")]
    TauZero,

    #[error("non-finite values at t = {t}")]
    NonFinite { t: f64 },

    #[error("loss of non-degeneracy at t = {t}: min(1 + 2 eta u) = {margin} <= {margin_min}")]
    Degenerate { t: f64, margin: f64, margin_min: f64 },

    #[error("time step {dt} exceeds the explicit stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("periodic steady state not reached after {periods} periods (defect {defect:e})")]
    NoSteadyState { periods: usize, defect: f64 },

    #[error("near-singular Helmholtz symbol at harmonic m = {m}, mode j = {j} (|symbol| = {magnitude:e})")]
    NearSingular { m: usize, j: usize, magnitude: f64 },

    #[error("fixed-point iteration diverged after {iterations} iterations (residual {residual:e})")]
    Diverged { iterations: usize, residual: f64 },

    #[error("fixed-point iteration did not converge in {iterations} iterations (change {change:e})")]
    NotConverged { iterations: usize, change: f64 },

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("non-positive energy sample at t = {t}")]
    NonPositiveEnergy { t: f64 },

    #[error("sweep member with tau = {tau} failed: {source}")]
    SweepMember {
        tau: f64,
        #[source]
        source: Box<LabError>,
    },
}

pub type Result<T> = std::result::Result<T, LabError>;
