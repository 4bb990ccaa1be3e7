use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};
use crate::params::PhysicalParams;
use crate::state::{weighted_sq, ModalState};
use crate::timedomain::Trajectory;

/// Energy `𝓔 = τ²‖∇u_tt‖² + τ‖Δu_t‖² + ‖∇u_t‖² + ‖Δu‖²` with its four parts in
/// that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub total: f64,
    pub components: [f64; 4],
}

pub fn energy(params: &PhysicalParams, basis: &SpectralBasis, state: &ModalState) -> Result<Energy> {
    state.check_basis(basis)?;
    let l = basis.lambdas();
    let tau = params.tau();
    let components = [
        tau * tau * weighted_sq(&state.utt, l, 1),
        tau * weighted_sq(&state.ut, l, 2),
        weighted_sq(&state.ut, l, 1),
        weighted_sq(&state.u, l, 2),
    ];
    Ok(Energy {
        total: components.iter().sum(),
        components,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub components: Vec<[f64; 4]>,
    pub linf: Vec<f64>,
}

impl EnergyTrace {
    pub fn from_trajectory(params: &PhysicalParams, basis: &SpectralBasis, traj: &Trajectory) -> Result<Self> {
        let mut out = Self::default();
        for (s, &l) in traj.states.iter().zip(&traj.linf) {
            let e = energy(params, basis, s)?;
            out.times.push(s.t);
            out.energy.push(e.total);
            out.components.push(e.components);
            out.linf.push(l);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_energy(&self) -> f64 {
        self.energy.iter().copied().fold(0.0, f64::max)
    }
}

/// Multiplier weights for the energy identity (test function
/// `τu_tt + σu_t + ρu`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyWeights {
    pub sigma: f64,
    pub rho: f64,
    pub epsilon: f64,
}

impl EnergyWeights {
    pub fn new(sigma: f64, rho: f64, epsilon: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(LabError::InvalidParameter {
                name: "weights.sigma",
                reason: format!("must lie in (0, 1], got {sigma}"),
            });
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(LabError::InvalidParameter {
                name: "weights.rho",
                reason: format!("must be > 0, got {rho}"),
            });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(LabError::InvalidParameter {
                name: "weights.epsilon",
                reason: format!("must be > 0, got {epsilon}"),
            });
        }
        Ok(Self { sigma, rho, epsilon })
    }

    /// `σ = 1 - min{δ/(2b), τδ/c²}` for `δ > 0` (else 1) and
    /// `ρ = min{σ/(2τ), δλ_min/(4c²), σλ_min/4}` clipped to `(0, 1]`.
    pub fn default_for(params: &PhysicalParams, basis: &SpectralBasis) -> Self {
        let (tau, c2, b, delta) = (params.tau(), params.c().powi(2), params.b(), params.delta());
        let sigma = if delta > 0.0 {
            1.0 - (delta / (2.0 * b)).min(tau * delta / c2)
        } else {
            1.0
        };
        let lmin = basis.lambda_min();
        let lmin = if lmin.is_finite() { lmin } else { 1.0 };
        let mut rho = 1.0_f64.min(sigma * lmin / 4.0);
        if tau > 0.0 {
            rho = rho.min(sigma / (2.0 * tau));
        }
        if delta > 0.0 {
            rho = rho.min(delta * lmin / (4.0 * c2));
        }
        Self {
            sigma,
            rho,
            epsilon: 0.5,
        }
    }
}
