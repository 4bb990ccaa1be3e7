//! Time integration of the modal Galerkin JMGT-Westervelt system.
//!
//! The nonlinearity stays entirely on the right-hand side, so the linear part
//! is diagonal across modes. `exponential-imex` propagates each linear block
//! exactly and adds the nonlinear/forcing increment with a second-order
//! exponential Runge-Kutta correction; `rk4-explicit` is the classical
//! four-stage method on the full right-hand side.

mod periodic;
pub(crate) mod propagator;
mod rhs;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};
use crate::forcing::ForcingSpec;
use crate::params::PhysicalParams;
use crate::stability::characteristic_roots;
use crate::state::ModalState;

pub use periodic::{periodic_steady_state, PeriodicOptions, PeriodicSolution};
pub use rhs::{consistent_utt, rhs, source_term, StateDerivative};

use propagator::{companion_block, ModePropagator};

/// Largest `dt·|s|` accepted for the explicit scheme.
pub const RK4_STABILITY_RADIUS: f64 = 2.78;
pub const DEFAULT_DEGENERACY_MARGIN: f64 = 1e-3;
pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    ExponentialImex,
    Rk4Explicit,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::ExponentialImex => "exponential-imex",
            Scheme::Rk4Explicit => "rk4-explicit",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential-imex" => Ok(Scheme::ExponentialImex),
            "rk4-explicit" => Ok(Scheme::Rk4Explicit),
            other => Err(LabError::InvalidParameter {
                name: "solver.scheme",
                reason: format!("unknown scheme `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Absolute L∞ cap; `None` means `1e6 ×` the initial L∞ norm (or `1e6`).
    pub blowup_threshold: Option<f64>,
    /// Record every n-th step (the final step is always recorded).
    pub sample_every: usize,
    /// Minimal admissible `1 + 2ηu` on the `tau = 0` path.
    pub degeneracy_margin: f64,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            t_end,
            scheme: Scheme::ExponentialImex,
            blowup_threshold: None,
            sample_every: 1,
            degeneracy_margin: DEFAULT_DEGENERACY_MARGIN,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_blowup_threshold(mut self, threshold: f64) -> Self {
        self.blowup_threshold = Some(threshold);
        self
    }

    pub fn with_sample_every(mut self, every: usize) -> Self {
        self.sample_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(LabError::InvalidParameter {
                name: "solver.dt",
                reason: format!("must be > 0, got {}", self.dt),
            });
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(LabError::InvalidParameter {
                name: "solver.t_end",
                reason: format!("must be >= dt, got {}", self.t_end),
            });
        }
        if let Some(th) = self.blowup_threshold {
            if !(th > 0.0) {
                return Err(LabError::InvalidParameter {
                    name: "solver.blowup_threshold",
                    reason: format!("must be > 0, got {th}"),
                });
            }
        }
        if self.sample_every == 0 {
            return Err(LabError::InvalidParameter {
                name: "solver.sample_every",
                reason: "must be >= 1".into(),
            });
        }
        if !(self.degeneracy_margin > 0.0) {
            return Err(LabError::InvalidParameter {
                name: "solver.degeneracy_margin",
                reason: "must be > 0".into(),
            });
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    BlowupDetected { t: f64, linf: f64 },
    StepFailure { t: f64, reason: String },
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::BlowupDetected { .. } => "blowup-detected",
            Termination::StepFailure { .. } => "step-failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<ModalState>,
    /// Grid L∞ norm of `u` at every recorded state.
    pub linf: Vec<f64>,
    pub threshold: f64,
    pub termination: Termination,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &ModalState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn is_completed(&self) -> bool {
        self.termination == Termination::Completed
    }
}

/// Initial data `(u0, u1, u2)`; a missing `u2` is replaced by the value
/// consistent with the `tau = 0` relation at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Option<Vec<f64>>,
}

impl InitialData {
    pub fn new(u0: Vec<f64>, u1: Vec<f64>) -> Self {
        Self { u0, u1, u2: None }
    }

    pub fn with_u2(mut self, u2: Vec<f64>) -> Self {
        self.u2 = Some(u2);
        self
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n], vec![0.0; n])
    }

    /// `amplitude · e_1`, at rest.
    pub fn first_mode(n: usize, amplitude: f64) -> Self {
        let mut u0 = vec![0.0; n];
        u0[0] = amplitude;
        Self::new(u0, vec![0.0; n])
    }
}

/// Reusable one-step map for fixed `(params, basis, forcing, scheme, dt)`.
pub struct Integrator<'a> {
    params: PhysicalParams,
    basis: &'a SpectralBasis,
    forcing: &'a ForcingSpec,
    scheme: Scheme,
    dt: f64,
    margin: f64,
    props: Vec<ModePropagator>,
}

impl<'a> Integrator<'a> {
    pub fn new(
        params: &PhysicalParams,
        basis: &'a SpectralBasis,
        forcing: &'a ForcingSpec,
        scheme: Scheme,
        dt: f64,
        margin: f64,
    ) -> Result<Self> {
        let (tau, c, b) = (params.tau(), params.c(), params.b());
        let props = match scheme {
            Scheme::ExponentialImex => basis
                .lambdas()
                .iter()
                .map(|&l| ModePropagator::new(&companion_block(tau, c, b, l), dt))
                .collect(),
            Scheme::Rk4Explicit => {
                let bound = RK4_STABILITY_RADIUS / max_root_modulus(params, basis)?;
                if dt > bound {
                    return Err(LabError::StepTooLarge { dt, bound });
                }
                Vec::new()
            }
        };
        Ok(Self {
            params: *params,
            basis,
            forcing,
            scheme,
            dt,
            margin,
            props,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn order(&self) -> usize {
        if self.params.tau() > 0.0 {
            3
        } else {
            2
        }
    }

    fn derived_utt(&self, u: &[f64], ut: &[f64], t: f64) -> Result<Vec<f64>> {
        consistent_utt(&self.params, self.basis, u, ut, self.forcing, t, self.margin)
    }

    /// Completes a `(u, u_t)` pair to a state on the `tau = 0` path.
    fn complete(&self, t: f64, u: Vec<f64>, ut: Vec<f64>, utt: Option<Vec<f64>>) -> Result<ModalState> {
        let utt = match utt {
            Some(v) => v,
            None => self.derived_utt(&u, &ut, t)?,
        };
        Ok(ModalState { t, u, ut, utt })
    }

    /// Nonlinear/forcing contribution to the last component of every mode.
    fn nonlinear(&self, s: &ModalState) -> Result<Option<Vec<f64>>> {
        if self.params.eta() == 0.0 && self.forcing.is_none() {
            return Ok(None);
        }
        let (tau, c2, b) = (self.params.tau(), self.params.c().powi(2), self.params.b());
        if tau > 0.0 {
            let f = source_term(&self.params, self.basis, &s.u, &s.ut, &s.utt, self.forcing, s.t)?;
            Ok(Some(f.into_iter().map(|x| x / tau).collect()))
        } else {
            // u_tt minus its linear part
            Ok(Some(
                self.basis
                    .lambdas()
                    .iter()
                    .enumerate()
                    .map(|(j, l)| s.utt[j] + c2 * l * s.u[j] + b * l * s.ut[j])
                    .collect(),
            ))
        }
    }

    fn pack(&self, s: &ModalState, j: usize) -> [f64; 3] {
        [s.u[j], s.ut[j], s.utt[j]]
    }

    pub fn step(&self, state: &ModalState) -> Result<ModalState> {
        state.check_basis(self.basis)?;
        let next = match self.scheme {
            Scheme::ExponentialImex => self.step_exponential(state)?,
            Scheme::Rk4Explicit => self.step_rk4(state)?,
        };
        if !next.is_finite() {
            return Err(LabError::NonFinite { t: next.t });
        }
        Ok(next)
    }

    fn step_exponential(&self, s0: &ModalState) -> Result<ModalState> {
        let n = self.basis.len();
        let k = self.order();
        let t1 = s0.t + self.dt;
        let s0 = if k == 2 {
            self.complete(s0.t, s0.u.clone(), s0.ut.clone(), None)?
        } else {
            s0.clone()
        };
        let n0 = self.nonlinear(&s0)?;

        let mut a = ModalState::zeros(n);
        a.t = t1;
        let mut buf = [0.0; 3];
        for j in 0..n {
            let p = &self.props[j];
            let v = self.pack(&s0, j);
            p.apply_exp(&v, &mut buf);
            if let Some(n0) = &n0 {
                for r in 0..k {
                    buf[r] += p.phi1[r] * n0[j];
                }
            }
            a.u[j] = buf[0];
            a.ut[j] = buf[1];
            if k == 3 {
                a.utt[j] = buf[2];
            }
        }
        let Some(n0) = n0 else {
            return if k == 2 {
                self.complete(t1, a.u, a.ut, None)
            } else {
                Ok(a)
            };
        };
        if k == 2 {
            a = self.complete(t1, a.u, a.ut, None)?;
        }
        let n1 = self.nonlinear(&a)?.expect("nonlinear part present");
        for j in 0..n {
            let p = &self.props[j];
            let d = n1[j] - n0[j];
            a.u[j] += p.phi2[0] * d;
            a.ut[j] += p.phi2[1] * d;
            if k == 3 {
                a.utt[j] += p.phi2[2] * d;
            }
        }
        if k == 2 {
            self.complete(t1, a.u, a.ut, None)
        } else {
            Ok(a)
        }
    }

    fn deriv(&self, s: &ModalState) -> Result<(ModalState, StateDerivative)> {
        if self.params.tau() > 0.0 {
            let d = rhs(&self.params, self.basis, s, self.forcing, s.t)?;
            Ok((s.clone(), d))
        } else {
            let full = self.complete(s.t, s.u.clone(), s.ut.clone(), None)?;
            let d = StateDerivative {
                du: full.ut.clone(),
                dut: full.utt.clone(),
                dutt: vec![0.0; full.len()],
            };
            Ok((full, d))
        }
    }

    fn step_rk4(&self, s0: &ModalState) -> Result<ModalState> {
        let h = self.dt;
        let axpy = |s: &ModalState, d: &StateDerivative, w: f64| ModalState {
            t: s.t + w,
            u: s.u.iter().zip(&d.du).map(|(x, y)| x + w * y).collect(),
            ut: s.ut.iter().zip(&d.dut).map(|(x, y)| x + w * y).collect(),
            utt: s.utt.iter().zip(&d.dutt).map(|(x, y)| x + w * y).collect(),
        };
        let (s0, k1) = self.deriv(s0)?;
        let (_, k2) = self.deriv(&axpy(&s0, &k1, 0.5 * h))?;
        let (_, k3) = self.deriv(&axpy(&s0, &k2, 0.5 * h))?;
        let (_, k4) = self.deriv(&axpy(&s0, &k3, h))?;
        let comb = |x: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
            (0..x.len())
                .map(|i| x[i] + h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
                .collect()
        };
        let u = comb(&s0.u, &k1.du, &k2.du, &k3.du, &k4.du);
        let ut = comb(&s0.ut, &k1.dut, &k2.dut, &k3.dut, &k4.dut);
        let t1 = s0.t + h;
        if self.params.tau() > 0.0 {
            let utt = comb(&s0.utt, &k1.dutt, &k2.dutt, &k3.dutt, &k4.dutt);
            Ok(ModalState { t: t1, u, ut, utt })
        } else {
            self.complete(t1, u, ut, None)
        }
    }
}

/// Largest characteristic-root modulus over the basis.
pub fn max_root_modulus(params: &PhysicalParams, basis: &SpectralBasis) -> Result<f64> {
    let mut rho = 0.0_f64;
    for &l in basis.lambdas() {
        if params.tau() > 0.0 {
            for r in characteristic_roots(params, l)? {
                rho = rho.max(r.norm());
            }
        } else {
            // s^2 + bλ s + c²λ
            let (p, q) = (params.b() * l, params.c().powi(2) * l);
            let disc = Complex64::new(p * p - 4.0 * q, 0.0).sqrt();
            rho = rho.max(((-p + disc) / 2.0).norm()).max(((-p - disc) / 2.0).norm());
        }
    }
    Ok(rho.max(f64::MIN_POSITIVE))
}

/// Single step of the configured scheme.
pub fn step(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    state: &ModalState,
    forcing: &ForcingSpec,
    config: &SolverConfig,
) -> Result<ModalState> {
    config.validate()?;
    Integrator::new(params, basis, forcing, config.scheme, config.dt, config.degeneracy_margin)?
        .step(state)
}

fn check_data(basis: &SpectralBasis, v: &[f64]) -> Result<()> {
    if v.len() != basis.len() {
        return Err(LabError::LengthMismatch {
            expected: basis.len(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Initial-value run. `tau = 0` is routed to [`simulate_westervelt_tau0`].
pub fn simulate_ivp(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    data: &InitialData,
    forcing: &ForcingSpec,
    config: &SolverConfig,
) -> Result<Trajectory> {
    config.validate()?;
    check_data(basis, &data.u0)?;
    check_data(basis, &data.u1)?;
    if let Some(u2) = &data.u2 {
        check_data(basis, u2)?;
    }
    let integ = Integrator::new(params, basis, forcing, config.scheme, config.dt, config.degeneracy_margin)?;
    let u2 = if params.tau() == 0.0 {
        None
    } else {
        data.u2.clone()
    };
    let s0 = integ.complete(0.0, data.u0.clone(), data.u1.clone(), u2)?;
    run(&integ, basis, s0, config)
}

/// Strongly damped quasilinear Westervelt equation (`tau = 0`),
/// `(1 + 2ηu) u_tt = c²Δu + bΔu_t - 2η u_t² - r_tt`, integrated in `(u, u_t)`.
/// `u_tt` is always derived, never evolved.
pub fn simulate_westervelt_tau0(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    u0: &[f64],
    u1: &[f64],
    forcing: &ForcingSpec,
    config: &SolverConfig,
) -> Result<Trajectory> {
    if params.tau() != 0.0 {
        return Err(LabError::InvalidParameter {
            name: "physics.tau",
            reason: format!("the degenerate path requires tau = 0, got {}", params.tau()),
        });
    }
    simulate_ivp(
        params,
        basis,
        &InitialData::new(u0.to_vec(), u1.to_vec()),
        forcing,
        config,
    )
}

fn run(integ: &Integrator<'_>, basis: &SpectralBasis, s0: ModalState, config: &SolverConfig) -> Result<Trajectory> {
    let linf0 = basis.linf(&s0.u)?;
    let threshold = config.blowup_threshold.unwrap_or(if linf0 > 0.0 {
        DEFAULT_BLOWUP_FACTOR * linf0
    } else {
        DEFAULT_BLOWUP_FACTOR
    });
    let n_steps = config.n_steps();
    let mut states = vec![s0.clone()];
    let mut linf = vec![linf0];
    let mut termination = Termination::Completed;
    let mut state = s0;
    for k in 1..=n_steps {
        let t = k as f64 * config.dt;
        let mut next = match integ.step(&state) {
            Ok(s) => s,
            Err(LabError::NonFinite { .. }) => {
                termination = Termination::StepFailure {
                    t,
                    reason: "non-finite state".into(),
                };
                break;
            }
            Err(e) => return Err(e),
        };
        next.t = t;
        let l = basis.linf(&next.u)?;
        if !l.is_finite() {
            termination = Termination::StepFailure {
                t,
                reason: "non-finite L-infinity norm".into(),
            };
            break;
        }
        if l > threshold {
            states.push(next);
            linf.push(l);
            termination = Termination::BlowupDetected { t, linf: l };
            break;
        }
        if k % config.sample_every == 0 || k == n_steps {
            states.push(next.clone());
            linf.push(l);
        }
        state = next;
    }
    Ok(Trajectory {
        states,
        linf,
        threshold,
        termination,
    })
}
