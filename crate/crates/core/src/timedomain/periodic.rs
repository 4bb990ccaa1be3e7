use std::f64::consts::TAU;

use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};
use crate::forcing::ForcingSpec;
use crate::params::PhysicalParams;
use crate::state::{weighted_sq, ModalState};

use super::{Integrator, SolverConfig, Termination, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicOptions {
    /// Relative H¹ period-to-period change accepted as steady.
    pub steady_tol: f64,
    pub max_periods: usize,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        Self {
            steady_tol: 1e-8,
            max_periods: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSolution {
    /// One period, `steps_per_period` uniform samples, endpoint excluded.
    pub trajectory: Trajectory,
    pub period: f64,
    pub dt: f64,
    pub periods: usize,
    /// Final relative H¹ change `max_t ‖u(t+T) - u(t)‖ / max_t ‖u(t)‖`.
    pub defect: f64,
}

fn h1(basis: &SpectralBasis, v: &[f64]) -> f64 {
    weighted_sq(v, basis.lambdas(), 1).sqrt()
}

/// Long-time integration from rest under periodic forcing until the response
/// repeats itself. The step is shrunk so that it divides the period exactly.
pub fn periodic_steady_state(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    forcing: &ForcingSpec,
    config: &SolverConfig,
    options: &PeriodicOptions,
) -> Result<PeriodicSolution> {
    config.validate()?;
    let omega = forcing.omega().ok_or_else(|| LabError::InvalidParameter {
        name: "forcing.kind",
        reason: "a steady state needs single-frequency forcing".into(),
    })?;
    if !(options.steady_tol > 0.0) || options.max_periods == 0 {
        return Err(LabError::InvalidParameter {
            name: "experiment.steady_tol",
            reason: "steady_tol must be > 0 and max_periods >= 1".into(),
        });
    }
    let period = TAU / omega;
    let n = (period / config.dt).ceil().max(1.0) as usize;
    let h = period / n as f64;
    let integ = Integrator::new(params, basis, forcing, config.scheme, h, config.degeneracy_margin)?;
    let mut state = if params.tau() == 0.0 {
        integ.complete(0.0, vec![0.0; basis.len()], vec![0.0; basis.len()], None)?
    } else {
        ModalState::zeros(basis.len())
    };
    let mut previous: Option<Vec<ModalState>> = None;
    let mut defect = f64::INFINITY;
    for p in 0..options.max_periods {
        let mut current = Vec::with_capacity(n);
        for k in 0..n {
            let t = (p * n + k) as f64 * h;
            state.t = t;
            current.push(state.clone());
            state = match integ.step(&state) {
                Ok(s) => s,
                Err(LabError::NonFinite { .. }) => {
                    return Err(LabError::NoSteadyState {
                        periods: p + 1,
                        defect: f64::INFINITY,
                    })
                }
                Err(e) => return Err(e),
            };
        }
        if let Some(prev) = &previous {
            let mut diff = 0.0_f64;
            let mut scale = 0.0_f64;
            for (a, b) in current.iter().zip(prev) {
                let d: Vec<f64> = a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect();
                diff = diff.max(h1(basis, &d));
                scale = scale.max(h1(basis, &a.u));
            }
            defect = if scale > 0.0 { diff / scale } else { diff };
            if defect < options.steady_tol {
                let linf = current
                    .iter()
                    .map(|s| basis.linf(&s.u))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(PeriodicSolution {
                    trajectory: Trajectory {
                        states: current,
                        linf,
                        threshold: f64::INFINITY,
                        termination: Termination::Completed,
                    },
                    period,
                    dt: h,
                    periods: p + 1,
                    defect,
                });
            }
        }
        previous = Some(current);
    }
    Err(LabError::NoSteadyState {
        periods: options.max_periods,
        defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;
    use std::f64::consts::PI;

    #[test]
    fn zero_forcing_zero_state() {
        let p = PhysicalParams::new(0.1, 1.0, 0.5, 1.0).unwrap();
        let b = BasisSpec::interval(PI, 3).build().unwrap();
        let f = ForcingSpec::harmonic(vec![0.0; 3], 2.0).unwrap();
        let cfg = SolverConfig::new(0.05, 1.0).unwrap();
        let s = periodic_steady_state(&p, &b, &f, &cfg, &PeriodicOptions::default()).unwrap();
        assert_eq!(s.defect, 0.0);
        assert!(s.trajectory.states.iter().all(|st| st.u.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn linear_single_mode_amplitude() {
        // η = 0: u_1 = Re(U e^{iωt}), (c²λ - ω² + i(bωλ - τω³)) U = ω² A
        let (tau, c, bb, w, a) = (0.1, 1.0, 0.5, 2.0, 0.3);
        let p = PhysicalParams::new(tau, c, bb, 0.0).unwrap();
        let b = BasisSpec::interval(PI, 2).build().unwrap();
        let f = ForcingSpec::harmonic(vec![a, 0.0], w).unwrap();
        let cfg = SolverConfig::new(0.01, 1.0).unwrap();
        let s = periodic_steady_state(&p, &b, &f, &cfg, &PeriodicOptions::default()).unwrap();
        let sym = num_complex::Complex64::new(c * c - w * w, bb * w - tau * w * w * w);
        let amp = w * w * a / sym.norm();
        let peak = s.trajectory.states.iter().map(|st| st.u[0].abs()).fold(0.0, f64::max);
        assert!((peak - amp).abs() < 1e-3 * amp, "{peak} vs {amp}");
    }

    #[test]
    fn unstable_regime_fails() {
        let p = PhysicalParams::new(1.0, 1.0, 0.5, 0.0).unwrap();
        let b = BasisSpec::interval(PI, 2).build().unwrap();
        let f = ForcingSpec::harmonic(vec![1.0, 0.0], 2.0).unwrap();
        let cfg = SolverConfig::new(0.05, 1.0).unwrap();
        let opts = PeriodicOptions {
            steady_tol: 1e-8,
            max_periods: 20,
        };
        assert!(matches!(
            periodic_steady_state(&p, &b, &f, &cfg, &opts),
            Err(LabError::NoSteadyState { .. })
        ));
    }
}
