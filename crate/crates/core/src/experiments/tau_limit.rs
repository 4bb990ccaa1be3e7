use rayon::prelude::*;

use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};
use crate::forcing::ForcingSpec;
use crate::params::PhysicalParams;
use crate::state::weighted_sq;
use crate::timedomain::{simulate_ivp, InitialData, SolverConfig, Trajectory};

use super::trapezoid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSweepRow {
    pub tau: f64,
    /// `(∫_0^T ‖Δu‖² + ‖Δu_t‖² dt)^{1/2}`
    pub w_part: f64,
    /// `‖u^τ - u^0‖_{L²(0,T;H¹)}`
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauSweepReport {
    pub rows: Vec<TauSweepRow>,
    pub reference_w_part: f64,
}

impl TauSweepReport {
    /// Whether errors decrease along the (descending) τ ladder, allowing each
    /// step to exceed its predecessor by `jitter` relative.
    pub fn errors_decreasing(&self, jitter: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].error <= w[0].error * (1.0 + jitter))
    }

    /// Observed order of `error ~ τ^p` by least squares over the ladder.
    pub fn observed_order(&self) -> f64 {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter(|r| r.error > 0.0)
            .map(|r| (r.tau.ln(), r.error.ln()))
            .unzip();
        if x.len() < 2 {
            return f64::NAN;
        }
        crate::diagnostics::linear_fit(&x, &y).0
    }
}

/// `τ = 2^{-k}` for `k = kmin..=kmax`.
pub fn tau_ladder(kmin: i32, kmax: i32) -> Vec<f64> {
    (kmin..=kmax).map(|k| 2.0_f64.powi(-k)).collect()
}

fn sample_step(tr: &Trajectory) -> f64 {
    if tr.states.len() < 2 {
        0.0
    } else {
        tr.states[1].t - tr.states[0].t
    }
}

fn w_part(basis: &SpectralBasis, tr: &Trajectory) -> f64 {
    let l = basis.lambdas();
    let vals: Vec<f64> = tr
        .states
        .iter()
        .map(|s| weighted_sq(&s.u, l, 2) + weighted_sq(&s.ut, l, 2))
        .collect();
    trapezoid(sample_step(tr), &vals).sqrt()
}

/// Runs the JMGT system for every `τ` and compares against the `τ = 0`
/// Westervelt solution with the same `(u0, u1)`. Each `τ > 0` run starts
/// from the `u_tt` consistent with the `τ = 0` relation.
pub fn run_tau_sweep(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    u0: &[f64],
    u1: &[f64],
    forcing: &ForcingSpec,
    solver: &SolverConfig,
    taus: &[f64],
) -> Result<TauSweepReport> {
    if taus.is_empty() {
        return Err(LabError::InvalidParameter {
            name: "sweep.values",
            reason: "empty tau ladder".into(),
        });
    }
    let data = InitialData::new(u0.to_vec(), u1.to_vec());
    let run = |tau: f64| -> Result<Trajectory> {
        let p = params.with_tau(tau)?;
        if tau > 0.0 && p.delta() <= 0.0 {
            return Err(LabError::InvalidParameter {
                name: "physics.b",
                reason: format!("tau sweep needs b > tau c^2, violated at tau = {tau}"),
            });
        }
        let tr = simulate_ivp(&p, basis, &data, forcing, solver)?;
        if !tr.is_completed() {
            return Err(LabError::InvalidParameter {
                name: "solver.t_end",
                reason: format!("run terminated early ({})", tr.termination.as_str()),
            });
        }
        Ok(tr)
    };
    let wrap = |tau: f64, e: LabError| LabError::SweepMember {
        tau,
        source: Box::new(e),
    };
    let reference = run(0.0).map_err(|e| wrap(0.0, e))?;
    let l = basis.lambdas();
    let h = sample_step(&reference);
    let rows = taus
        .par_iter()
        .map(|&tau| {
            let tr = run(tau).map_err(|e| wrap(tau, e))?;
            let diffs: Vec<f64> = tr
                .states
                .iter()
                .zip(&reference.states)
                .map(|(a, b)| {
                    let d: Vec<f64> = a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect();
                    weighted_sq(&d, l, 1)
                })
                .collect();
            Ok(TauSweepRow {
                tau,
                w_part: w_part(basis, &tr),
                error: trapezoid(h, &diffs).sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TauSweepReport {
        rows,
        reference_w_part: w_part(basis, &reference),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;
    use std::f64::consts::PI;

    #[test]
    fn zero_data_zero_error() {
        let p = PhysicalParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let b = BasisSpec::interval(PI, 3).build().unwrap();
        let s = SolverConfig::new(1e-2, 1.0).unwrap();
        let r = run_tau_sweep(&p, &b, &[0.0; 3], &[0.0; 3], &ForcingSpec::None, &s, &tau_ladder(2, 4)).unwrap();
        assert!(r.rows.iter().all(|row| row.error == 0.0 && row.w_part == 0.0));
    }

    #[test]
    fn linear_single_mode_first_order() {
        let p = PhysicalParams::new(0.0, 1.0, 1.0, 0.0).unwrap();
        let b = BasisSpec::interval(PI, 1).build().unwrap();
        let s = SolverConfig::new(1e-3, 4.0).unwrap();
        let r = run_tau_sweep(&p, &b, &[1.0], &[0.0], &ForcingSpec::None, &s, &tau_ladder(3, 7)).unwrap();
        assert!(r.errors_decreasing(0.0));
        assert!(r.observed_order() >= 0.9, "{}", r.observed_order());
    }

    #[test]
    fn member_failure_names_tau() {
        let p = PhysicalParams::new(0.0, 1.0, 0.1, 0.0).unwrap();
        let b = BasisSpec::interval(PI, 1).build().unwrap();
        let s = SolverConfig::new(1e-2, 1.0).unwrap();
        let e = run_tau_sweep(&p, &b, &[1.0], &[0.0], &ForcingSpec::None, &s, &[0.5]).unwrap_err();
        assert!(matches!(e, LabError::SweepMember { tau, .. } if tau == 0.5));
    }
}
