use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};
use crate::forcing::ForcingSpec;
use crate::params::PhysicalParams;
use crate::state::{weighted_dot, weighted_sq, ModalState};
use crate::timedomain::{source_term, Trajectory};

use super::EnergyWeights;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub times: Vec<f64>,
    /// `|LHS - RHS|` divided by `scale`.
    pub residual: Vec<f64>,
    /// Largest magnitude of any single term over the run.
    pub scale: f64,
}

impl IdentityResidual {
    pub fn max(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }
}

pub(crate) fn uniform_step(states: &[ModalState]) -> Result<f64> {
    if states.len() < 3 {
        return Err(LabError::InsufficientSamples {
            needed: 3,
            got: states.len(),
        });
    }
    let h = states[1].t - states[0].t;
    for w in states.windows(2) {
        if ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.max(1e-300) * 10.0 + 1e-12 * w[1].t.abs() {
            return Err(LabError::InvalidParameter {
                name: "trajectory",
                reason: "sampling must be uniform".into(),
            });
        }
    }
    Ok(h)
}

/// Residual of the energy identity obtained by testing the modal equation
/// with `-Δ(τu_tt + σu_t + ρu)`. Boundary terms are differences against the
/// initial sample; time integrals use the composite trapezoid rule.
pub fn energy_identity_residual(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    trajectory: &Trajectory,
    forcing: &ForcingSpec,
    weights: &EnergyWeights,
) -> Result<IdentityResidual> {
    let states = &trajectory.states;
    let h = uniform_step(states)?;
    let l = basis.lambdas();
    let (tau, c2, b) = (params.tau(), params.c().powi(2), params.b());
    let (sigma, rho) = (weights.sigma, weights.rho);

    // boundary quantities (coefficient, value) and integrand rates per sample
    let mut bnd: Vec<[f64; 8]> = Vec::with_capacity(states.len());
    let mut rates: Vec<[f64; 5]> = Vec::with_capacity(states.len());
    for s in states {
        s.check_basis(basis)?;
        let g2 = weighted_sq(&s.utt, l, 1);
        let d1 = weighted_sq(&s.ut, l, 2);
        let d0 = weighted_sq(&s.u, l, 2);
        let g1 = weighted_sq(&s.ut, l, 1);
        bnd.push([
            0.5 * tau * tau * g2,
            0.5 * tau * b * d1,
            0.5 * (sigma * c2 + b * rho) * d0,
            0.5 * (sigma - tau * rho) * g1,
            tau * c2 * weighted_dot(&s.ut, &s.u, l, 2),
            tau * sigma * weighted_dot(&s.utt, &s.ut, l, 1),
            tau * rho * weighted_dot(&s.utt, &s.u, l, 1),
            rho * weighted_dot(&s.ut, &s.u, l, 1),
        ]);
        let f = source_term(params, basis, &s.u, &s.ut, &s.utt, forcing, s.t)?;
        let mult: Vec<f64> = (0..l.len())
            .map(|j| tau * s.utt[j] + sigma * s.ut[j] + rho * s.u[j])
            .collect();
        rates.push([
            tau * (1.0 - sigma) * g2,
            (b * sigma - tau * c2) * d1,
            c2 * rho * d0,
            -rho * g1,
            weighted_dot(&f, &mult, l, 1),
        ]);
    }

    let mut integrals = [0.0_f64; 5];
    let mut scale = 0.0_f64;
    let mut lhs_rhs = Vec::with_capacity(states.len());
    for k in 0..states.len() {
        if k > 0 {
            for (i, acc) in integrals.iter_mut().enumerate() {
                *acc += 0.5 * h * (rates[k - 1][i] + rates[k][i]);
            }
        }
        let mut lhs = 0.0;
        for i in 0..8 {
            let term = bnd[k][i] - bnd[0][i];
            scale = scale.max(bnd[k][i].abs());
            lhs += term;
        }
        for &v in &integrals[..4] {
            scale = scale.max(v.abs());
            lhs += v;
        }
        scale = scale.max(integrals[4].abs());
        lhs_rhs.push(lhs - integrals[4]);
    }
    let residual = lhs_rhs
        .into_iter()
        .map(|d| if scale > 0.0 { d.abs() / scale } else { d.abs() })
        .collect();
    Ok(IdentityResidual {
        times: states.iter().map(|s| s.t).collect(),
        residual,
        scale,
    })
}
