//! `z = τu_t + u` turns the third-order equation into a wave equation for `z`
//! driven by `u`, and `u` is recovered from `z` by an exponential kernel
//! `e(t) = e^{-t/τ}/τ`.

use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};
use crate::forcing::ForcingSpec;
use crate::params::PhysicalParams;
use crate::state::{weighted_sq, ModalState};
use crate::timedomain::{source_term, Trajectory};

use super::identity::uniform_step;

/// `z` and `z_t = τu_tt + u_t` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ZState {
    pub t: f64,
    pub z: Vec<f64>,
    pub zt: Vec<f64>,
}

fn require_tau(params: &PhysicalParams) -> Result<f64> {
    if params.tau() == 0.0 {
        return Err(LabError::TauZero);
    }
    Ok(params.tau())
}

pub fn z_transform(params: &PhysicalParams, state: &ModalState) -> Result<ZState> {
    let tau = require_tau(params)?;
    Ok(ZState {
        t: state.t,
        z: state.ut.iter().zip(&state.u).map(|(v, u)| tau * v + u).collect(),
        zt: state.utt.iter().zip(&state.ut).map(|(a, v)| tau * a + v).collect(),
    })
}

/// `M_k = a ∫_0^1 e^{-a(1-θ)} θ^k dθ` for `k = 0..=3`.
fn kernel_moments(a: f64) -> [f64; 4] {
    let mut m = [0.0; 4];
    if a < 1.0 {
        // a · k! Σ_n (-a)^n / (n + k + 1)!
        for (k, mk) in m.iter_mut().enumerate() {
            let mut term = 1.0;
            for i in 1..=k + 1 {
                term /= i as f64;
            }
            let kfact: f64 = (1..=k).map(|i| i as f64).product();
            let mut sum = 0.0;
            for n in 0..40 {
                sum += term;
                term *= -a / (n + k + 2) as f64;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
            *mk = a * kfact * sum;
        }
    } else {
        m[0] = -(-a).exp_m1();
        for k in 1..4 {
            m[k] = 1.0 - k as f64 / a * m[k - 1];
        }
    }
    m
}

/// `u(t) = e^{-t/τ} u(0) + ∫_0^t e(t-s) z(s) ds`, with `z` interpolated by
/// cubic Hermite pieces (using `z_t`) and each piece integrated exactly.
pub fn reconstruct_u_from_z(zs: &[ZState], u0: &[f64], tau: f64) -> Result<Vec<Vec<f64>>> {
    if !(tau > 0.0) {
        return Err(LabError::TauZero);
    }
    if zs.len() < 2 {
        return Err(LabError::InsufficientSamples {
            needed: 2,
            got: zs.len(),
        });
    }
    let n = u0.len();
    if let Some(bad) = zs.iter().find(|z| z.z.len() != n || z.zt.len() != n) {
        return Err(LabError::LengthMismatch {
            expected: n,
            got: bad.z.len(),
        });
    }
    let mut out = Vec::with_capacity(zs.len());
    out.push(u0.to_vec());
    for w in zs.windows(2) {
        let h = w[1].t - w[0].t;
        let a = h / tau;
        let m = kernel_moments(a);
        let decay = (-a).exp();
        // Hermite basis in monomials θ^0..θ^3
        let c00 = m[0] - 3.0 * m[2] + 2.0 * m[3];
        let c10 = m[1] - 2.0 * m[2] + m[3];
        let c01 = 3.0 * m[2] - 2.0 * m[3];
        let c11 = m[3] - m[2];
        let prev = out.last().expect("seeded with u0");
        let next = (0..n)
            .map(|j| {
                decay * prev[j]
                    + c00 * w[0].z[j]
                    + c10 * h * w[0].zt[j]
                    + c01 * w[1].z[j]
                    + c11 * h * w[1].zt[j]
            })
            .collect();
        out.push(next);
    }
    Ok(out)
}

/// Per-sample modal L² residuals for interior samples (endpoints excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct ZResidual {
    pub times: Vec<f64>,
    pub residual: Vec<f64>,
}

impl ZResidual {
    pub fn max(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }
}

fn z_residual_with<F>(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    trajectory: &Trajectory,
    forcing: &ForcingSpec,
    mut extra: F,
) -> Result<ZResidual>
where
    F: FnMut(usize, &[f64], usize) -> f64,
{
    let tau = require_tau(params)?;
    let h = uniform_step(&trajectory.states)?;
    let l = basis.lambdas();
    let stiff = params.c().powi(2) + params.delta() / tau;
    let zs = trajectory
        .states
        .iter()
        .map(|s| z_transform(params, s))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ZResidual {
        times: Vec::new(),
        residual: Vec::new(),
    };
    for k in 1..zs.len() - 1 {
        let s = &trajectory.states[k];
        let f = source_term(params, basis, &s.u, &s.ut, &s.utt, forcing, s.t)?;
        let r: Vec<f64> = (0..l.len())
            .map(|j| {
                let ztt = (zs[k + 1].zt[j] - zs[k - 1].zt[j]) / (2.0 * h);
                ztt + stiff * l[j] * zs[k].z[j] - f[j] + extra(k, &zs[k].z, j)
            })
            .collect();
        out.times.push(s.t);
        out.residual.push(weighted_sq(&r, l, 0).sqrt());
    }
    Ok(out)
}

/// Residual of `z_tt - (c² + δ/τ)Δz - f + (δ/τ)Δu = 0`, with `z_tt` from a
/// central difference of `z_t`.
pub fn wave_z_residual(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    trajectory: &Trajectory,
    forcing: &ForcingSpec,
) -> Result<ZResidual> {
    let tau = require_tau(params)?;
    let coef = params.delta() / tau;
    let l = basis.lambdas().to_vec();
    let states = &trajectory.states;
    z_residual_with(params, basis, trajectory, forcing, |k, _, j| {
        -coef * l[j] * states[k].u[j]
    })
}

/// Residual of the memory form
/// `z_tt - (c² + δ/τ)Δz + (δ/τ) e∗Δz - f + δ e(t) Δu(0) = 0`,
/// with the convolution evaluated as in [`reconstruct_u_from_z`].
pub fn memory_z_residual(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    trajectory: &Trajectory,
    forcing: &ForcingSpec,
) -> Result<ZResidual> {
    let tau = require_tau(params)?;
    let delta = params.delta();
    let l = basis.lambdas().to_vec();
    let states = &trajectory.states;
    let zs = states
        .iter()
        .map(|s| z_transform(params, s))
        .collect::<Result<Vec<_>>>()?;
    let u0 = &states[0].u;
    let zero = vec![0.0; u0.len()];
    // e∗z alone: reconstruction started from zero
    let conv = reconstruct_u_from_z(&zs, &zero, tau)?;
    let t0 = states[0].t;
    z_residual_with(params, basis, trajectory, forcing, |k, _, j| {
        let kern = (-(states[k].t - t0) / tau).exp() / tau;
        -(delta / tau) * l[j] * conv[k][j] - delta * kern * l[j] * u0[j]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_agree_across_branches() {
        for a in [0.999, 1.0, 1.001] {
            let m = kernel_moments(a);
            // brute-force Simpson
            let n = 20000;
            for (k, mk) in m.iter().enumerate() {
                let mut s = 0.0;
                for i in 0..=n {
                    let th = i as f64 / n as f64;
                    let w = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    s += w * (-a * (1.0 - th)).exp() * th.powi(k as i32);
                }
                let quad = a * s / (3.0 * n as f64);
                assert!((mk - quad).abs() < 1e-12, "a={a} k={k}: {mk} vs {quad}");
            }
        }
    }

    #[test]
    fn reconstruct_exact_for_cubic_z() {
        // z = t^3 with τ = 0.5; u solves τu' + u = z, u(0) = 0
        let tau = 0.5_f64;
        let exact = |t: f64| {
            // particular: t^3 - 3τt^2 + 6τ²t - 6τ³ ; homogeneous fixes u(0) = 0
            t.powi(3) - 3.0 * tau * t * t + 6.0 * tau * tau * t - 6.0 * tau.powi(3)
                + 6.0 * tau.powi(3) * (-t / tau).exp()
        };
        let zs: Vec<ZState> = (0..=20)
            .map(|k| {
                let t = k as f64 * 0.1;
                ZState {
                    t,
                    z: vec![t.powi(3)],
                    zt: vec![3.0 * t * t],
                }
            })
            .collect();
        let u = reconstruct_u_from_z(&zs, &[0.0], tau).unwrap();
        for (zk, uk) in zs.iter().zip(&u) {
            assert!((uk[0] - exact(zk.t)).abs() < 1e-12);
        }
    }

    #[test]
    fn tau_zero_rejected() {
        let p = PhysicalParams::new(0.0, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(z_transform(&p, &ModalState::zeros(1)), Err(LabError::TauZero)));
    }
}
