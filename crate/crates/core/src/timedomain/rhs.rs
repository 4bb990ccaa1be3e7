use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};
use crate::forcing::ForcingSpec;
use crate::params::PhysicalParams;
use crate::state::ModalState;

/// Time derivative of a [`ModalState`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative {
    pub du: Vec<f64>,
    pub dut: Vec<f64>,
    pub dutt: Vec<f64>,
}

fn to_grid_checked(basis: &SpectralBasis, v: &[f64], t: f64) -> Result<Vec<f64>> {
    let g = basis.to_physical(v)?;
    if g.iter().any(|x| !x.is_finite()) {
        return Err(LabError::NonFinite { t });
    }
    Ok(g)
}

/// Modal right-hand side `f = -η P[(u²)_tt] - r_tt = -2η P[u u_tt + u_t²] - r_tt`,
/// with the product evaluated on the collocation grid.
pub fn source_term(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    u: &[f64],
    ut: &[f64],
    utt: &[f64],
    forcing: &ForcingSpec,
    t: f64,
) -> Result<Vec<f64>> {
    let mut f = if params.eta() != 0.0 {
        let gu = to_grid_checked(basis, u, t)?;
        let gut = to_grid_checked(basis, ut, t)?;
        let gutt = to_grid_checked(basis, utt, t)?;
        let scale = -2.0 * params.eta();
        let prod: Vec<f64> = gu
            .iter()
            .zip(&gut)
            .zip(&gutt)
            .map(|((a, b), c)| scale * (a * c + b * b))
            .collect();
        basis.project_quadratic(&prod)?
    } else {
        vec![0.0; basis.len()]
    };
    let mut rtt = vec![0.0; basis.len()];
    forcing.add_rtt(t, &mut rtt);
    for (fi, r) in f.iter_mut().zip(rtt) {
        *fi -= r;
    }
    Ok(f)
}

/// Semidiscrete JMGT-Westervelt right-hand side for `tau > 0`:
/// `du = u_t`, `dut = u_tt`,
/// `dutt = [-u_tt - c²λ u - bλ u_t + f] / tau`.
pub fn rhs(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    state: &ModalState,
    forcing: &ForcingSpec,
    t: f64,
) -> Result<StateDerivative> {
    if params.tau() == 0.0 {
        return Err(LabError::TauZero);
    }
    state.check_basis(basis)?;
    if !state.is_finite() {
        return Err(LabError::NonFinite { t });
    }
    let f = source_term(params, basis, &state.u, &state.ut, &state.utt, forcing, t)?;
    let (tau, c2, b) = (params.tau(), params.c() * params.c(), params.b());
    let dutt = basis
        .lambdas()
        .iter()
        .enumerate()
        .map(|(j, l)| (-state.utt[j] - c2 * l * state.u[j] - b * l * state.ut[j] + f[j]) / tau)
        .collect();
    Ok(StateDerivative {
        du: state.ut.clone(),
        dut: state.utt.clone(),
        dutt,
    })
}

/// Solves the `tau = 0` relation `(1 + 2ηu) u_tt = c²Δu + bΔu_t - 2η u_t² - r_tt`
/// for `u_tt` in Galerkin form, `(I + 2η K(u)) u_tt = P[...]` with `K(u)` the
/// projected multiplication by `u`.
pub fn consistent_utt(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    u: &[f64],
    ut: &[f64],
    forcing: &ForcingSpec,
    t: f64,
    margin_min: f64,
) -> Result<Vec<f64>> {
    let (c2, b, eta) = (params.c() * params.c(), params.b(), params.eta());
    let mut rhs = vec![0.0; basis.len()];
    forcing.add_rtt(t, &mut rhs);
    for (j, l) in basis.lambdas().iter().enumerate() {
        rhs[j] = -c2 * l * u[j] - b * l * ut[j] - rhs[j];
    }
    if eta == 0.0 {
        return Ok(rhs);
    }
    let gu = to_grid_checked(basis, u, t)?;
    let gut = to_grid_checked(basis, ut, t)?;
    let margin = gu.iter().map(|x| 1.0 + 2.0 * eta * x).fold(f64::INFINITY, f64::min);
    if margin <= margin_min {
        return Err(LabError::Degenerate {
            t,
            margin,
            margin_min,
        });
    }
    let sq: Vec<f64> = gut.iter().map(|x| -2.0 * eta * x * x).collect();
    for (r, s) in rhs.iter_mut().zip(basis.project_quadratic(&sq)?) {
        *r += s;
    }
    let scaled: Vec<f64> = gu.iter().map(|x| 2.0 * eta * x).collect();
    let mut m = basis.multiplication_matrix(&scaled)?;
    for j in 0..basis.len() {
        m[(j, j)] += 1.0;
    }
    let sol = m
        .lu()
        .solve(&nalgebra::DVector::from_vec(rhs))
        .ok_or(LabError::Degenerate {
            t,
            margin,
            margin_min,
        })?;
    Ok(sol.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{exact_interval_product, BasisSpec};
    use std::f64::consts::PI;

    #[test]
    fn zero_state_zero_derivative() {
        let p = PhysicalParams::new(0.2, 1.0, 0.5, 1.0).unwrap();
        let b = BasisSpec::interval(PI, 4).build().unwrap();
        let d = rhs(&p, &b, &ModalState::zeros(4), &ForcingSpec::None, 0.0).unwrap();
        assert!(d.du.iter().chain(&d.dut).chain(&d.dutt).all(|&v| v == 0.0));
    }

    #[test]
    fn linear_is_diagonal() {
        let p = PhysicalParams::new(0.2, 1.5, 0.5, 0.0).unwrap();
        let b = BasisSpec::interval(PI, 4).build().unwrap();
        let s = ModalState::new(0.0, vec![0.0, 0.3, 0.0, 0.0], vec![0.0, -0.7, 0.0, 0.0], vec![0.0, 1.1, 0.0, 0.0]).unwrap();
        let d = rhs(&p, &b, &s, &ForcingSpec::None, 0.0).unwrap();
        let l = 4.0;
        let expected = (-1.1 - 0.5 * l * -0.7 - 2.25 * l * 0.3) / 0.2;
        assert!((d.dutt[1] - expected).abs() < 1e-12);
        assert!(d.dutt[0] == 0.0 && d.dutt[2] == 0.0 && d.dutt[3] == 0.0);
    }

    #[test]
    fn nonlinear_matches_exact_convolution() {
        let eta = 0.8;
        let p = PhysicalParams::new(0.2, 1.0, 0.5, eta).unwrap();
        let b = BasisSpec::interval(PI, 4).build().unwrap();
        let e1 = vec![1.0, 0.0, 0.0, 0.0];
        let s = ModalState::new(0.0, e1.clone(), e1.clone(), vec![0.0; 4]).unwrap();
        let d = rhs(&p, &b, &s, &ForcingSpec::None, 0.0).unwrap();
        // u utt = 0, ut^2 = e1^2
        let sq = exact_interval_product(PI, &e1, &e1).unwrap();
        for j in 0..4 {
            let l = b.lambdas()[j];
            let lin = -0.5 * l * e1[j] - l * e1[j];
            let expected = (lin - 2.0 * eta * sq[j]) / 0.2;
            assert!((d.dutt[j] - expected).abs() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn non_finite_is_flagged() {
        let p = PhysicalParams::new(0.2, 1.0, 0.5, 1.0).unwrap();
        let b = BasisSpec::interval(PI, 2).build().unwrap();
        let s = ModalState::new(0.5, vec![f64::NAN, 0.0], vec![0.0; 2], vec![0.0; 2]).unwrap();
        assert!(matches!(
            rhs(&p, &b, &s, &ForcingSpec::None, 0.5),
            Err(LabError::NonFinite { .. })
        ));
    }

    #[test]
    fn consistent_utt_solves_galerkin_relation() {
        let p = PhysicalParams::new(0.0, 1.0, 0.3, 0.7).unwrap();
        let b = BasisSpec::interval(1.0, 5).build().unwrap();
        let u = [0.1, -0.05, 0.02, 0.0, 0.01];
        let ut = [0.0, 0.2, 0.0, -0.1, 0.0];
        let utt = consistent_utt(&p, &b, &u, &ut, &ForcingSpec::None, 0.0, 1e-3).unwrap();
        // utt + 2η P(u utt) + 2η P(ut^2) = -c²λu - bλut
        let uu = exact_interval_product(1.0, &u, &utt).unwrap();
        let sq = exact_interval_product(1.0, &ut, &ut).unwrap();
        for j in 0..5 {
            let l = b.lambdas()[j];
            let lhs = utt[j] + 1.4 * uu[j] + 1.4 * sq[j];
            assert!((lhs - (-l * u[j] - 0.3 * l * ut[j])).abs() < 1e-10);
        }
    }

    #[test]
    fn degeneracy_detected() {
        let p = PhysicalParams::new(0.0, 1.0, 0.3, 1.0).unwrap();
        let b = BasisSpec::interval(1.0, 3).build().unwrap();
        let u = [-2.0, 0.0, 0.0];
        assert!(matches!(
            consistent_utt(&p, &b, &u, &[0.0; 3], &ForcingSpec::None, 0.0, 1e-3),
            Err(LabError::Degenerate { .. })
        ));
    }
}
