use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};

/// Modal coefficients of `(u, u_t, u_tt)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub t: f64,
    pub u: Vec<f64>,
    pub ut: Vec<f64>,
    pub utt: Vec<f64>,
}

impl ModalState {
    pub fn new(t: f64, u: Vec<f64>, ut: Vec<f64>, utt: Vec<f64>) -> Result<Self> {
        if ut.len() != u.len() {
            return Err(LabError::LengthMismatch {
                expected: u.len(),
                got: ut.len(),
            });
        }
        if utt.len() != u.len() {
            return Err(LabError::LengthMismatch {
                expected: u.len(),
                got: utt.len(),
            });
        }
        Ok(Self { t, u, ut, utt })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            t: 0.0,
            u: vec![0.0; n],
            ut: vec![0.0; n],
            utt: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.u
            .iter()
            .chain(&self.ut)
            .chain(&self.utt)
            .all(|v| v.is_finite())
    }

    pub(crate) fn check_basis(&self, basis: &SpectralBasis) -> Result<()> {
        if self.len() != basis.len() {
            return Err(LabError::LengthMismatch {
                expected: basis.len(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// Spectral Sobolev norms: `‖∇v‖² = Σ λ_j v_j²`, `‖Δv‖² = Σ λ_j² v_j²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModalNorms {
    pub l2_u: f64,
    pub h1_u: f64,
    pub h2_u: f64,
    pub h1_ut: f64,
    pub h2_ut: f64,
    pub h1_utt: f64,
}

pub(crate) fn weighted_sq(v: &[f64], lambdas: &[f64], power: i32) -> f64 {
    v.iter()
        .zip(lambdas)
        .map(|(x, l)| l.powi(power) * x * x)
        .sum()
}

/// `Σ λ_j^power a_j b_j`
pub(crate) fn weighted_dot(a: &[f64], b: &[f64], lambdas: &[f64], power: i32) -> f64 {
    a.iter()
        .zip(b)
        .zip(lambdas)
        .map(|((x, y), l)| l.powi(power) * x * y)
        .sum()
}

pub fn modal_norms(state: &ModalState, basis: &SpectralBasis) -> Result<ModalNorms> {
    state.check_basis(basis)?;
    let l = basis.lambdas();
    Ok(ModalNorms {
        l2_u: weighted_sq(&state.u, l, 0).sqrt(),
        h1_u: weighted_sq(&state.u, l, 1).sqrt(),
        h2_u: weighted_sq(&state.u, l, 2).sqrt(),
        h1_ut: weighted_sq(&state.ut, l, 1).sqrt(),
        h2_ut: weighted_sq(&state.ut, l, 2).sqrt(),
        h1_utt: weighted_sq(&state.utt, l, 1).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_has_zero_norms() {
        let b = BasisSpec::interval(PI, 4).build().unwrap();
        let n = modal_norms(&ModalState::zeros(4), &b).unwrap();
        assert_eq!(n, ModalNorms::default());
    }

    #[test]
    fn unit_modes_on_pi_interval() {
        let b = BasisSpec::interval(PI, 4).build().unwrap();
        let mut s = ModalState::zeros(4);
        s.u[0] = 1.0;
        let n = modal_norms(&s, &b).unwrap();
        assert!((n.h1_u - 1.0).abs() < 1e-12 && (n.h2_u - 1.0).abs() < 1e-12);
        let mut s = ModalState::zeros(4);
        s.u[1] = 1.0;
        let n = modal_norms(&s, &b).unwrap();
        assert!((n.h1_u - 2.0).abs() < 1e-12, "{}", n.h1_u);
        assert!((n.h2_u - 4.0).abs() < 1e-12, "{}", n.h2_u);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(ModalState::new(0.0, vec![0.0; 3], vec![0.0; 2], vec![0.0; 3]).is_err());
        let b = BasisSpec::interval(PI, 4).build().unwrap();
        assert!(modal_norms(&ModalState::zeros(3), &b).is_err());
    }
}
