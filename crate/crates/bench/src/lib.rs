//! Shared fixtures for the criterion benches.

use std::f64::consts::PI;

use jmgt_core::{BasisSpec, ModalState, PhysicalParams, SpectralBasis};

pub fn params() -> PhysicalParams {
    PhysicalParams::new(0.2, 1.0, 0.5, 0.5).expect("valid parameters")
}

pub fn interval(modes: usize) -> SpectralBasis {
    BasisSpec::interval(PI, modes).build().expect("valid basis")
}

pub fn rectangle(modes: usize) -> SpectralBasis {
    BasisSpec::rectangle(vec![PI, PI], vec![modes, modes]).build().expect("valid basis")
}

/// Smooth state with algebraically decaying coefficients.
pub fn state(n: usize) -> ModalState {
    let coeff = |s: f64| (0..n).map(|j| s / ((j + 1) * (j + 1)) as f64).collect::<Vec<_>>();
    ModalState::new(0.0, coeff(0.05), coeff(-0.02), coeff(0.01)).expect("consistent lengths")
}
