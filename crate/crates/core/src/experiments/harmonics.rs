use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::SpectralBasis;
use crate::diagnostics::linear_fit;
use crate::error::{LabError, Result};
use crate::forcing::ForcingSpec;
use crate::multiharmonic::{harmonic_spectrum, solve_fixed_point, FixedPointOptions, FixedPointReport, HarmonicField};
use crate::params::PhysicalParams;
use crate::timedomain::{periodic_steady_state, PeriodicOptions, PeriodicSolution, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub periodic: PeriodicSolution,
    pub time_domain: HarmonicField,
    pub frequency_domain: HarmonicField,
    pub fixed_point: FixedPointReport,
    /// `‖û^time_m - û^freq_m‖_{H¹} / ‖û^freq_m‖_{H¹}` per harmonic.
    pub rel_errors: Vec<f64>,
}

/// Periodic steady state by long-time integration versus the multiharmonic
/// fixed point, harmonic by harmonic.
pub fn cross_validate_periodic(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    forcing: &ForcingSpec,
    solver: &SolverConfig,
    periodic: &PeriodicOptions,
    fixed_point: &FixedPointOptions,
) -> Result<CrossValidation> {
    let omega = forcing.omega().ok_or_else(|| LabError::InvalidParameter {
        name: "forcing.kind",
        reason: "cross-validation needs single-frequency forcing".into(),
    })?;
    let source = forcing.harmonic_coefficients(fixed_point.harmonics, basis.len())?;
    let (td, fd) = rayon::join(
        || periodic_steady_state(params, basis, forcing, solver, periodic),
        || solve_fixed_point(params, basis, &source, omega, fixed_point),
    );
    let (sol, (field, report)) = (td?, fd?);
    let spectrum = harmonic_spectrum(&sol.trajectory.states, omega, fixed_point.harmonics)?;
    let rel_errors = (1..=fixed_point.harmonics)
        .map(|m| {
            let diff = HarmonicField {
                omega,
                coeffs: vec![spectrum
                    .harmonic(m)
                    .iter()
                    .zip(field.harmonic(m))
                    .map(|(a, b)| a - b)
                    .collect()],
            };
            let den = field.h1_norm(basis, m);
            let num = diff.h1_norm(basis, 1);
            if den > 0.0 {
                num / den
            } else {
                num
            }
        })
        .collect();
    Ok(CrossValidation {
        periodic: sol,
        time_domain: spectrum,
        frequency_domain: field,
        fixed_point: report,
        rel_errors,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicScaling {
    pub amplitudes: Vec<f64>,
    /// `norms[i][m - 1] = ‖û_m‖_{H¹}` at `amplitudes[i]`.
    pub norms: Vec<Vec<f64>>,
    /// Fitted `p_m` in `‖û_m‖ ~ a^{p_m}`.
    pub exponents: Vec<f64>,
}

/// Amplitude sweep of the multiharmonic solution for the source
/// `a · profile` at the fundamental.
pub fn harmonic_scaling(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    profile: &[f64],
    omega: f64,
    amplitudes: &[f64],
    options: &FixedPointOptions,
) -> Result<HarmonicScaling> {
    if amplitudes.len() < 2 {
        return Err(LabError::InsufficientSamples {
            needed: 2,
            got: amplitudes.len(),
        });
    }
    let norms = amplitudes
        .par_iter()
        .map(|&a| {
            let src = vec![profile.iter().map(|p| Complex64::new(a * p, 0.0)).collect::<Vec<_>>()];
            let (field, _) = solve_fixed_point(params, basis, &src, omega, options)?;
            Ok((1..=options.harmonics).map(|m| field.h1_norm(basis, m)).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = amplitudes.iter().map(|a| a.ln()).collect();
    let exponents = (0..options.harmonics)
        .map(|m| {
            if norms.iter().any(|row| !(row[m] > 0.0)) {
                return f64::NAN;
            }
            let y: Vec<f64> = norms.iter().map(|row| row[m].ln()).collect();
            linear_fit(&x, &y).0
        })
        .collect();
    Ok(HarmonicScaling {
        amplitudes: amplitudes.to_vec(),
        norms,
        exponents,
    })
}
