//! Per-mode linear stability of `tau s^3 + s^2 + b ζ s + c^2 ζ = 0`.
//!
//! Each spatial eigenvalue `ζ` (Dirichlet `λ_j` or torus `|ξ|^2`) yields one
//! cubic. The Hurwitz minors give the sign test; the roots come from the
//! eigenvalues of the companion matrix of the monic cubic, polished with a
//! single Newton step.

use std::fmt;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::params::PhysicalParams;

pub const DEFAULT_MARGINAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regime {
    Stable,
    Marginal,
    Unstable,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Stable => "stable",
            Regime::Marginal => "marginal",
            Regime::Unstable => "unstable",
        }
    }

    pub fn from_abscissa(abscissa: f64, tol: f64) -> Self {
        if abscissa < -tol {
            Regime::Stable
        } else if abscissa.abs() <= tol {
            Regime::Marginal
        } else {
            Regime::Unstable
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeAnalysis {
    pub zeta: f64,
    pub minors: [f64; 3],
    /// Sorted by real part, descending; ties put the positive imaginary part first.
    pub roots: [Complex64; 3],
    pub abscissa: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub modes: Vec<ModeAnalysis>,
    pub verdict: Regime,
}

fn check_zeta(zeta: f64) -> Result<()> {
    if !(zeta.is_finite() && zeta >= 0.0) {
        return Err(LabError::InvalidParameter {
            name: "zeta",
            reason: format!("spatial eigenvalue must be >= 0, got {zeta}"),
        });
    }
    Ok(())
}

/// Leading principal minors of the Hurwitz matrix: `(1, δζ, c²ζ·δζ)`.
pub fn hurwitz_minors(params: &PhysicalParams, zeta: f64) -> Result<[f64; 3]> {
    if params.tau() == 0.0 {
        return Err(LabError::TauZero);
    }
    check_zeta(zeta)?;
    let m2 = params.delta() * zeta;
    Ok([1.0, m2, params.c() * params.c() * zeta * m2])
}

/// Coefficients `[tau, 1, b ζ, c² ζ]` of the characteristic cubic.
pub fn characteristic_polynomial(params: &PhysicalParams, zeta: f64) -> [f64; 4] {
    [
        params.tau(),
        1.0,
        params.b() * zeta,
        params.c() * params.c() * zeta,
    ]
}

fn horner(coeffs: &[f64; 4], s: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(coeffs[0], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in &coeffs[1..] {
        dp = dp * s + p;
        p = p * s + a;
    }
    (p, dp)
}

pub fn characteristic_roots(params: &PhysicalParams, zeta: f64) -> Result<[Complex64; 3]> {
    if params.tau() == 0.0 {
        return Err(LabError::TauZero);
    }
    check_zeta(zeta)?;
    let coeffs = characteristic_polynomial(params, zeta);
    let tau = params.tau();
    if zeta == 0.0 {
        // s^2 (tau s + 1): the double root is ill-conditioned for the eigensolver.
        let zero = Complex64::new(0.0, 0.0);
        return Ok([zero, zero, Complex64::new(-1.0 / tau, 0.0)]);
    }
    #[rustfmt::skip]
    let companion = Matrix3::new(
        0.0, 1.0, 0.0,
        0.0, 0.0, 1.0,
        -coeffs[3] / tau, -coeffs[2] / tau, -coeffs[1] / tau,
    );
    let eig = companion.complex_eigenvalues();
    let mut roots = [eig[0], eig[1], eig[2]];
    for r in roots.iter_mut() {
        let (p, dp) = horner(&coeffs, *r);
        if dp.norm() > 0.0 {
            let cand = *r - p / dp;
            if cand.is_finite() && horner(&coeffs, cand).0.norm() < p.norm() {
                *r = cand;
            }
        }
    }
    // Real coefficients: clean round-off imaginary parts on real roots.
    let scale = roots.iter().map(|r| r.norm()).fold(1.0_f64, f64::max);
    for r in roots.iter_mut() {
        if r.im.abs() <= 1e-14 * scale {
            r.im = 0.0;
        }
    }
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then_with(|| b.im.total_cmp(&a.im)));
    Ok(roots)
}

pub fn spectral_abscissa(roots: &[Complex64; 3]) -> f64 {
    roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max)
}

pub fn analyze_mode(params: &PhysicalParams, zeta: f64, tol: f64) -> Result<ModeAnalysis> {
    let minors = hurwitz_minors(params, zeta)?;
    let roots = characteristic_roots(params, zeta)?;
    let abscissa = spectral_abscissa(&roots);
    Ok(ModeAnalysis {
        zeta,
        minors,
        roots,
        abscissa,
        regime: Regime::from_abscissa(abscissa, tol),
    })
}

/// Per-mode regimes plus a global verdict over modes with `ζ > 0`:
/// unstable if any is unstable, else marginal if any is marginal, else stable.
pub fn classify_regime(params: &PhysicalParams, zetas: &[f64], tol: f64) -> Result<RegimeReport> {
    if zetas.is_empty() {
        return Err(LabError::InvalidParameter {
            name: "zeta",
            reason: "at least one spatial eigenvalue required".into(),
        });
    }
    let modes = zetas
        .iter()
        .map(|&z| analyze_mode(params, z, tol))
        .collect::<Result<Vec<_>>>()?;
    let verdict = modes
        .iter()
        .filter(|m| m.zeta > 0.0)
        .map(|m| m.regime)
        .max()
        .unwrap_or(Regime::Marginal);
    Ok(RegimeReport { modes, verdict })
}

/// `|ξ|² / (|ξ|² + 1)`, the rate factor governing low-frequency decay on
/// the whole space.
pub fn low_frequency_decay_factor(xi_norm: f64) -> Result<f64> {
    if !(xi_norm.is_finite() && xi_norm >= 0.0) {
        return Err(LabError::InvalidParameter {
            name: "xi_norm",
            reason: format!("must be >= 0, got {xi_norm}"),
        });
    }
    let x2 = xi_norm * xi_norm;
    Ok(x2 / (x2 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(tau: f64, c: f64, b: f64) -> PhysicalParams {
        PhysicalParams::new(tau, c, b, 0.0).unwrap()
    }

    #[test]
    fn minors_examples() {
        assert_eq!(hurwitz_minors(&p(1.0, 1.0, 2.0), 1.0).unwrap(), [1.0, 1.0, 1.0]);
        assert_eq!(hurwitz_minors(&p(0.3, 2.0, 0.1), 0.0).unwrap(), [1.0, 0.0, 0.0]);
        assert_eq!(hurwitz_minors(&p(1.0, 2.0, 1.0), 3.0).unwrap(), [1.0, -9.0, -108.0]);
        assert!(matches!(
            hurwitz_minors(&p(0.0, 1.0, 1.0), 1.0),
            Err(LabError::TauZero)
        ));
        assert!(hurwitz_minors(&p(1.0, 1.0, 1.0), -1.0).is_err());
    }

    #[test]
    fn roots_zero_zeta() {
        let r = characteristic_roots(&p(1.0, 1.0, 1.0), 0.0).unwrap();
        assert!(r[0].norm() < 1e-12 && r[1].norm() < 1e-12);
        assert!((r[2] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_critical_case() {
        // (s + 1)(s^2 + 1) = s^3 + s^2 + s + 1
        let r = characteristic_roots(&p(1.0, 1.0, 1.0), 1.0).unwrap();
        assert!((r[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12, "{r:?}");
        assert!((r[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[2] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let a = analyze_mode(&p(1.0, 1.0, 1.0), 1.0, DEFAULT_MARGINAL_TOL).unwrap();
        assert_eq!(a.regime, Regime::Marginal);
    }

    #[test]
    fn roots_dissipative_case_stable() {
        let r = characteristic_roots(&p(1.0, 1.0, 2.0), 1.0).unwrap();
        assert!(r.iter().all(|z| z.re < 0.0));
    }

    #[test]
    fn residual_small() {
        for (tau, c, b, z) in [(1e-3, 4.0, 5.0, 100.0), (0.7, 0.5, 0.0, 3.0), (0.1, 2.0, 0.4, 0.01)] {
            let params = p(tau, c, b);
            let coeffs = characteristic_polynomial(&params, z);
            let cmax = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            for r in characteristic_roots(&params, z).unwrap() {
                let (v, _) = horner(&coeffs, r);
                assert!(v.norm() < 1e-10 * cmax, "residual {} at {r}", v.norm());
            }
        }
    }

    #[test]
    fn regime_verdicts_follow_delta() {
        let zetas = [1.0, 4.0, 9.0, 16.0];
        let stable = classify_regime(&p(1.0, 1.0, 2.0), &zetas, DEFAULT_MARGINAL_TOL).unwrap();
        assert_eq!(stable.verdict, Regime::Stable);
        assert!(stable.modes.iter().all(|m| m.regime == Regime::Stable));
        let marginal = classify_regime(&p(1.0, 1.0, 1.0), &zetas, DEFAULT_MARGINAL_TOL).unwrap();
        assert_eq!(marginal.verdict, Regime::Marginal);
        let unstable = classify_regime(&p(1.0, 1.0, 0.5), &zetas, DEFAULT_MARGINAL_TOL).unwrap();
        assert_eq!(unstable.verdict, Regime::Unstable);
        assert!(classify_regime(&p(1.0, 1.0, 1.0), &[], DEFAULT_MARGINAL_TOL).is_err());
    }

    #[test]
    fn decay_factor_examples() {
        assert_eq!(low_frequency_decay_factor(0.0).unwrap(), 0.0);
        assert_eq!(low_frequency_decay_factor(1.0).unwrap(), 0.5);
        assert!((low_frequency_decay_factor(3.0).unwrap() - 0.9).abs() < 1e-15);
        assert!(low_frequency_decay_factor(-1.0).is_err());
        let mut prev = -1.0;
        for k in 0..200 {
            let v = low_frequency_decay_factor(k as f64 * 0.25).unwrap();
            assert!(v > prev && v < 1.0);
            prev = v;
        }
    }
}
