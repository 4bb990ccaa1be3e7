mod common;

use jmgt_core::stability::{
    analyze_mode, characteristic_polynomial, characteristic_roots, classify_regime, hurwitz_minors,
    low_frequency_decay_factor, spectral_abscissa, DEFAULT_MARGINAL_TOL,
};
use jmgt_core::{LabError, PhysicalParams, Regime};
use num_complex::Complex64;
use proptest::prelude::*;

fn params(tau: f64, c: f64, b: f64) -> PhysicalParams {
    PhysicalParams::new(tau, c, b, 0.0).unwrap()
}

fn eval(coeffs: [f64; 4], s: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * s + a)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, rng_seed: proptest::test_runner::RngSeed::Fixed(11), ..ProptestConfig::default() })]

    #[test]
    fn roots_match_cardano(tau in 0.02..2.0f64, c in 0.2..3.0f64, b in 0.0..3.0f64, lz in -2.0..2.0f64) {
        let zeta = 10f64.powf(lz);
        let roots = characteristic_roots(&params(tau, c, b), zeta).unwrap();
        let oracle = common::cardano(tau, c, b, zeta);
        for r in roots {
            let gap = oracle.iter().map(|o| (r - o).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(gap < 1e-6 * (1.0 + r.norm()), "root {r} gap {gap}");
        }
    }

    #[test]
    fn roots_annihilate_polynomial(tau in 0.02..2.0f64, c in 0.2..3.0f64, b in 0.0..3.0f64, zeta in 0.0..50.0f64) {
        let p = params(tau, c, b);
        let coeffs = characteristic_polynomial(&p, zeta);
        let scale = coeffs.iter().map(|a| a.abs()).fold(0.0, f64::max);
        for r in characteristic_roots(&p, zeta).unwrap() {
            let mag = (0..4).map(|k| coeffs[k].abs() * r.norm().powi(3 - k as i32)).sum::<f64>().max(scale);
            prop_assert!(eval(coeffs, r).norm() <= 1e-10 * mag);
        }
    }

    #[test]
    fn hurwitz_agrees_with_roots(tau in 0.02..2.0f64, c in 0.2..3.0f64, b in 0.0..3.0f64, zeta in 0.01..50.0f64) {
        let p = params(tau, c, b);
        let abscissa = spectral_abscissa(&characteristic_roots(&p, zeta).unwrap());
        prop_assume!((p.delta() * zeta).abs() > 1e-9 && abscissa.abs() > 1e-9);
        let minors = hurwitz_minors(&p, zeta).unwrap();
        prop_assert_eq!(minors.iter().all(|&m| m > 0.0), abscissa < 0.0);
    }

    #[test]
    fn abscissa_continuous_in_zeta(tau in 0.05..1.0f64, c in 0.5..2.0f64, b in 0.0..2.0f64, zmax in 1.0..50.0f64) {
        let p = params(tau, c, b);
        let n = 2000;
        let a: Vec<f64> = (0..=n)
            .map(|k| spectral_abscissa(&characteristic_roots(&p, zmax * k as f64 / n as f64).unwrap()))
            .collect();
        let d: Vec<f64> = a.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for k in 1..d.len() - 1 {
            let local = d[k - 1].max(d[k + 1]);
            prop_assert!(d[k] <= 10.0 * local + 1e-9, "jump {} vs local {} at k = {k}", d[k], local);
        }
    }

    #[test]
    fn verdicts_cross_once_in_b(tau in 0.05..1.0f64, c in 0.5..2.0f64, zeta in 0.1..10.0f64) {
        let crit = tau * c * c;
        let mut seq: Vec<Regime> = Vec::new();
        for k in 0..=40 {
            let b = crit * (k as f64 / 20.0);
            let b = if k == 20 { crit } else { b };
            let r = analyze_mode(&params(tau, c, b), zeta, DEFAULT_MARGINAL_TOL).unwrap().regime;
            if seq.last() != Some(&r) {
                seq.push(r);
            }
        }
        prop_assert_eq!(seq, vec![Regime::Unstable, Regime::Marginal, Regime::Stable]);
    }

    #[test]
    fn decay_factor_bounded(x in 0.0..1e3f64) {
        let f = low_frequency_decay_factor(x).unwrap();
        prop_assert!((0.0..1.0).contains(&f));
    }
}

#[test]
fn marginal_pair_on_imaginary_axis() {
    let p = params(0.5, 2.0, 2.0);
    let roots = characteristic_roots(&p, 3.0).unwrap();
    let w = 2.0 * 3.0_f64.sqrt();
    assert!(roots.iter().any(|r| (r - Complex64::new(0.0, w)).norm() < 1e-9));
    assert!(roots.iter().any(|r| (r - Complex64::new(0.0, -w)).norm() < 1e-9));
    assert!(roots.iter().any(|r| (r.re + 2.0).abs() < 1e-9));
    assert_eq!(analyze_mode(&p, 3.0, DEFAULT_MARGINAL_TOL).unwrap().regime, Regime::Marginal);
}

#[test]
fn zero_mode_roots() {
    let roots = characteristic_roots(&params(0.25, 1.0, 1.0), 0.0).unwrap();
    assert_eq!(roots.iter().filter(|r| r.norm() == 0.0).count(), 2);
    assert!(roots.iter().any(|r| (r.re + 4.0).abs() < 1e-12));
}

#[test]
fn verdict_ignores_zero_mode() {
    let report = classify_regime(&params(0.5, 1.0, 1.0), &[0.0, 1.0, 4.0], DEFAULT_MARGINAL_TOL).unwrap();
    assert_eq!(report.modes[0].regime, Regime::Marginal);
    assert_eq!(report.verdict, Regime::Stable);
    let report = classify_regime(&params(0.5, 1.0, 0.2), &[1.0, 4.0], DEFAULT_MARGINAL_TOL).unwrap();
    assert_eq!(report.verdict, Regime::Unstable);
}

#[test]
fn tau_zero_has_no_cubic() {
    let p = params(0.0, 1.0, 1.0);
    assert!(matches!(hurwitz_minors(&p, 1.0), Err(LabError::TauZero)));
    assert!(classify_regime(&p, &[], DEFAULT_MARGINAL_TOL).is_err());
}
