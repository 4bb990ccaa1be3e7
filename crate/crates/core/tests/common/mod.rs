#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Roots of `tau s^3 + s^2 + b z s + c^2 z` by Cardano's formula.
pub fn cardano(tau: f64, c: f64, b: f64, z: f64) -> [Complex64; 3] {
    let (a2, a1, a0) = (1.0 / tau, b * z / tau, c * c * z / tau);
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2.powi(3) / 27.0 - a2 * a1 / 3.0 + a0;
    let disc = Complex64::new((q / 2.0).powi(2) + (p / 3.0).powi(3), 0.0).sqrt();
    let mut u = (Complex64::new(-q / 2.0, 0.0) + disc).powf(1.0 / 3.0);
    if u.norm() < 1e-300 {
        u = (Complex64::new(-q / 2.0, 0.0) - disc).powf(1.0 / 3.0);
    }
    let v = if u.norm() < 1e-300 {
        Complex64::new(0.0, 0.0)
    } else {
        -p / (3.0 * u)
    };
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let shift = Complex64::new(a2 / 3.0, 0.0);
    [u + v - shift, w * u + w.conj() * v - shift, w.conj() * u + w * v - shift]
}

/// Exact single-mode linear solution `Σ a_k e^{s_k t}` for data `(u0, u1, u2)`;
/// returns `(u, u_t, u_tt)`.
pub fn analytic_mode(tau: f64, c: f64, b: f64, lambda: f64, data: [f64; 3], t: f64) -> [f64; 3] {
    let s = cardano(tau, c, b, lambda);
    let one = Complex64::new(1.0, 0.0);
    let m = Matrix3::new(one, one, one, s[0], s[1], s[2], s[0] * s[0], s[1] * s[1], s[2] * s[2]);
    let rhs = Vector3::new(
        Complex64::new(data[0], 0.0),
        Complex64::new(data[1], 0.0),
        Complex64::new(data[2], 0.0),
    );
    let a = m.lu().solve(&rhs).expect("distinct roots");
    let mut out = [0.0; 3];
    for k in 0..3 {
        let e = a[k] * (s[k] * t).exp();
        out[0] += e.re;
        out[1] += (e * s[k]).re;
        out[2] += (e * s[k] * s[k]).re;
    }
    out
}

/// Exact single-mode solution of `u'' + b λ u' + c² λ u = 0`; returns `(u, u_t)`.
pub fn analytic_mode_tau0(c: f64, b: f64, lambda: f64, data: [f64; 2], t: f64) -> [f64; 2] {
    let (p, q) = (b * lambda, c * c * lambda);
    let d = Complex64::new(p * p - 4.0 * q, 0.0).sqrt();
    let s = [(-p + d) / 2.0, (-p - d) / 2.0];
    let one = Complex64::new(1.0, 0.0);
    let m = Matrix2::new(one, one, s[0], s[1]);
    let a = m
        .lu()
        .solve(&Vector2::new(Complex64::new(data[0], 0.0), Complex64::new(data[1], 0.0)))
        .expect("distinct roots");
    let mut out = [0.0; 2];
    for k in 0..2 {
        let e = a[k] * (s[k] * t).exp();
        out[0] += e.re;
        out[1] += (e * s[k]).re;
    }
    out
}
