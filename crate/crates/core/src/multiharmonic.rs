//! Time-periodic solutions in the frequency domain.
//!
//! With `u = Re Σ_{m>=1} û_m e^{imωt}` and the same expansion for `r`, each
//! harmonic satisfies the Helmholtz-type equation
//!
//! `S(m, ω, λ) û_m = ½ η m²ω² [Σ_{ℓ=1}^{m-1} P(û_ℓ û_{m-ℓ}) + 2 Σ_{k>=1} P(conj(û_k) û_{k+m})] + m²ω² r̂_m`
//!
//! with `S = c²λ - m²ω² + i(bmωλ - τm³ω³)`, the sums cut at `k + m <= M`.

use num_complex::Complex64;

use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};
use crate::params::PhysicalParams;
use crate::state::ModalState;

pub const NEAR_SINGULAR: f64 = 1e-12;
pub const DEFAULT_HARMONICS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicField {
    pub omega: f64,
    /// `coeffs[m - 1][j] = û_{m,j}`
    pub coeffs: Vec<Vec<Complex64>>,
}

impl HarmonicField {
    pub fn zeros(omega: f64, harmonics: usize, modes: usize) -> Self {
        Self {
            omega,
            coeffs: vec![vec![Complex64::new(0.0, 0.0); modes]; harmonics],
        }
    }

    pub fn harmonics(&self) -> usize {
        self.coeffs.len()
    }

    pub fn modes(&self) -> usize {
        self.coeffs.first().map_or(0, Vec::len)
    }

    pub fn harmonic(&self, m: usize) -> &[Complex64] {
        &self.coeffs[m - 1]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().flatten().all(|c| c.is_finite())
    }

    /// `(Σ_j λ_j |û_{m,j}|²)^{1/2}`
    pub fn h1_norm(&self, basis: &SpectralBasis, m: usize) -> f64 {
        self.harmonic(m)
            .iter()
            .zip(basis.lambdas())
            .map(|(c, l)| l * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Total H¹-type norm over all harmonics.
    pub fn total_h1(&self, basis: &SpectralBasis) -> f64 {
        (1..=self.harmonics())
            .map(|m| self.h1_norm(basis, m).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Modal time signal `Re Σ_m û_m e^{imωt}`.
    pub fn modal_signal(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.modes()];
        for (k, row) in self.coeffs.iter().enumerate() {
            let e = Complex64::from_polar(1.0, (k + 1) as f64 * self.omega * t);
            for (o, c) in out.iter_mut().zip(row) {
                *o += (c * e).re;
            }
        }
        out
    }

    /// Grid signal from the two-sided sum `½ Σ_{m≠0} û_m e^{imωt}`,
    /// `û_{-m} = conj(û_m)`, kept complex so the reality of the
    /// reconstruction can be checked.
    pub fn grid_signal_complex(&self, basis: &SpectralBasis, t: f64) -> Result<Vec<Complex64>> {
        let mut re = vec![0.0; basis.grid_len()];
        let mut im = vec![0.0; basis.grid_len()];
        for (k, row) in self.coeffs.iter().enumerate() {
            let e = Complex64::from_polar(1.0, (k + 1) as f64 * self.omega * t);
            let pos: Vec<Complex64> = row.iter().map(|c| 0.5 * c * e).collect();
            let neg: Vec<Complex64> = row.iter().map(|c| 0.5 * c.conj() * e.conj()).collect();
            for part in [pos, neg] {
                let gr = basis.to_physical(&part.iter().map(|c| c.re).collect::<Vec<_>>())?;
                let gi = basis.to_physical(&part.iter().map(|c| c.im).collect::<Vec<_>>())?;
                for i in 0..re.len() {
                    re[i] += gr[i];
                    im[i] += gi[i];
                }
            }
        }
        Ok(re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
    }
}

/// Diagonal symbol of harmonic `m` on mode `λ`.
pub fn helmholtz_symbol(params: &PhysicalParams, m: usize, omega: f64, lambda: f64) -> Result<Complex64> {
    if m == 0 {
        return Err(LabError::InvalidParameter {
            name: "m",
            reason: "harmonic index starts at 1".into(),
        });
    }
    let w = m as f64 * omega;
    let (tau, c2, b) = (params.tau(), params.c().powi(2), params.b());
    let s = Complex64::new(c2 * lambda - w * w, b * w * lambda - tau * w * w * w);
    if s.norm() < NEAR_SINGULAR {
        return Err(LabError::NearSingular {
            m,
            j: 0,
            magnitude: s.norm(),
        });
    }
    Ok(s)
}

struct GridHarmonics {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn to_grids(basis: &SpectralBasis, field: &HarmonicField) -> Result<GridHarmonics> {
    let mut re = Vec::with_capacity(field.harmonics());
    let mut im = Vec::with_capacity(field.harmonics());
    for row in &field.coeffs {
        re.push(basis.to_physical(&row.iter().map(|c| c.re).collect::<Vec<_>>())?);
        im.push(basis.to_physical(&row.iter().map(|c| c.im).collect::<Vec<_>>())?);
    }
    Ok(GridHarmonics { re, im })
}

fn convolution_from_grids(
    basis: &SpectralBasis,
    g: &GridHarmonics,
    eta: f64,
    omega: f64,
    m: usize,
) -> Result<Vec<Complex64>> {
    let big_m = g.re.len();
    let n = basis.grid_len();
    let (mut pr, mut pi) = (vec![0.0; n], vec![0.0; n]);
    // Σ_{ℓ=1}^{m-1} û_ℓ û_{m-ℓ}
    for l in 1..m {
        let (a, b) = (l - 1, m - l - 1);
        for i in 0..n {
            pr[i] += g.re[a][i] * g.re[b][i] - g.im[a][i] * g.im[b][i];
            pi[i] += g.re[a][i] * g.im[b][i] + g.im[a][i] * g.re[b][i];
        }
    }
    // 2 Σ_{k=1}^{M-m} conj(û_k) û_{k+m}
    for k in 1..=big_m.saturating_sub(m) {
        let (a, b) = (k - 1, k + m - 1);
        for i in 0..n {
            pr[i] += 2.0 * (g.re[a][i] * g.re[b][i] + g.im[a][i] * g.im[b][i]);
            pi[i] += 2.0 * (g.re[a][i] * g.im[b][i] - g.im[a][i] * g.re[b][i]);
        }
    }
    let scale = 0.5 * eta * (m as f64 * omega).powi(2);
    let re = basis.project_quadratic(&pr)?;
    let im = basis.project_quadratic(&pi)?;
    Ok(re
        .into_iter()
        .zip(im)
        .map(|(a, b)| Complex64::new(scale * a, scale * b))
        .collect())
}

/// Quadratic coupling term for harmonic `m`.
pub fn convolution_rhs(basis: &SpectralBasis, field: &HarmonicField, eta: f64, m: usize) -> Result<Vec<Complex64>> {
    if m == 0 || m > field.harmonics() {
        return Err(LabError::InvalidParameter {
            name: "m",
            reason: format!("harmonic {m} outside 1..={}", field.harmonics()),
        });
    }
    if field.modes() != basis.len() {
        return Err(LabError::LengthMismatch {
            expected: basis.len(),
            got: field.modes(),
        });
    }
    if eta == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); basis.len()]);
    }
    convolution_from_grids(basis, &to_grids(basis, field)?, eta, field.omega, m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub harmonics: usize,
    pub tol: f64,
    pub relaxation: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            harmonics: DEFAULT_HARMONICS,
            tol: 1e-10,
            relaxation: 0.5,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub iterations: usize,
    /// Relative equation residual after each iteration.
    pub history: Vec<f64>,
    pub residual: f64,
    pub relaxation: f64,
}

struct Problem<'a> {
    basis: &'a SpectralBasis,
    eta: f64,
    omega: f64,
    symbols: Vec<Vec<Complex64>>,
    /// `m²ω² r̂_m`
    forcing: Vec<Vec<Complex64>>,
}

impl Problem<'_> {
    fn rhs(&self, field: &HarmonicField) -> Result<Vec<Vec<Complex64>>> {
        let grids = if self.eta != 0.0 {
            Some(to_grids(self.basis, field)?)
        } else {
            None
        };
        (1..=field.harmonics())
            .map(|m| {
                let mut r = self.forcing[m - 1].clone();
                if let Some(g) = &grids {
                    for (x, c) in r.iter_mut().zip(convolution_from_grids(self.basis, g, self.eta, self.omega, m)?) {
                        *x += c;
                    }
                }
                Ok(r)
            })
            .collect()
    }

    fn solve(&self, rhs: &[Vec<Complex64>]) -> HarmonicField {
        HarmonicField {
            omega: self.omega,
            coeffs: rhs
                .iter()
                .zip(&self.symbols)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a / b).collect())
                .collect(),
        }
    }

    /// `‖S û - rhs(û)‖ / ‖rhs(û)‖` in the modal l² norm over all harmonics.
    fn residual(&self, field: &HarmonicField, rhs: &[Vec<Complex64>]) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for m in 0..field.harmonics() {
            for j in 0..field.modes() {
                num += (self.symbols[m][j] * field.coeffs[m][j] - rhs[m][j]).norm_sqr();
                den += rhs[m][j].norm_sqr();
            }
        }
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            num.sqrt()
        }
    }
}

fn build_problem<'a>(
    params: &PhysicalParams,
    basis: &'a SpectralBasis,
    source: &[Vec<Complex64>],
    omega: f64,
    harmonics: usize,
) -> Result<Problem<'a>> {
    if params.delta() <= 0.0 {
        return Err(LabError::InvalidParameter {
            name: "physics.b",
            reason: format!(
                "the frequency-domain solver needs b > tau c^2 (delta = {})",
                params.delta()
            ),
        });
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(LabError::InvalidParameter {
            name: "forcing.omega",
            reason: format!("must be > 0, got {omega}"),
        });
    }
    if harmonics == 0 {
        return Err(LabError::InvalidParameter {
            name: "experiment.harmonics",
            reason: "at least one harmonic required".into(),
        });
    }
    if source.len() > harmonics {
        return Err(LabError::LengthMismatch {
            expected: harmonics,
            got: source.len(),
        });
    }
    let mut symbols = Vec::with_capacity(harmonics);
    for m in 1..=harmonics {
        let row = basis
            .lambdas()
            .iter()
            .enumerate()
            .map(|(j, &l)| {
                helmholtz_symbol(params, m, omega, l).map_err(|e| match e {
                    LabError::NearSingular { magnitude, .. } => LabError::NearSingular { m, j, magnitude },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        symbols.push(row);
    }
    let mut forcing = vec![vec![Complex64::new(0.0, 0.0); basis.len()]; harmonics];
    for (m, row) in source.iter().enumerate() {
        if row.len() != basis.len() {
            return Err(LabError::LengthMismatch {
                expected: basis.len(),
                got: row.len(),
            });
        }
        let w2 = ((m + 1) as f64 * omega).powi(2);
        forcing[m] = row.iter().map(|r| w2 * r).collect();
    }
    Ok(Problem {
        basis,
        eta: params.eta(),
        omega,
        symbols,
        forcing,
    })
}

/// Relative residual of the coupled Helmholtz system at `field`.
pub fn fixed_point_residual(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    source: &[Vec<Complex64>],
    field: &HarmonicField,
) -> Result<f64> {
    let prob = build_problem(params, basis, source, field.omega, field.harmonics())?;
    Ok(prob.residual(field, &prob.rhs(field)?))
}

/// Relaxed Picard iteration `û ← û + θ (S⁻¹[N(û) + m²ω² r̂] - û)` from the
/// linear response. `θ` is halved whenever the residual grows; ten
/// consecutive increases count as divergence.
pub fn solve_fixed_point(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    source: &[Vec<Complex64>],
    omega: f64,
    options: &FixedPointOptions,
) -> Result<(HarmonicField, FixedPointReport)> {
    if !(options.tol > 0.0) || !(options.relaxation > 0.0 && options.relaxation <= 1.0) {
        return Err(LabError::InvalidParameter {
            name: "solver.relaxation",
            reason: "tol must be > 0 and relaxation in (0, 1]".into(),
        });
    }
    let prob = build_problem(params, basis, source, omega, options.harmonics)?;
    let mut field = prob.solve(&prob.forcing);
    let mut theta = options.relaxation;
    let mut history = Vec::new();
    let mut growth = 0;
    let mut prev_res = f64::INFINITY;
    for it in 1..=options.max_iter {
        let rhs = prob.rhs(&field)?;
        let res = prob.residual(&field, &rhs);
        let target = prob.solve(&rhs);
        let mut change = 0.0;
        let mut next = field.clone();
        for m in 0..next.harmonics() {
            for j in 0..next.modes() {
                let d = theta * (target.coeffs[m][j] - field.coeffs[m][j]);
                next.coeffs[m][j] += d;
                change += basis.lambdas()[j] * d.norm_sqr();
            }
        }
        let size = next.total_h1(basis);
        let change = if size > 0.0 { change.sqrt() / size } else { change.sqrt() };
        history.push(res);
        if !next.is_finite() {
            return Err(LabError::Diverged {
                iterations: it,
                residual: res,
            });
        }
        if res > prev_res {
            growth += 1;
            theta = (theta * 0.5).max(1.0 / 64.0);
            if growth >= 10 {
                return Err(LabError::Diverged {
                    iterations: it,
                    residual: res,
                });
            }
        } else {
            growth = 0;
        }
        prev_res = res;
        field = next;
        if change < options.tol {
            let final_res = prob.residual(&field, &prob.rhs(&field)?);
            history.push(final_res);
            return Ok((
                field,
                FixedPointReport {
                    iterations: it,
                    history,
                    residual: final_res,
                    relaxation: theta,
                },
            ));
        }
    }
    Err(LabError::NotConverged {
        iterations: options.max_iter,
        change: prev_res,
    })
}

/// Temporal Fourier coefficients `û_m = (2/N) Σ_n u(t_n) e^{-imωt_n}` of one
/// uniformly sampled period (endpoint excluded).
pub fn harmonic_spectrum(states: &[ModalState], omega: f64, harmonics: usize) -> Result<HarmonicField> {
    let needed = 4 * harmonics;
    if states.len() < needed || harmonics == 0 {
        return Err(LabError::InsufficientSamples {
            needed: needed.max(4),
            got: states.len(),
        });
    }
    let n = states[0].len();
    let scale = 2.0 / states.len() as f64;
    let mut field = HarmonicField::zeros(omega, harmonics, n);
    for s in states {
        if s.len() != n {
            return Err(LabError::LengthMismatch {
                expected: n,
                got: s.len(),
            });
        }
        for m in 1..=harmonics {
            let e = Complex64::from_polar(scale, -(m as f64) * omega * s.t);
            for (c, &u) in field.coeffs[m - 1].iter_mut().zip(&s.u) {
                *c += e * u;
            }
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{exact_interval_product, BasisSpec};
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symbol_depends_on_m_omega() {
        let p = PhysicalParams::new(0.1, 1.0, 0.5, 0.0).unwrap();
        for l in [1.0, 4.0, 25.0] {
            let a = helmholtz_symbol(&p, 2, 1.3, l).unwrap();
            let b = helmholtz_symbol(&p, 1, 2.6, l).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn symbol_tau_zero_is_damped_helmholtz() {
        let p = PhysicalParams::new(0.0, 1.5, 0.4, 0.0).unwrap();
        let (w, l) = (2.0, 3.0);
        let classical = c(1.5 * 1.5 * l - w * w, 0.4 * w * l);
        assert!((helmholtz_symbol(&p, 1, w, l).unwrap() - classical).norm() < 1e-14);
    }

    #[test]
    fn symbol_imaginary_part_can_vanish_but_stays_invertible() {
        // bλ = τ m²ω² kills the imaginary part; the real part is then -δλ/τ.
        let (tau, cc, b) = (0.1, 1.0, 0.5);
        let p = PhysicalParams::new(tau, cc, b, 0.0).unwrap();
        let w = 2.0;
        let l = tau * w * w / b;
        let s = helmholtz_symbol(&p, 1, w, l).unwrap();
        assert!(s.im.abs() < 1e-14);
        assert!((s.re + p.delta() * l / tau).abs() < 1e-12);
    }

    #[test]
    fn convolution_examples() {
        let b = BasisSpec::interval(PI, 3).build().unwrap();
        let (eta, w) = (0.7, 1.5);
        let zero = HarmonicField::zeros(w, 3, 3);
        assert!(convolution_rhs(&b, &zero, eta, 2).unwrap().iter().all(|z| z.norm() == 0.0));
        let mut f = HarmonicField::zeros(w, 3, 3);
        f.coeffs[0] = vec![c(0.3, -0.2), c(0.1, 0.4), c(0.0, 0.05)];
        let m1 = convolution_rhs(&b, &f, eta, 1).unwrap();
        assert!(m1.iter().all(|z| z.norm() < 1e-15));
        // m = 2: (η/2)(2ω)² P(û_1 û_1), via the real exact convolution
        let (ur, ui): (Vec<f64>, Vec<f64>) = f.coeffs[0].iter().map(|z| (z.re, z.im)).unzip();
        let rr = exact_interval_product(PI, &ur, &ur).unwrap();
        let ii = exact_interval_product(PI, &ui, &ui).unwrap();
        let ri = exact_interval_product(PI, &ur, &ui).unwrap();
        let m2 = convolution_rhs(&b, &f, eta, 2).unwrap();
        let s = 0.5 * eta * (2.0 * w) * (2.0 * w);
        for j in 0..3 {
            let e = c(s * (rr[j] - ii[j]), s * 2.0 * ri[j]);
            assert!((m2[j] - e).norm() < 1e-12);
        }
    }

    #[test]
    fn cross_sum_enumeration_m3() {
        // only û_1, û_2 nonzero, M = 3: m = 1 sees 2 conj(û_1) û_2 ; m = 3 sees 2 û_1 û_2
        let b = BasisSpec::interval(1.0, 2).build().unwrap();
        let (eta, w) = (1.0, 1.0);
        let mut f = HarmonicField::zeros(w, 3, 2);
        f.coeffs[0] = vec![c(1.0, 0.5), c(0.0, 0.0)];
        f.coeffs[1] = vec![c(0.0, 1.0), c(0.2, 0.0)];
        let prod = |a: &[Complex64], bb: &[Complex64]| -> Vec<Complex64> {
            let re = |v: &[Complex64]| v.iter().map(|z| z.re).collect::<Vec<_>>();
            let im = |v: &[Complex64]| v.iter().map(|z| z.im).collect::<Vec<_>>();
            let rr = exact_interval_product(1.0, &re(a), &re(bb)).unwrap();
            let ii = exact_interval_product(1.0, &im(a), &im(bb)).unwrap();
            let ri = exact_interval_product(1.0, &re(a), &im(bb)).unwrap();
            let ir = exact_interval_product(1.0, &im(a), &re(bb)).unwrap();
            (0..rr.len()).map(|j| c(rr[j] - ii[j], ri[j] + ir[j])).collect()
        };
        let u1c: Vec<Complex64> = f.coeffs[0].iter().map(|z| z.conj()).collect();
        let m1 = convolution_rhs(&b, &f, eta, 1).unwrap();
        let e1 = prod(&u1c, &f.coeffs[1]);
        let m3 = convolution_rhs(&b, &f, eta, 3).unwrap();
        let e3 = prod(&f.coeffs[0], &f.coeffs[1]);
        for j in 0..2 {
            assert!((m1[j] - 0.5 * 2.0 * e1[j]).norm() < 1e-12);
            assert!((m3[j] - 0.5 * 9.0 * 2.0 * e3[j]).norm() < 1e-12);
        }
    }

    fn single_source(n: usize, amp: f64) -> Vec<Vec<Complex64>> {
        let mut r = vec![c(0.0, 0.0); n];
        r[0] = c(amp, 0.0);
        vec![r]
    }

    #[test]
    fn linear_decoupled_and_zero() {
        let p = PhysicalParams::new(0.1, 1.0, 0.5, 0.0).unwrap();
        let b = BasisSpec::interval(PI, 4).build().unwrap();
        let (f, rep) = solve_fixed_point(&p, &b, &single_source(4, 0.3), 2.0, &FixedPointOptions::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        let u1 = f.h1_norm(&b, 1);
        assert!(u1 > 0.0);
        for m in 2..=f.harmonics() {
            assert!(f.h1_norm(&b, m) < 1e-12 * u1);
        }
        let (z, _) = solve_fixed_point(&p, &b, &single_source(4, 0.0), 2.0, &FixedPointOptions::default()).unwrap();
        assert_eq!(z.total_h1(&b), 0.0);
    }

    #[test]
    fn second_harmonic_matches_perturbation() {
        let b = BasisSpec::interval(PI, 4).build().unwrap();
        let w = 2.0;
        let mut errs = Vec::new();
        for eta in [1e-2, 5e-3] {
            let p = PhysicalParams::new(0.1, 1.0, 0.5, eta).unwrap();
            let opts = FixedPointOptions {
                harmonics: 3,
                ..Default::default()
            };
            let (f, _) = solve_fixed_point(&p, &b, &single_source(4, 0.3), w, &opts).unwrap();
            let lin = f.harmonic(1).to_vec();
            let mut probe = HarmonicField::zeros(w, 2, 4);
            probe.coeffs[0] = lin;
            let rhs = convolution_rhs(&b, &probe, eta, 2).unwrap();
            let pert: Vec<Complex64> = rhs
                .iter()
                .zip(b.lambdas())
                .map(|(r, &l)| r / helmholtz_symbol(&p, 2, w, l).unwrap())
                .collect();
            let err: f64 = f.harmonic(2).iter().zip(&pert).map(|(a, b)| (a - b).norm()).sum();
            let size: f64 = pert.iter().map(|z| z.norm()).sum();
            errs.push(err / size);
        }
        // relative error shrinks with η
        assert!(errs[0] < 1e-2 && errs[1] < 0.6 * errs[0], "{errs:?}");
    }

    #[test]
    fn refuses_nondissipative() {
        let p = PhysicalParams::new(1.0, 1.0, 1.0, 0.1).unwrap();
        let b = BasisSpec::interval(PI, 2).build().unwrap();
        assert!(solve_fixed_point(&p, &b, &single_source(2, 1.0), 1.0, &FixedPointOptions::default()).is_err());
    }

    #[test]
    fn spectrum_of_cosine() {
        let w = 3.0;
        let n = 32;
        let states: Vec<ModalState> = (0..n)
            .map(|k| {
                let t = k as f64 * TAU / w / n as f64;
                ModalState::new(t, vec![(w * t).cos(), 0.0], vec![0.0; 2], vec![0.0; 2]).unwrap()
            })
            .collect();
        let f = harmonic_spectrum(&states, w, 4).unwrap();
        assert!((f.coeffs[0][0] - c(1.0, 0.0)).norm() < 1e-12);
        for m in 0..4 {
            for j in 0..2 {
                if (m, j) != (0, 0) {
                    assert!(f.coeffs[m][j].norm() < 1e-12);
                }
            }
        }
        assert!(harmonic_spectrum(&states, w, 9).is_err());
        let flat: Vec<ModalState> = states
            .iter()
            .map(|s| ModalState::new(s.t, vec![0.7, -0.1], vec![0.0; 2], vec![0.0; 2]).unwrap())
            .collect();
        let f = harmonic_spectrum(&flat, w, 4).unwrap();
        assert!(f.coeffs.iter().flatten().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn reconstruction_is_real() {
        let b = BasisSpec::rectangle(vec![1.0, 1.0], vec![2, 2]).build().unwrap();
        let mut f = HarmonicField::zeros(1.7, 3, b.len());
        for m in 0..3 {
            for j in 0..b.len() {
                f.coeffs[m][j] = c((m + j) as f64 * 0.3 - 0.5, 0.2 * j as f64 - 0.1 * m as f64);
            }
        }
        for t in [0.0, 0.37, 2.1] {
            let g = f.grid_signal_complex(&b, t).unwrap();
            let modal = b.to_physical(&f.modal_signal(t)).unwrap();
            for (z, r) in g.iter().zip(&modal) {
                assert!(z.im.abs() < 1e-12);
                assert!((z.re - r).abs() < 1e-12);
            }
        }
    }
}
