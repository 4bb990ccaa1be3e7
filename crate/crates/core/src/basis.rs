//! Eigenfunction bases of the negative Laplacian on separable domains.
//!
//! Every basis is a tensor product of one-dimensional factors:
//!
//! * Dirichlet axis of length `L` with `n` modes: `sqrt(2/L) sin(j π x / L)`,
//!   `j = 1..=n`, eigenvalue `(j π / L)^2`.
//! * Periodic axis of length `L` with maximal wavenumber `K`: the constant
//!   `1/sqrt(L)` plus `sqrt(2/L) cos(2π k x / L)` and `sqrt(2/L) sin(2π k x / L)`
//!   for `k = 1..=K`, eigenvalue `(2π k / L)^2`.
//!
//! Modes are ordered by ascending eigenvalue. Physical samples live on a
//! uniform tensor grid. Fields in the span of the basis round-trip exactly.
//! Quadratic expressions (products of two fields) are projected exactly when
//! `dealias` is set: on a periodic axis by trapezoid quadrature, on a Dirichlet
//! axis by fitting the cosine polynomial through the samples and projecting it
//! onto the sines analytically.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    DirichletInterval,
    DirichletRectangle,
    Torus,
}

impl BasisKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasisKind::DirichletInterval => "dirichlet-interval",
            BasisKind::DirichletRectangle => "dirichlet-rectangle",
            BasisKind::Torus => "torus",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BasisKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet-interval" => Ok(BasisKind::DirichletInterval),
            "dirichlet-rectangle" => Ok(BasisKind::DirichletRectangle),
            "torus" => Ok(BasisKind::Torus),
            other => Err(LabError::UnsupportedBasis(format!("unknown kind `{other}`"))),
        }
    }
}

/// Construction request for a [`SpectralBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub kind: BasisKind,
    /// Edge lengths, one per axis.
    pub lengths: Vec<f64>,
    /// Dirichlet: modes per axis. Torus: maximal wavenumber per axis.
    pub modes: Vec<usize>,
    /// Torus only: keep the constant (λ = 0) mode.
    pub include_zero: bool,
    /// Oversample the grid so quartic products integrate exactly.
    pub dealias: bool,
}

impl BasisSpec {
    pub fn new(kind: BasisKind, lengths: Vec<f64>, modes: Vec<usize>) -> Self {
        Self {
            kind,
            lengths,
            modes,
            include_zero: false,
            dealias: true,
        }
    }

    pub fn interval(length: f64, modes: usize) -> Self {
        Self::new(BasisKind::DirichletInterval, vec![length], vec![modes])
    }

    pub fn rectangle(lengths: Vec<f64>, modes: Vec<usize>) -> Self {
        Self::new(BasisKind::DirichletRectangle, lengths, modes)
    }

    pub fn torus(lengths: Vec<f64>, wavenumbers: Vec<usize>) -> Self {
        Self::new(BasisKind::Torus, lengths, wavenumbers)
    }

    pub fn with_zero_mode(mut self, include_zero: bool) -> Self {
        self.include_zero = include_zero;
        self
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn build(&self) -> Result<SpectralBasis> {
        SpectralBasis::new(self)
    }
}

/// One-dimensional factor of a tensor basis.
#[derive(Debug, Clone)]
struct AxisFactor {
    /// Signed labels: Dirichlet `j >= 1`; torus `0` constant, `+k` cosine, `-k` sine.
    labels: Vec<i64>,
    lambdas: Vec<f64>,
    nodes: Vec<f64>,
    weight: f64,
    /// `values[f * nodes.len() + i]`
    values: Vec<f64>,
    /// Rows of the exact projection for products of two fields, same layout.
    proj: Vec<f64>,
}

impl AxisFactor {
    fn dirichlet(length: f64, n: usize, dealias: bool) -> Self {
        let intervals = if dealias { 2 * n + 1 } else { n + 1 };
        let h = length / intervals as f64;
        let nodes: Vec<f64> = (1..intervals).map(|i| i as f64 * h).collect();
        let norm = (2.0 / length).sqrt();
        let mut labels = Vec::with_capacity(n);
        let mut lambdas = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n * nodes.len());
        for j in 1..=n {
            labels.push(j as i64);
            let k = j as f64 * PI / length;
            lambdas.push(k * k);
            // sin(j π i / N) evaluated from the integer phase keeps zeros exact.
            values.extend((1..intervals).map(|i| {
                let phase = (j * i) % (2 * intervals);
                norm * (PI * phase as f64 / intervals as f64).sin()
            }));
        }
        // A product of two sine fields is a cosine polynomial of degree <= 2n
        // vanishing at both ends: interpolate its cosine coefficients a_m
        // (discrete cosine transform over N intervals), then take
        // ∫ cos(mπx/L) φ_k dx in closed form.
        let nn = intervals;
        let mut proj = Vec::with_capacity(n * nodes.len());
        for k in 1..=n {
            let s_km: Vec<f64> = (0..=nn)
                .map(|m| {
                    let (k, m) = (k as i64, m as i64);
                    if (k + m) % 2 == 0 {
                        0.0
                    } else {
                        norm * (length / PI) * 2.0 * k as f64 / (k * k - m * m) as f64
                    }
                })
                .collect();
            proj.extend((1..nn).map(|i| {
                (0..=nn)
                    .map(|m| {
                        let half = if m == 0 || m == nn { 0.5 } else { 1.0 };
                        let phase = (m * i) % (2 * nn);
                        half * s_km[m] * (2.0 / nn as f64) * (PI * phase as f64 / nn as f64).cos()
                    })
                    .sum::<f64>()
            }));
        }
        Self {
            labels,
            lambdas,
            nodes,
            weight: h,
            values,
            proj,
        }
    }

    fn periodic(length: f64, kmax: usize, dealias: bool) -> Self {
        let points = if dealias { 4 * kmax + 1 } else { 2 * kmax + 1 };
        let h = length / points as f64;
        let nodes: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
        let norm = (2.0 / length).sqrt();
        let mut labels = vec![0_i64];
        let mut lambdas = vec![0.0];
        let mut values = vec![1.0 / length.sqrt(); points];
        for k in 1..=kmax {
            let wn = 2.0 * PI * k as f64 / length;
            for sign in [1_i64, -1] {
                labels.push(sign * k as i64);
                lambdas.push(wn * wn);
                values.extend((0..points).map(|i| {
                    let phase = 2.0 * PI * ((k * i) % points) as f64 / points as f64;
                    if sign > 0 {
                        norm * phase.cos()
                    } else {
                        norm * phase.sin()
                    }
                }));
            }
        }
        let proj = values.iter().map(|v| v * h).collect();
        Self {
            labels,
            lambdas,
            nodes,
            weight: h,
            values,
            proj,
        }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    fn value(&self, f: usize, i: usize) -> f64 {
        self.values[f * self.nodes.len() + i]
    }

    fn proj(&self, f: usize, i: usize) -> f64 {
        self.proj[f * self.nodes.len() + i]
    }
}

/// Eigenpairs of `-Δ` on a separable domain with a collocation grid.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    spec: BasisSpec,
    labels: Vec<Vec<i64>>,
    lambdas: Vec<f64>,
    grid_shape: Vec<usize>,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// `synth[j * n_grid + i] = φ_j(x_i)`
    synth: Vec<f64>,
    /// Product projection rows, same layout as `synth`.
    proj: Vec<f64>,
}

impl SpectralBasis {
    pub fn new(spec: &BasisSpec) -> Result<Self> {
        let dim = spec.lengths.len();
        if dim == 0 {
            return Err(LabError::UnsupportedBasis("no axes given".into()));
        }
        if dim > 3 {
            return Err(LabError::UnsupportedBasis(format!(
                "dimension {dim} > 3 is not supported"
            )));
        }
        if spec.modes.len() != dim {
            return Err(LabError::LengthMismatch {
                expected: dim,
                got: spec.modes.len(),
            });
        }
        match (spec.kind, dim) {
            (BasisKind::DirichletInterval, 1) | (BasisKind::DirichletRectangle, 2 | 3) => {}
            (BasisKind::Torus, _) => {}
            (kind, d) => {
                return Err(LabError::UnsupportedBasis(format!(
                    "{kind} does not accept {d} axes"
                )))
            }
        }
        if let Some(&l) = spec.lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(LabError::InvalidParameter {
                name: "basis.lengths",
                reason: format!("edge lengths must be positive, got {l}"),
            });
        }
        if spec.modes.contains(&0) {
            return Err(LabError::InvalidParameter {
                name: "basis.modes",
                reason: "mode counts must be >= 1 on every axis".into(),
            });
        }

        let factors: Vec<AxisFactor> = spec
            .lengths
            .iter()
            .zip(&spec.modes)
            .map(|(&l, &n)| match spec.kind {
                BasisKind::Torus => AxisFactor::periodic(l, n, spec.dealias),
                _ => AxisFactor::dirichlet(l, n, spec.dealias),
            })
            .collect();

        let grid_shape: Vec<usize> = factors.iter().map(|f| f.nodes.len()).collect();
        let n_grid: usize = grid_shape.iter().product();
        let nodes: Vec<Vec<f64>> = factors.iter().map(|f| f.nodes.clone()).collect();

        let weights = {
            let w: f64 = factors.iter().map(|f| f.weight).product();
            vec![w; n_grid]
        };

        // Enumerate factor multi-indices.
        let mut combos: Vec<Vec<usize>> = vec![vec![]];
        for f in &factors {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    (0..f.len()).map(move |i| {
                        let mut c = c.clone();
                        c.push(i);
                        c
                    })
                })
                .collect();
        }
        let mut modes: Vec<(f64, Vec<i64>, Vec<usize>)> = combos
            .into_iter()
            .map(|c| {
                let lambda: f64 = c.iter().zip(&factors).map(|(&i, f)| f.lambdas[i]).sum();
                let label: Vec<i64> = c.iter().zip(&factors).map(|(&i, f)| f.labels[i]).collect();
                (lambda, label, c)
            })
            .filter(|(_, label, _)| {
                spec.kind != BasisKind::Torus || spec.include_zero || label.iter().any(|&k| k != 0)
            })
            .collect();
        modes.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

        let mut synth = Vec::with_capacity(modes.len() * n_grid);
        let mut proj = Vec::with_capacity(modes.len() * n_grid);
        for (_, _, combo) in &modes {
            for flat in 0..n_grid {
                let mut rest = flat;
                let mut value = 1.0;
                let mut row = 1.0;
                for axis in (0..dim).rev() {
                    let i = rest % grid_shape[axis];
                    rest /= grid_shape[axis];
                    value *= factors[axis].value(combo[axis], i);
                    row *= factors[axis].proj(combo[axis], i);
                }
                synth.push(value);
                proj.push(row);
            }
        }

        Ok(Self {
            spec: spec.clone(),
            lambdas: modes.iter().map(|m| m.0).collect(),
            labels: modes.into_iter().map(|m| m.1).collect(),
            grid_shape,
            nodes,
            weights,
            synth,
            proj,
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn kind(&self) -> BasisKind {
        self.spec.kind
    }

    pub fn dim(&self) -> usize {
        self.spec.lengths.len()
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Per-axis labels of mode `j` (see module docs for the torus convention).
    pub fn label(&self, j: usize) -> &[i64] {
        &self.labels[j]
    }

    pub fn grid_len(&self) -> usize {
        self.weights.len()
    }

    pub fn grid_shape(&self) -> &[usize] {
        &self.grid_shape
    }

    pub fn nodes(&self, axis: usize) -> &[f64] {
        &self.nodes[axis]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `φ_j` sampled on the grid.
    pub fn mode_samples(&self, j: usize) -> &[f64] {
        let n = self.grid_len();
        &self.synth[j * n..(j + 1) * n]
    }

    /// Smallest positive eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        self.lambdas
            .iter()
            .copied()
            .find(|&l| l > 0.0)
            .unwrap_or(f64::INFINITY)
    }

    /// Spectral constant `1/sqrt(λ_min)` in `‖∇v‖ <= C ‖Δv‖`.
    pub fn poincare_constant(&self) -> f64 {
        1.0 / self.lambda_min().sqrt()
    }

    fn check_coeffs(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.len() {
            return Err(LabError::LengthMismatch {
                expected: self.len(),
                got: coeffs.len(),
            });
        }
        Ok(())
    }

    pub fn to_physical(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_coeffs(coeffs)?;
        let n = self.grid_len();
        let mut out = vec![0.0; n];
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, &phi) in out.iter_mut().zip(&self.synth[j * n..(j + 1) * n]) {
                *o += c * phi;
            }
        }
        Ok(out)
    }

    pub fn from_physical(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.grid_len() {
            return Err(LabError::LengthMismatch {
                expected: self.grid_len(),
                got: samples.len(),
            });
        }
        let n = self.grid_len();
        let weighted: Vec<f64> = samples.iter().zip(&self.weights).map(|(s, w)| s * w).collect();
        Ok((0..self.len())
            .map(|j| {
                self.synth[j * n..(j + 1) * n]
                    .iter()
                    .zip(&weighted)
                    .map(|(p, v)| p * v)
                    .sum()
            })
            .collect())
    }

    /// Galerkin projection of grid samples of a quadratic expression, i.e. a
    /// sum of products of two fields from the span of the basis.
    pub fn project_quadratic(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.grid_len() {
            return Err(LabError::LengthMismatch {
                expected: self.grid_len(),
                got: samples.len(),
            });
        }
        let n = self.grid_len();
        Ok((0..self.len())
            .map(|j| {
                self.proj[j * n..(j + 1) * n]
                    .iter()
                    .zip(samples)
                    .map(|(p, v)| p * v)
                    .sum()
            })
            .collect())
    }

    /// Galerkin projection of a pointwise product of two grid fields.
    pub fn project_product(&self, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        self.project_quadratic(&prod)
    }

    /// Matrix of the Galerkin multiplication operator `v ↦ P(w v)` for a
    /// field `w` sampled on the grid.
    pub fn multiplication_matrix(&self, w_grid: &[f64]) -> Result<DMatrix<f64>> {
        if w_grid.len() != self.grid_len() {
            return Err(LabError::LengthMismatch {
                expected: self.grid_len(),
                got: w_grid.len(),
            });
        }
        let n = self.len();
        let ng = self.grid_len();
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            let wk: Vec<f64> = self.mode_samples(k).iter().zip(w_grid).map(|(a, b)| a * b).collect();
            for j in 0..n {
                m[(j, k)] = self.proj[j * ng..(j + 1) * ng]
                    .iter()
                    .zip(&wk)
                    .map(|(p, v)| p * v)
                    .sum();
            }
        }
        Ok(m)
    }

    /// Modal Laplacian: `Δ e_j = -λ_j e_j`.
    pub fn apply_laplacian(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_coeffs(coeffs)?;
        Ok(coeffs.iter().zip(&self.lambdas).map(|(c, l)| -l * c).collect())
    }

    /// Discrete sup-norm over the collocation grid.
    pub fn linf(&self, coeffs: &[f64]) -> Result<f64> {
        Ok(self
            .to_physical(coeffs)?
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs())))
    }

    /// Quadrature L2 norm of grid samples.
    pub fn grid_l2(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// `∫_0^π sin(pθ) dθ` for integer `p`.
fn sine_integral(p: i64) -> f64 {
    if p == 0 {
        0.0
    } else if p.rem_euclid(2) == 1 {
        2.0 / p as f64
    } else {
        0.0
    }
}

/// Exact `∫_0^L φ_a φ_b φ_k dx` for the Dirichlet sine basis on `[0, L]`.
pub fn interval_triple_product(length: f64, a: usize, b: usize, k: usize) -> f64 {
    let (a, b, k) = (a as i64, b as i64, k as i64);
    // sin aθ sin bθ = (cos(a-b)θ - cos(a+b)θ)/2 ; ∫ sin kθ cos mθ = (J(k+m) + J(k-m))/2
    let sc = |m: i64| 0.5 * (sine_integral(k + m) + sine_integral(k - m));
    let theta_integral = 0.5 * (sc(a - b) - sc(a + b));
    (2.0 / length).powf(1.5) * (length / PI) * theta_integral
}

/// Projection of `u v` onto the first `n` Dirichlet sine modes by exact
/// modal convolution (no grid). Limited to `n <= 16`.
pub fn exact_interval_product(length: f64, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let n = u.len();
    if v.len() != n {
        return Err(LabError::LengthMismatch {
            expected: n,
            got: v.len(),
        });
    }
    if n > 16 {
        return Err(LabError::UnsupportedBasis(format!(
            "exact convolution path limited to 16 modes, got {n}"
        )));
    }
    Ok((1..=n)
        .map(|k| {
            let mut s = 0.0;
            for a in 1..=n {
                for b in 1..=n {
                    s += u[a - 1] * v[b - 1] * interval_triple_product(length, a, b, k);
                }
            }
            s
        })
        .collect())
}
