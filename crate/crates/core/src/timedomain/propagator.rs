//! Per-mode exponential propagators for the linear companion blocks.
//!
//! For a block `A` of size `k` and step `h`, the exponential of the
//! augmented matrix `[[hA, e_k, 0], [0, 0, 1], [0, 0, 0]]` carries `e^{hA}`
//! in its leading block and `φ1(hA) e_k`, `φ2(hA) e_k` in the two trailing
//! columns. This stays well defined when `A` is singular (torus zero mode).

use nalgebra::DMatrix;

/// Linear block of one mode.
pub(crate) fn companion_block(tau: f64, c: f64, b: f64, lambda: f64) -> DMatrix<f64> {
    if tau > 0.0 {
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(3, 3, &[
            0.0, 1.0, 0.0,
            0.0, 0.0, 1.0,
            -c * c * lambda / tau, -b * lambda / tau, -1.0 / tau,
        ]);
        m
    } else {
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -c * c * lambda, -b * lambda])
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ModePropagator {
    pub order: usize,
    /// `e^{hA}`, row-major.
    pub exp: Vec<f64>,
    /// `h φ1(hA) e_k`
    pub phi1: Vec<f64>,
    /// `h φ2(hA) e_k`
    pub phi2: Vec<f64>,
}

impl ModePropagator {
    pub fn new(block: &DMatrix<f64>, h: f64) -> Self {
        let k = block.nrows();
        let mut aug = DMatrix::zeros(k + 2, k + 2);
        aug.view_mut((0, 0), (k, k)).copy_from(&(block * h));
        aug[(k - 1, k)] = 1.0;
        aug[(k, k + 1)] = 1.0;
        let e = aug.exp();
        let mut exp = Vec::with_capacity(k * k);
        for r in 0..k {
            for c in 0..k {
                exp.push(e[(r, c)]);
            }
        }
        Self {
            order: k,
            exp,
            phi1: (0..k).map(|r| h * e[(r, k)]).collect(),
            phi2: (0..k).map(|r| h * e[(r, k + 1)]).collect(),
        }
    }

    pub fn apply_exp(&self, v: &[f64], out: &mut [f64]) {
        let k = self.order;
        for r in 0..k {
            out[r] = (0..k).map(|c| self.exp[r * k + c] * v[c]).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_like_block_phi_functions() {
        // 2x2 block with decoupled last row: A = [[0, 1], [0, -a]].
        let a = 3.0;
        let h = 0.2;
        let block = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, -a]);
        let p = ModePropagator::new(&block, h);
        let z = -a * h;
        let phi1 = (z.exp() - 1.0) / z;
        let phi2 = (z.exp() - 1.0 - z) / (z * z);
        assert!((p.exp[3] - z.exp()).abs() < 1e-14);
        assert!((p.phi1[1] - h * phi1).abs() < 1e-14);
        assert!((p.phi2[1] - h * phi2).abs() < 1e-14);
    }

    #[test]
    fn singular_block_is_fine() {
        let block = companion_block(0.5, 1.0, 1.0, 0.0);
        let p = ModePropagator::new(&block, 0.1);
        assert!(p.exp.iter().chain(&p.phi1).chain(&p.phi2).all(|v| v.is_finite()));
        // utt' = -a utt + 1 from rest: u(h) = [(1 - e^{-ah})/a - h + a h^2 / 2] / a^2
        let (a, h) = (2.0_f64, 0.1_f64);
        let exact = ((1.0 - (-a * h).exp()) / a - h + a * h * h / 2.0) / (a * a);
        assert!((p.phi1[0] - exact).abs() < 1e-15, "{} vs {exact}", p.phi1[0]);
    }
}
