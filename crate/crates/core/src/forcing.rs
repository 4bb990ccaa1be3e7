use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Excitation `r(x, t)`; the equations consume its second time derivative.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ForcingSpec {
    #[default]
    None,
    /// `r(x, t) = cos(ω t) Σ_j amplitudes[j] φ_j(x)`, i.e. `r̂_1 = amplitudes`
    /// and `r̂_m = 0` for `m >= 2`.
    ModalHarmonic { amplitudes: Vec<f64>, omega: f64 },
    /// Tabulated `r_tt` per mode, linearly interpolated and held constant
    /// outside the table.
    CustomSamples { times: Vec<f64>, rtt: Vec<Vec<f64>> },
}

impl ForcingSpec {
    pub fn harmonic(amplitudes: Vec<f64>, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(LabError::InvalidParameter {
                name: "forcing.omega",
                reason: format!("angular frequency must be positive, got {omega}"),
            });
        }
        Ok(ForcingSpec::ModalHarmonic { amplitudes, omega })
    }

    pub fn custom(times: Vec<f64>, rtt: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != rtt.len() {
            return Err(LabError::LengthMismatch {
                expected: times.len(),
                got: rtt.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::InvalidParameter {
                name: "forcing.times",
                reason: "sample times must be strictly increasing".into(),
            });
        }
        Ok(ForcingSpec::CustomSamples { times, rtt })
    }

    pub fn is_none(&self) -> bool {
        matches!(self, ForcingSpec::None)
    }

    pub fn omega(&self) -> Option<f64> {
        match self {
            ForcingSpec::ModalHarmonic { omega, .. } => Some(*omega),
            _ => None,
        }
    }

    /// Modal `r_tt(t)` over `n` modes.
    pub fn rtt(&self, t: f64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        self.add_rtt(t, &mut out);
        out
    }

    pub(crate) fn add_rtt(&self, t: f64, out: &mut [f64]) {
        match self {
            ForcingSpec::None => {}
            ForcingSpec::ModalHarmonic { amplitudes, omega } => {
                let s = -omega * omega * (omega * t).cos();
                for (o, a) in out.iter_mut().zip(amplitudes) {
                    *o += s * a;
                }
            }
            ForcingSpec::CustomSamples { times, rtt } => {
                let k = times.partition_point(|&s| s <= t);
                let row = |i: usize, o: &mut [f64], w: f64| {
                    for (x, v) in o.iter_mut().zip(&rtt[i]) {
                        *x += w * v;
                    }
                };
                if k == 0 {
                    row(0, out, 1.0);
                } else if k == times.len() {
                    row(times.len() - 1, out, 1.0);
                } else {
                    let th = (t - times[k - 1]) / (times[k] - times[k - 1]);
                    row(k - 1, out, 1.0 - th);
                    row(k, out, th);
                }
            }
        }
    }

    /// Harmonic coefficients `r̂_m`, `m = 1..=harmonics`, over `n` modes.
    /// Only single-frequency forcing has a multiharmonic representation.
    pub fn harmonic_coefficients(&self, harmonics: usize, n: usize) -> Result<Vec<Vec<Complex64>>> {
        let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; harmonics];
        match self {
            ForcingSpec::None => {}
            ForcingSpec::ModalHarmonic { amplitudes, .. } => {
                if harmonics > 0 {
                    for (o, a) in out[0].iter_mut().zip(amplitudes) {
                        *o = Complex64::new(*a, 0.0);
                    }
                }
            }
            ForcingSpec::CustomSamples { .. } => {
                return Err(LabError::InvalidParameter {
                    name: "forcing.kind",
                    reason: "tabulated forcing has no multiharmonic representation".into(),
                })
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_rtt() {
        let f = ForcingSpec::harmonic(vec![2.0, 0.5], 3.0).unwrap();
        let r = f.rtt(0.0, 3);
        assert_eq!(r, vec![-18.0, -4.5, 0.0]);
        let h = f.harmonic_coefficients(3, 3).unwrap();
        assert_eq!(h[0][0].re, 2.0);
        assert!(h[1].iter().chain(&h[2]).all(|c| c.norm() == 0.0));
    }

    #[test]
    fn custom_interpolates() {
        let f = ForcingSpec::custom(vec![0.0, 1.0], vec![vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(f.rtt(0.25, 1), vec![0.5]);
        assert_eq!(f.rtt(-1.0, 1), vec![0.0]);
        assert_eq!(f.rtt(5.0, 1), vec![2.0]);
        assert!(ForcingSpec::custom(vec![1.0, 0.0], vec![vec![0.0], vec![1.0]]).is_err());
    }

    #[test]
    fn rejects_nonpositive_frequency() {
        assert!(ForcingSpec::harmonic(vec![1.0], 0.0).is_err());
    }
}
