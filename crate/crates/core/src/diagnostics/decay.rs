use crate::error::{LabError, Result};

use super::EnergyTrace;

/// `𝓔(t) ≈ prefactor · e^{-rate t}` on the fit window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub prefactor: f64,
    pub samples: usize,
}

/// Least-squares slope of `(x, y)`; returns `(slope, intercept)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Exponential decay rate of the energy over `window = (t0, t1)`.
pub fn fit_decay_rate(trace: &EnergyTrace, window: (f64, f64)) -> Result<DecayFit> {
    let (t0, t1) = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &e) in trace.times.iter().zip(&trace.energy) {
        if t < t0 || t > t1 {
            continue;
        }
        if !(e > 0.0) {
            return Err(LabError::NonPositiveEnergy { t });
        }
        xs.push(t);
        ys.push(e.ln());
    }
    if xs.len() < 2 {
        return Err(LabError::InsufficientSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    let (slope, intercept) = linear_fit(&xs, &ys);
    Ok(DecayFit {
        rate: -slope,
        prefactor: intercept.exp(),
        samples: xs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupEvent {
    /// Threshold crossing, interpolated in `log ‖u‖_∞` between samples.
    pub t_detect: f64,
    /// Local slope of `log ‖u‖_∞` just before the crossing.
    pub growth_exponent: f64,
}

/// First crossing of `threshold` by the sampled `‖u‖_∞`, if any.
pub fn detect_blowup(times: &[f64], linf: &[f64], threshold: f64) -> Result<Option<BlowupEvent>> {
    if !(threshold > 0.0) {
        return Err(LabError::InvalidParameter {
            name: "threshold",
            reason: format!("must be > 0, got {threshold}"),
        });
    }
    if times.len() != linf.len() {
        return Err(LabError::LengthMismatch {
            expected: times.len(),
            got: linf.len(),
        });
    }
    let Some(k) = linf.iter().position(|&v| v > threshold || v.is_nan()) else {
        return Ok(None);
    };
    let t_detect = if k == 0 || !linf[k].is_finite() || linf[k - 1] <= 0.0 {
        times[k]
    } else {
        let (a, b) = (linf[k - 1].ln(), linf[k].ln());
        let th = ((threshold.ln() - a) / (b - a)).clamp(0.0, 1.0);
        times[k - 1] + th * (times[k] - times[k - 1])
    };
    let lo = k.saturating_sub(10);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (lo..=k)
        .filter(|&i| linf[i].is_finite() && linf[i] > 0.0)
        .map(|i| (times[i], linf[i].ln()))
        .unzip();
    let growth_exponent = if xs.len() >= 2 { linear_fit(&xs, &ys).0 } else { f64::INFINITY };
    Ok(Some(BlowupEvent {
        t_detect,
        growth_exponent,
    }))
}
