//! Multi-run experiments built on the solvers: amplitude sweeps for
//! blow-up, the `tau -> 0` limit ladder, small-data calibration, per-mode
//! torus decay rates and harmonic cross-checks. Member runs of a sweep are
//! independent and run on the ambient rayon pool.

mod blowup;
mod decay;
mod harmonics;
mod tau_limit;

use std::fmt;
use std::str::FromStr;

use crate::basis::SpectralBasis;
use crate::error::{LabError, Result};
use crate::timedomain::InitialData;

pub use blowup::{run_blowup_sweep, BlowupOptions, BlowupRow, BlowupSweepReport};
pub use decay::{
    calibrate_small_data, small_data_run, torus_mode_decay_rates, ModeRate, SmallDataCalibration,
    SmallDataOptions, SmallDataRun,
};
pub use harmonics::{cross_validate_periodic, harmonic_scaling, CrossValidation, HarmonicScaling};
pub use tau_limit::{run_tau_sweep, tau_ladder, TauSweepReport, TauSweepRow};

/// Shape of amplitude-parameterized initial data along the first mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DataProfile {
    /// `u0 = u1 = u2 = a e_1`
    #[default]
    Aligned,
    /// `u0 = a e_1`, `u1 = u2 = 0`
    Displacement,
}

impl DataProfile {
    pub fn as_str(&self) -> &'static str {
        match self {
            DataProfile::Aligned => "aligned",
            DataProfile::Displacement => "displacement",
        }
    }

    pub fn data(&self, basis: &SpectralBasis, amplitude: f64) -> InitialData {
        let n = basis.len();
        let mut e = vec![0.0; n];
        e[0] = amplitude;
        match self {
            DataProfile::Aligned => InitialData::new(e.clone(), e.clone()).with_u2(e),
            DataProfile::Displacement => InitialData::new(e, vec![0.0; n]).with_u2(vec![0.0; n]),
        }
    }
}

impl fmt::Display for DataProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DataProfile {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aligned" => Ok(DataProfile::Aligned),
            "displacement" => Ok(DataProfile::Displacement),
            other => Err(LabError::InvalidParameter {
                name: "experiment.profile",
                reason: format!("unknown profile `{other}`"),
            }),
        }
    }
}

/// `count` samples `zeta_max · k / count`, `k = 1..=count`.
pub fn zeta_grid(zeta_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(zeta_max.is_finite() && zeta_max > 0.0) || count == 0 {
        return Err(LabError::InvalidParameter {
            name: "experiment.zeta_max",
            reason: format!("need zeta_max > 0 and at least one sample, got {zeta_max} / {count}"),
        });
    }
    Ok((1..=count).map(|k| zeta_max * k as f64 / count as f64).collect())
}

/// Composite trapezoid rule on uniform samples.
pub(crate) fn trapezoid(h: f64, values: &[f64]) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}
