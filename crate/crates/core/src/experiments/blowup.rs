use rayon::prelude::*;

use crate::basis::SpectralBasis;
use crate::diagnostics::detect_blowup;
use crate::error::{LabError, Result};
use crate::forcing::ForcingSpec;
use crate::params::PhysicalParams;
use crate::timedomain::{simulate_ivp, SolverConfig, Termination};

use super::DataProfile;

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupOptions {
    pub a_min: f64,
    pub a_max: f64,
    /// Geometric step of the coarse scan.
    pub scan_factor: f64,
    /// Bisection stops once `a_blow / a_safe <= ratio`.
    pub ratio: f64,
    pub profile: DataProfile,
}

impl Default for BlowupOptions {
    fn default() -> Self {
        Self {
            a_min: 0.125,
            a_max: 32.0,
            scan_factor: 2.0,
            ratio: 1.1,
            profile: DataProfile::Aligned,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupRow {
    /// Magnitude; the data are `-sign(η) · amplitude` along `e_1`.
    pub amplitude: f64,
    pub t_detect: Option<f64>,
    pub growth_exponent: Option<f64>,
    pub termination: &'static str,
}

impl BlowupRow {
    pub fn blew_up(&self) -> bool {
        self.t_detect.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupSweepReport {
    pub scan: Vec<BlowupRow>,
    pub bisection: Vec<BlowupRow>,
    /// `(a_safe, a_blow)`; `None` when inconclusive.
    pub bracket: Option<(f64, f64)>,
}

impl BlowupSweepReport {
    pub fn is_inconclusive(&self) -> bool {
        self.bracket.is_none()
    }

    /// All runs that blew up, sorted by amplitude.
    pub fn detection_table(&self) -> Vec<&BlowupRow> {
        let mut rows: Vec<&BlowupRow> = self.scan.iter().chain(&self.bisection).filter(|r| r.blew_up()).collect();
        rows.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));
        rows
    }

    /// Whether detection times strictly decrease with amplitude.
    pub fn t_detect_decreasing(&self) -> bool {
        self.detection_table()
            .windows(2)
            .all(|w| w[1].t_detect.unwrap() < w[0].t_detect.unwrap())
    }
}

fn member(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    forcing: &ForcingSpec,
    solver: &SolverConfig,
    profile: DataProfile,
    amplitude: f64,
) -> Result<BlowupRow> {
    let sign = if params.eta() > 0.0 { -1.0 } else { 1.0 };
    let data = profile.data(basis, sign * amplitude);
    let tr = simulate_ivp(params, basis, &data, forcing, solver)?;
    let (t_detect, growth) = match &tr.termination {
        Termination::Completed => (None, None),
        Termination::BlowupDetected { .. } => {
            let ev = detect_blowup(&tr.times(), &tr.linf, tr.threshold)?;
            match ev {
                Some(ev) => (Some(ev.t_detect), Some(ev.growth_exponent)),
                None => (Some(tr.last().t), None),
            }
        }
        // growth outran a single step
        Termination::StepFailure { t, .. } => (Some(*t), None),
    };
    Ok(BlowupRow {
        amplitude,
        t_detect,
        growth_exponent: growth,
        termination: tr.termination.as_str(),
    })
}

/// Coarse geometric scan for the first amplitude that blows up within the
/// horizon, then geometric bisection down to `ratio`.
pub fn run_blowup_sweep(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    forcing: &ForcingSpec,
    solver: &SolverConfig,
    options: &BlowupOptions,
) -> Result<BlowupSweepReport> {
    let o = options;
    if !(o.a_min > 0.0 && o.a_max >= o.a_min && o.scan_factor > 1.0 && o.ratio > 1.0) {
        return Err(LabError::InvalidParameter {
            name: "experiment.a_min",
            reason: "need 0 < a_min <= a_max, scan_factor > 1 and ratio > 1".into(),
        });
    }
    let mut amps = Vec::new();
    let mut a = o.a_min;
    while a <= o.a_max * (1.0 + 1e-12) {
        amps.push(a);
        a *= o.scan_factor;
    }
    let scan = amps
        .par_iter()
        .map(|&a| member(params, basis, forcing, solver, o.profile, a))
        .collect::<Result<Vec<_>>>()?;
    let first = scan.iter().position(BlowupRow::blew_up);
    let mut bisection = Vec::new();
    let bracket = match first {
        None | Some(0) => None,
        Some(k) => {
            let (mut lo, mut hi) = (scan[k - 1].amplitude, scan[k].amplitude);
            while hi / lo > o.ratio {
                let mid = (lo * hi).sqrt();
                let row = member(params, basis, forcing, solver, o.profile, mid)?;
                if row.blew_up() {
                    hi = mid;
                } else {
                    lo = mid;
                }
                bisection.push(row);
            }
            Some((lo, hi))
        }
    };
    Ok(BlowupSweepReport {
        scan,
        bisection,
        bracket,
    })
}
