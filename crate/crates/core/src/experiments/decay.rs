use rayon::prelude::*;

use crate::basis::{BasisKind, SpectralBasis};
use crate::diagnostics::{energy, fit_decay_rate, EnergyTrace};
use crate::error::{LabError, Result};
use crate::forcing::ForcingSpec;
use crate::params::PhysicalParams;
use crate::timedomain::{simulate_ivp, InitialData, Integrator, Scheme, SolverConfig};

use super::DataProfile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallDataRun {
    pub amplitude: f64,
    pub energy0: f64,
    /// `sup_t 𝓔(t) / 𝓔(0)`
    pub sup_ratio: f64,
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallDataOptions {
    /// Largest amplitude tried; halved until accepted.
    pub a_start: f64,
    pub max_halvings: usize,
    /// Calibration horizon (shorter than the boundedness horizon).
    pub horizon: f64,
    /// Accepted relative deviation of the nonlinear from the linear sup ratio.
    pub tolerance: f64,
    pub profile: DataProfile,
}

impl Default for SmallDataOptions {
    fn default() -> Self {
        Self {
            a_start: 1.0,
            max_halvings: 20,
            horizon: 10.0,
            tolerance: 0.1,
            profile: DataProfile::Aligned,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallDataCalibration {
    pub amplitude: f64,
    /// Calibrated small-data energy level `𝓔(0)`.
    pub rho1: f64,
    pub linear: SmallDataRun,
    pub nonlinear: SmallDataRun,
    pub tried: Vec<SmallDataRun>,
}

/// One run of amplitude-parameterized data (sign `-sign(η)` along `e_1`).
pub fn small_data_run(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    solver: &SolverConfig,
    profile: DataProfile,
    amplitude: f64,
) -> Result<SmallDataRun> {
    let sign = if params.eta() > 0.0 { -1.0 } else { 1.0 };
    let data = profile.data(basis, sign * amplitude);
    let tr = simulate_ivp(params, basis, &data, &ForcingSpec::None, solver)?;
    let trace = EnergyTrace::from_trajectory(params, basis, &tr)?;
    let e0 = trace.energy[0];
    Ok(SmallDataRun {
        amplitude,
        energy0: e0,
        sup_ratio: if e0 > 0.0 { trace.max_energy() / e0 } else { 0.0 },
        completed: tr.is_completed(),
    })
}

/// Largest amplitude on a halving ladder whose nonlinear energy excursion
/// over the calibration horizon stays within `tolerance` of the linear one.
/// The corresponding `𝓔(0)` is the small-data level `ρ₁`.
pub fn calibrate_small_data(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    solver: &SolverConfig,
    options: &SmallDataOptions,
) -> Result<SmallDataCalibration> {
    let mut cal = solver.clone();
    cal.t_end = options.horizon;
    cal.validate()?;
    let lin_params = params.with_eta(0.0)?;
    let mut tried = Vec::new();
    let mut a = options.a_start;
    for _ in 0..=options.max_halvings {
        let (lin, nl) = rayon::join(
            || small_data_run(&lin_params, basis, &cal, options.profile, a),
            || small_data_run(params, basis, &cal, options.profile, a),
        );
        let (lin, nl) = (lin?, nl?);
        tried.push(nl);
        if nl.completed && (nl.sup_ratio - lin.sup_ratio).abs() <= options.tolerance * lin.sup_ratio {
            return Ok(SmallDataCalibration {
                amplitude: a,
                rho1: nl.energy0,
                linear: lin,
                nonlinear: nl,
                tried,
            });
        }
        a *= 0.5;
    }
    Err(LabError::NotConverged {
        iterations: options.max_halvings + 1,
        change: tried.last().map_or(f64::NAN, |r| r.sup_ratio),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRate {
    pub mode: usize,
    pub xi_norm: f64,
    /// Fitted energy decay rate of the mode in isolation.
    pub rate: f64,
}

/// Linear decay rate of one representative mode per distinct `|ξ|` on a
/// torus basis. Each mode starts from `u = e_j` at rest and is integrated
/// with step `dt` until its energy falls below `1e-8` of the start or
/// `t_max` is reached; the rate is fitted on the second half of that span.
pub fn torus_mode_decay_rates(
    params: &PhysicalParams,
    basis: &SpectralBasis,
    dt: f64,
    t_max: f64,
) -> Result<Vec<ModeRate>> {
    if basis.kind() != BasisKind::Torus {
        return Err(LabError::UnsupportedBasis(format!(
            "per-mode decay rates need a torus basis, got {}",
            basis.kind()
        )));
    }
    let lin = params.with_eta(0.0)?;
    let mut picks = Vec::new();
    for (j, &l) in basis.lambdas().iter().enumerate() {
        if l > 0.0 && picks.last().is_none_or(|&(_, prev): &(usize, f64)| (l - prev).abs() > 1e-12 * l) {
            picks.push((j, l));
        }
    }
    let forcing = ForcingSpec::None;
    let integ = Integrator::new(&lin, basis, &forcing, Scheme::ExponentialImex, dt, 1e-3)?;
    picks
        .par_iter()
        .map(|&(j, l)| {
            let mut data = InitialData::zeros(basis.len());
            data.u0[j] = 1.0;
            let mut state = crate::state::ModalState::new(0.0, data.u0, data.u1, vec![0.0; basis.len()])?;
            state.utt[j] = -lin.c().powi(2) * l;
            let e0 = energy(&lin, basis, &state)?.total;
            let mut trace = EnergyTrace::default();
            let mut k = 0usize;
            loop {
                let e = energy(&lin, basis, &state)?.total;
                trace.times.push(state.t);
                trace.energy.push(e);
                if e < 1e-8 * e0 || state.t >= t_max {
                    break;
                }
                state = integ.step(&state)?;
                k += 1;
                state.t = k as f64 * dt;
            }
            let end = state.t;
            let fit = fit_decay_rate(&trace, (0.5 * end, end))?;
            Ok(ModeRate {
                mode: j,
                xi_norm: l.sqrt(),
                rate: fit.rate,
            })
        })
        .collect()
}
