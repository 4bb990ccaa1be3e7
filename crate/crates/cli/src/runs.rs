//! One experiment run per resolved config.

use jmgt_core::diagnostics::{
    detect_blowup, energy, energy_identity_residual, fit_decay_rate, memory_z_residual, wave_z_residual, EnergyTrace,
    EnergyWeights,
};
use jmgt_core::experiments::{
    cross_validate_periodic, run_blowup_sweep, run_tau_sweep, tau_ladder, zeta_grid, BlowupOptions, BlowupRow,
};
use jmgt_core::multiharmonic::{FixedPointOptions, HarmonicField};
use jmgt_core::stability::{analyze_mode, classify_regime, hurwitz_minors, DEFAULT_MARGINAL_TOL};
use jmgt_core::state::modal_norms;
use jmgt_core::timedomain::{simulate_ivp, PeriodicOptions};
use jmgt_core::{ForcingSpec, InitialData, LabError, PhysicalParams, SpectralBasis, Termination, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Experiment, ForcingKind, RunConfig};
use crate::output::{num, opt, Artifact, Csv};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub artifacts: Vec<Artifact>,
    pub metrics: Value,
    /// Set when the run hit a numerical failure; artifacts may be partial.
    pub failure: Option<String>,
}

impl RunOutcome {
    fn failed(e: LabError) -> Self {
        Self {
            artifacts: Vec::new(),
            metrics: Value::Null,
            failure: Some(e.to_string()),
        }
    }
}

pub fn run(cfg: &RunConfig) -> RunOutcome {
    let res = match cfg.experiment {
        Experiment::Stability => stability(cfg),
        Experiment::Simulate => simulate(cfg),
        Experiment::Periodic => periodic(cfg),
        Experiment::BlowupSweep => blowup(cfg),
        Experiment::TauSweep => tau_sweep(cfg),
    };
    res.unwrap_or_else(RunOutcome::failed)
}

fn padded(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(n, 0.0);
    out
}

fn forcing(cfg: &RunConfig, n: usize) -> Result<ForcingSpec, LabError> {
    match cfg.forcing.kind {
        ForcingKind::None => Ok(ForcingSpec::None),
        ForcingKind::ModalHarmonic => ForcingSpec::harmonic(
            padded(&cfg.forcing.amplitude, n),
            cfg.forcing.omega.expect("validated"),
        ),
    }
}

fn initial_data(cfg: &RunConfig, basis: &SpectralBasis) -> InitialData {
    let n = basis.len();
    let o = &cfg.options;
    match &o.u0 {
        Some(u0) => {
            let u1 = o.u1.as_deref().map(|v| padded(v, n)).unwrap_or_else(|| vec![0.0; n]);
            let data = InitialData::new(padded(u0, n), u1);
            match &o.u2 {
                Some(u2) => data.with_u2(padded(u2, n)),
                None => data,
            }
        }
        None => o.profile.data(basis, o.amplitude.expect("validated")),
    }
}

fn stability(cfg: &RunConfig) -> Result<RunOutcome, LabError> {
    let p = cfg.params();
    let zetas = zeta_grid(cfg.options.zeta_max.expect("validated"), cfg.options.zeta_samples)?;
    let report = classify_regime(&p, &zetas, DEFAULT_MARGINAL_TOL)?;
    let mut csv = Csv::new(&[
        "zeta", "m1", "m2", "m3", "re_s1", "im_s1", "re_s2", "im_s2", "re_s3", "im_s3", "regime",
    ]);
    for m in &report.modes {
        let mut row = vec![num(m.zeta)];
        row.extend(m.minors.iter().map(|&x| num(x)));
        for r in &m.roots {
            row.push(num(r.re));
            row.push(num(r.im));
        }
        row.push(m.regime.as_str().to_string());
        csv.row(row);
    }
    let abscissae: Vec<f64> = report.modes.iter().map(|m| m.abscissa).collect();

    let (checked, disagreements) = routh_hurwitz_self_check(cfg.options.seed, cfg.options.rh_checks)?;
    let failure = (disagreements > 0).then(|| {
        format!("Routh-Hurwitz self-check: {disagreements} of {checked} draws disagree with the computed roots")
    });
    Ok(RunOutcome {
        artifacts: vec![csv.into_artifact("stability.csv")],
        metrics: json!({
            "delta": p.delta(),
            "verdict": report.verdict.as_str(),
            "abscissa_min": abscissae.iter().copied().fold(f64::INFINITY, f64::min),
            "abscissa_max": abscissae.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "rh_checked": checked,
            "rh_disagreements": disagreements,
            "rh_band": DEFAULT_MARGINAL_TOL,
        }),
        failure,
    })
}

/// Random `(τ, c, b, ζ)` draws; counts draws outside the marginal band where
/// the sign test on the Hurwitz minors disagrees with the root abscissa.
fn routh_hurwitz_self_check(seed: u64, draws: usize) -> Result<(usize, usize), LabError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checked, mut bad) = (0, 0);
    for _ in 0..draws {
        let tau = rng.random_range(1e-3..=1.0);
        let c = rng.random_range(0.5..=4.0);
        let b = rng.random_range(0.0..=5.0);
        let zeta = 100.0 * (1.0 - rng.random::<f64>());
        let p = PhysicalParams::new(tau, c, b, 0.0)?;
        let m = analyze_mode(&p, zeta, DEFAULT_MARGINAL_TOL)?;
        if m.abscissa.abs() <= DEFAULT_MARGINAL_TOL {
            continue;
        }
        checked += 1;
        let hurwitz_stable = hurwitz_minors(&p, zeta)?.iter().all(|&x| x > 0.0);
        if hurwitz_stable != (m.abscissa < 0.0) {
            bad += 1;
        }
    }
    Ok((checked, bad))
}

fn trajectory_csv(tr: &Trajectory) -> Csv {
    let mut csv = Csv::new(&["t", "mode_index", "u", "ut", "utt"]);
    for s in &tr.states {
        for j in 0..s.len() {
            csv.row([num(s.t), (j + 1).to_string(), num(s.u[j]), num(s.ut[j]), num(s.utt[j])]);
        }
    }
    csv
}

fn harmonics_csv(field: &HarmonicField) -> Csv {
    let mut csv = Csv::new(&["m", "mode_index", "abs_u", "arg_u"]);
    for (k, row) in field.coeffs.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            csv.row([(k + 1).to_string(), (j + 1).to_string(), num(c.norm()), num(c.arg())]);
        }
    }
    csv
}

fn simulate(cfg: &RunConfig) -> Result<RunOutcome, LabError> {
    let p = cfg.params();
    let basis = cfg.basis_spec().build()?;
    let f = forcing(cfg, basis.len())?;
    let solver = cfg.solver_config()?;
    let tr = simulate_ivp(&p, &basis, &initial_data(cfg, &basis), &f, &solver)?;

    let trace = EnergyTrace::from_trajectory(&p, &basis, &tr)?;
    let mut norms = Csv::new(&["t", "linf_u", "h1_u", "h2_u", "h1_ut", "h2_ut", "h1_utt", "energy"]);
    for (s, linf) in tr.states.iter().zip(&tr.linf) {
        let n = modal_norms(s, &basis)?;
        let e = energy(&p, &basis, s)?;
        norms.row([
            num(s.t),
            num(*linf),
            num(n.h1_u),
            num(n.h2_u),
            num(n.h1_ut),
            num(n.h2_ut),
            num(n.h1_utt),
            num(e.total),
        ]);
    }
    let mut en = Csv::new(&["t", "energy", "comp1", "comp2", "comp3", "comp4", "linf"]);
    for k in 0..trace.len() {
        let c = trace.components[k];
        en.row([
            num(trace.times[k]),
            num(trace.energy[k]),
            num(c[0]),
            num(c[1]),
            num(c[2]),
            num(c[3]),
            num(trace.linf[k]),
        ]);
    }
    let mut artifacts = vec![
        trajectory_csv(&tr).into_artifact("trajectory.csv"),
        norms.into_artifact("norms.csv"),
        en.into_artifact("energy.csv"),
    ];

    let times = tr.times();
    let t_final = tr.last().t;
    let blowup = detect_blowup(&times, &tr.linf, tr.threshold)?;
    let mut metrics = json!({
        "termination": tr.termination.as_str(),
        "t_final": t_final,
        "samples": tr.states.len(),
        "energy_initial": trace.energy[0],
        "energy_final": trace.energy[trace.len() - 1],
        "energy_max": trace.max_energy(),
        "linf_max": tr.linf.iter().copied().fold(0.0, f64::max),
        "sup_ratio": sup_ratio(&tr),
        "blowup_threshold": tr.threshold,
        "blowup": blowup.map(|ev| json!({"t_detect": ev.t_detect, "growth_exponent": ev.growth_exponent})),
        "decay_rate": Value::Null,
        "identity_residual_max": Value::Null,
        "wave_z_residual_max": Value::Null,
        "memory_z_residual_max": Value::Null,
    });

    if tr.is_completed() && tr.states.len() >= 3 {
        if let Ok(fit) = fit_decay_rate(&trace, (0.5 * t_final, t_final)) {
            metrics["decay_rate"] = json!(fit.rate);
        }
        if p.tau() > 0.0 {
            let w = EnergyWeights::default_for(&p, &basis);
            let id = energy_identity_residual(&p, &basis, &tr, &f, &w)?;
            let mut csv = Csv::new(&["t", "enid_residual"]);
            for (t, r) in id.times.iter().zip(&id.residual) {
                csv.row([num(*t), num(*r)]);
            }
            artifacts.push(csv.into_artifact("identity.csv"));
            metrics["identity_residual_max"] = json!(id.max());
            metrics["wave_z_residual_max"] = json!(wave_z_residual(&p, &basis, &tr, &f)?.max());
            metrics["memory_z_residual_max"] = json!(memory_z_residual(&p, &basis, &tr, &f)?.max());
        }
    }

    let failure = match &tr.termination {
        Termination::StepFailure { t, reason } => Some(format!("step failure at t = {t}: {reason}")),
        _ => None,
    };
    Ok(RunOutcome {
        artifacts,
        metrics,
        failure,
    })
}

fn sup_ratio(tr: &Trajectory) -> Value {
    let l0 = tr.linf[0];
    if l0 > 0.0 {
        json!(tr.linf.iter().copied().fold(0.0, f64::max) / l0)
    } else {
        Value::Null
    }
}

fn periodic(cfg: &RunConfig) -> Result<RunOutcome, LabError> {
    let p = cfg.params();
    let basis = cfg.basis_spec().build()?;
    let f = forcing(cfg, basis.len())?;
    let solver = cfg.solver_config()?;
    let o = &cfg.options;
    let popts = PeriodicOptions {
        steady_tol: o.steady_tol,
        max_periods: o.max_periods,
    };
    let fopts = FixedPointOptions {
        harmonics: o.harmonics,
        tol: o.fp_tol,
        relaxation: o.relaxation,
        max_iter: o.max_iter,
    };
    let cv = cross_validate_periodic(&p, &basis, &f, &solver, &popts, &fopts)?;

    let mut iters = Csv::new(&["iter", "residual"]);
    for (k, r) in cv.fixed_point.history.iter().enumerate() {
        iters.row([(k + 1).to_string(), num(*r)]);
    }
    let artifacts = vec![
        harmonics_csv(&cv.frequency_domain).into_artifact("harmonics.csv"),
        harmonics_csv(&cv.time_domain).into_artifact("harmonics_time.csv"),
        iters.into_artifact("iterations.csv"),
        trajectory_csv(&cv.periodic.trajectory).into_artifact("period.csv"),
    ];
    let h1: Vec<f64> = (1..=cv.frequency_domain.harmonics())
        .map(|m| cv.frequency_domain.h1_norm(&basis, m))
        .collect();
    Ok(RunOutcome {
        artifacts,
        metrics: json!({
            "period": cv.periodic.period,
            "dt": cv.periodic.dt,
            "periods": cv.periodic.periods,
            "steady_defect": cv.periodic.defect,
            "fixed_point_iterations": cv.fixed_point.iterations,
            "fixed_point_residual": cv.fixed_point.residual,
            "relaxation": cv.fixed_point.relaxation,
            "harmonic_h1": h1,
            "rel_errors": cv.rel_errors,
        }),
        failure: None,
    })
}

fn blowup_row(csv: &mut Csv, phase: &str, r: &BlowupRow) {
    csv.row([
        phase.to_string(),
        num(r.amplitude),
        opt(r.t_detect),
        opt(r.growth_exponent),
        r.termination.to_string(),
    ]);
}

fn blowup(cfg: &RunConfig) -> Result<RunOutcome, LabError> {
    let p = cfg.params();
    let basis = cfg.basis_spec().build()?;
    let f = forcing(cfg, basis.len())?;
    let solver = cfg.solver_config()?;
    let o = &cfg.options;
    let opts = BlowupOptions {
        a_min: o.a_min,
        a_max: o.a_max,
        scan_factor: o.scan_factor,
        ratio: o.ratio,
        profile: o.profile,
    };
    let report = run_blowup_sweep(&p, &basis, &f, &solver, &opts)?;
    let mut csv = Csv::new(&["phase", "amplitude", "t_detect", "growth_exponent", "termination"]);
    for r in &report.scan {
        blowup_row(&mut csv, "scan", r);
    }
    for r in &report.bisection {
        blowup_row(&mut csv, "bisection", r);
    }
    let failures: Vec<f64> = report
        .scan
        .iter()
        .chain(&report.bisection)
        .filter(|r| r.termination == "step-failure")
        .map(|r| r.amplitude)
        .collect();
    Ok(RunOutcome {
        artifacts: vec![csv.into_artifact("blowup.csv")],
        metrics: json!({
            "inconclusive": report.is_inconclusive(),
            "bracket": report.bracket.map(|(a, b)| vec![a, b]),
            "t_detect_decreasing": report.t_detect_decreasing(),
            "detections": report.detection_table().len(),
            "step_failures": failures,
        }),
        failure: None,
    })
}

fn tau_sweep(cfg: &RunConfig) -> Result<RunOutcome, LabError> {
    let p = cfg.params().with_tau(0.0)?;
    let basis = cfg.basis_spec().build()?;
    let f = forcing(cfg, basis.len())?;
    let solver = cfg.solver_config()?;
    let taus = match &cfg.sweep {
        Some(s) => s.values.clone(),
        None => tau_ladder(2, 10),
    };
    let data = initial_data(cfg, &basis);
    let report = run_tau_sweep(&p, &basis, &data.u0, &data.u1, &f, &solver, &taus)?;
    let mut csv = Csv::new(&["tau", "w_part", "error"]);
    for r in &report.rows {
        csv.row([num(r.tau), num(r.w_part), num(r.error)]);
    }
    let w_first = report.rows.first().map_or(0.0, |r| r.w_part);
    Ok(RunOutcome {
        artifacts: vec![csv.into_artifact("tau_sweep.csv")],
        metrics: json!({
            "reference_w_part": report.reference_w_part,
            "observed_order": report.observed_order(),
            "errors_decreasing": report.errors_decreasing(0.1),
            "w_bounded": report.rows.iter().all(|r| r.w_part <= 2.0 * w_first),
        }),
        failure: None,
    })
}
