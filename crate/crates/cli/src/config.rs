//! Flat INI run configuration.
//!
//! ```text
//! [physics]
//! tau = 0.2
//! c = 1
//! b = 0.5
//! [experiment]
//! kind = stability
//! zeta_max = 50
//! ```
//!
//! Sections are `physics`, `basis`, `solver`, `forcing`, `experiment` and
//! `sweep`. Lists are comma separated, optionally bracketed. Numbers accept
//! `pi` and `<x>pi`. `#` and `;` start comment lines.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use jmgt_core::experiments::DataProfile;
use jmgt_core::{BasisKind, BasisSpec, LabError, PhysicalParams, Scheme, SolverConfig};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{key}: {message}")]
pub struct ConfigError {
    /// Dotted key path, e.g. `physics.tau`, or `line N` for syntax errors.
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Stability,
    Simulate,
    Periodic,
    BlowupSweep,
    TauSweep,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Stability,
        Experiment::Simulate,
        Experiment::Periodic,
        Experiment::BlowupSweep,
        Experiment::TauSweep,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Stability => "stability",
            Experiment::Simulate => "simulate",
            Experiment::Periodic => "periodic",
            Experiment::BlowupSweep => "blowup-sweep",
            Experiment::TauSweep => "tau-sweep",
        }
    }

    fn is_time_domain(&self) -> bool {
        !matches!(self, Experiment::Stability)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| ConfigError::new("experiment.kind", format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physics {
    pub tau: f64,
    pub c: f64,
    pub b: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub kind: BasisKind,
    pub lengths: Vec<f64>,
    pub modes: Vec<usize>,
    pub include_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solver {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub scheme: Scheme,
    pub dealias: bool,
    pub blowup_threshold: Option<f64>,
    pub sample_every: usize,
    pub degeneracy_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingKind {
    None,
    ModalHarmonic,
}

impl ForcingKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ForcingKind::None => "none",
            ForcingKind::ModalHarmonic => "modal-harmonic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forcing {
    pub kind: ForcingKind,
    pub omega: Option<f64>,
    /// Modal amplitudes of `r̂_1`; missing trailing modes are zero.
    pub amplitude: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    pub seed: u64,
    pub output_dir: Option<String>,
    pub zeta_max: Option<f64>,
    pub zeta_samples: usize,
    pub rh_checks: usize,
    pub u0: Option<Vec<f64>>,
    pub u1: Option<Vec<f64>>,
    pub u2: Option<Vec<f64>>,
    pub amplitude: Option<f64>,
    pub profile: DataProfile,
    pub harmonics: usize,
    pub steady_tol: f64,
    pub max_periods: usize,
    pub fp_tol: f64,
    pub relaxation: f64,
    pub max_iter: usize,
    pub a_min: f64,
    pub a_max: f64,
    pub scan_factor: f64,
    pub ratio: f64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: None,
            zeta_max: None,
            zeta_samples: 100,
            rh_checks: 1000,
            u0: None,
            u1: None,
            u2: None,
            amplitude: None,
            profile: DataProfile::Aligned,
            harmonics: 8,
            steady_tol: 1e-8,
            max_periods: 400,
            fp_tol: 1e-10,
            relaxation: 0.5,
            max_iter: 500,
            a_min: 0.125,
            a_max: 32.0,
            scan_factor: 2.0,
            ratio: 1.1,
        }
    }
}

/// Parameters a sweep may vary.
pub const SWEEPABLE: [&str; 8] = [
    "physics.tau",
    "physics.c",
    "physics.b",
    "physics.eta",
    "solver.dt",
    "solver.t_end",
    "forcing.omega",
    "experiment.amplitude",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// One of [`SWEEPABLE`].
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub physics: Physics,
    pub basis: Basis,
    pub solver: Solver,
    pub forcing: Forcing,
    pub options: ExperimentOptions,
    pub sweep: Option<Sweep>,
}

const SECTIONS: [&str; 6] = ["physics", "basis", "solver", "forcing", "experiment", "sweep"];

const KEYS: [&str; 41] = [
    "physics.tau",
    "physics.c",
    "physics.b",
    "physics.eta",
    "basis.kind",
    "basis.lengths",
    "basis.modes",
    "basis.include_zero",
    "solver.dt",
    "solver.t_end",
    "solver.scheme",
    "solver.dealias",
    "solver.blowup_threshold",
    "solver.sample_every",
    "solver.degeneracy_margin",
    "forcing.kind",
    "forcing.omega",
    "forcing.amplitude",
    "experiment.kind",
    "experiment.seed",
    "experiment.output_dir",
    "experiment.zeta_max",
    "experiment.zeta_samples",
    "experiment.rh_checks",
    "experiment.u0",
    "experiment.u1",
    "experiment.u2",
    "experiment.amplitude",
    "experiment.profile",
    "experiment.harmonics",
    "experiment.steady_tol",
    "experiment.max_periods",
    "experiment.fp_tol",
    "experiment.relaxation",
    "experiment.max_iter",
    "experiment.a_min",
    "experiment.a_max",
    "experiment.scan_factor",
    "experiment.ratio",
    "sweep.parameter",
    "sweep.values",
];

/// Raw `section.key -> value` table in file order of sections.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ini {
    pub entries: BTreeMap<String, String>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let at = || format!("line {}", i + 1);
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::new(at(), "unterminated section header"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(ConfigError::new(name, "unknown section"));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(at(), "expected `key = value`"))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| ConfigError::new(at(), "key outside of any section"))?;
            let path = format!("{sec}.{}", key.trim());
            if !KEYS.contains(&path.as_str()) {
                return Err(ConfigError::new(path, "unknown key"));
            }
            if entries.insert(path.clone(), value.trim().to_string()).is_some() {
                return Err(ConfigError::new(path, "duplicate key"));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), value);
    }

    /// Renders sections in canonical order, keys in canonical order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for sec in SECTIONS {
            let keys: Vec<&str> = KEYS
                .iter()
                .copied()
                .filter(|k| k.split_once('.').map(|(s, _)| s) == Some(sec) && self.entries.contains_key(*k))
                .collect();
            if keys.is_empty() {
                continue;
            }
            if !out.is_empty() {
                out.push('\n');
            }
            let _ = writeln!(out, "[{sec}]");
            for k in keys {
                let _ = writeln!(out, "{} = {}", &k[sec.len() + 1..], self.entries[k]);
            }
        }
        out
    }
}

fn parse_number(key: &str, s: &str) -> Result<f64> {
    let t = s.trim();
    let v = if t == "pi" {
        Some(PI)
    } else if let Some(m) = t.strip_suffix("pi") {
        m.trim_end_matches('*').trim().parse::<f64>().ok().map(|x| x * PI)
    } else {
        t.parse::<f64>().ok()
    };
    match v {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(ConfigError::new(key, format!("expected a finite number, got `{t}`"))),
    }
}

fn parse_uint(key: &str, s: &str) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| ConfigError::new(key, format!("expected a non-negative integer, got `{}`", s.trim())))
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(ConfigError::new(key, format!("expected true or false, got `{other}`"))),
    }
}

fn split_list(s: &str) -> Vec<&str> {
    let t = s.trim();
    let t = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(t);
    if t.trim().is_empty() {
        return Vec::new();
    }
    t.split(',').map(str::trim).collect()
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    split_list(s).into_iter().map(|x| parse_number(key, x)).collect()
}

fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_list<T: fmt::Debug>(v: &[T]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

fn lab(key: &str, e: LabError) -> ConfigError {
    let message = match e {
        LabError::InvalidParameter { reason, .. } => reason,
        other => other.to_string(),
    };
    ConfigError::new(key, message)
}

struct Reader<'a> {
    ini: &'a Ini,
}

impl Reader<'_> {
    fn num(&self, key: &str) -> Result<Option<f64>> {
        self.ini.get(key).map(|s| parse_number(key, s)).transpose()
    }

    fn num_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.num(key)?.unwrap_or(default))
    }

    fn required(&self, key: &str, why: &str) -> Result<f64> {
        self.num(key)?
            .ok_or_else(|| ConfigError::new(key, format!("missing required key ({why})")))
    }

    fn uint_or(&self, key: &str, default: u64) -> Result<u64> {
        Ok(self.ini.get(key).map(|s| parse_uint(key, s)).transpose()?.unwrap_or(default))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.uint_or(key, default as u64)? as usize)
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        Ok(self.ini.get(key).map(|s| parse_bool(key, s)).transpose()?.unwrap_or(default))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.ini.get(key).map(|s| parse_list(key, s)).transpose()
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.num_or(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(ConfigError::new(key, format!("must be > 0, got {v}")))
        }
    }
}

impl RunConfig {
    /// Parses and validates. `subcommand`, when given, fixes the experiment
    /// kind; a conflicting `experiment.kind` is an error.
    pub fn parse(text: &str, subcommand: Option<Experiment>) -> Result<Self> {
        Self::from_ini(&Ini::parse(text)?, subcommand)
    }

    pub fn from_ini(ini: &Ini, subcommand: Option<Experiment>) -> Result<Self> {
        let r = Reader { ini };
        let declared = ini.get("experiment.kind").map(Experiment::from_str).transpose()?;
        let experiment = match (declared, subcommand) {
            (Some(d), Some(s)) if d != s => {
                return Err(ConfigError::new(
                    "experiment.kind",
                    format!("config declares `{d}` but the subcommand is `{s}`"),
                ))
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(ConfigError::new("experiment.kind", "missing required key")),
        };

        let tau = if experiment == Experiment::TauSweep {
            r.num_or("physics.tau", 0.0)?
        } else {
            r.required("physics.tau", "relaxation time")?
        };
        let physics = Physics {
            tau,
            c: r.required("physics.c", "sound speed")?,
            b: r.required("physics.b", "diffusivity")?,
            eta: r.num_or("physics.eta", 0.0)?,
        };
        check_physics(&physics)?;

        let kind = match ini.get("basis.kind") {
            Some(s) => BasisKind::from_str(s).map_err(|e| lab("basis.kind", e))?,
            None => BasisKind::DirichletInterval,
        };
        let lengths = r.list("basis.lengths")?.unwrap_or_else(|| vec![PI]);
        let modes = match ini.get("basis.modes") {
            Some(s) => split_list(s)
                .into_iter()
                .map(|x| parse_uint("basis.modes", x).map(|v| v as usize))
                .collect::<Result<Vec<_>>>()?,
            None => vec![8],
        };
        let basis = Basis {
            kind,
            lengths,
            modes,
            include_zero: r.bool_or("basis.include_zero", false)?,
        };
        check_basis(&basis)?;
        build_basis(&basis)?;

        let solver = Solver {
            dt: r.num("solver.dt")?,
            t_end: r.num("solver.t_end")?,
            scheme: match ini.get("solver.scheme") {
                Some(s) => Scheme::from_str(s).map_err(|e| lab("solver.scheme", e))?,
                None => Scheme::ExponentialImex,
            },
            dealias: r.bool_or("solver.dealias", true)?,
            blowup_threshold: r.num("solver.blowup_threshold")?,
            sample_every: r.usize_or("solver.sample_every", 1)?,
            degeneracy_margin: r.num_or("solver.degeneracy_margin", jmgt_core::timedomain::DEFAULT_DEGENERACY_MARGIN)?,
        };
        if experiment.is_time_domain() {
            r.required("solver.dt", "time step")?;
            r.required("solver.t_end", "final time")?;
        }
        check_solver(&solver)?;

        let fkind = match ini.get("forcing.kind") {
            None | Some("none") => ForcingKind::None,
            Some("modal-harmonic") => ForcingKind::ModalHarmonic,
            Some(other) => return Err(ConfigError::new("forcing.kind", format!("unknown forcing `{other}`"))),
        };
        let forcing = Forcing {
            kind: fkind,
            omega: r.num("forcing.omega")?,
            amplitude: r.list("forcing.amplitude")?.unwrap_or_default(),
        };
        check_forcing(&forcing, &basis, experiment)?;

        let d = ExperimentOptions::default();
        let options = ExperimentOptions {
            seed: r.uint_or("experiment.seed", d.seed)?,
            output_dir: ini.get("experiment.output_dir").map(str::to_string),
            zeta_max: r.num("experiment.zeta_max")?,
            zeta_samples: r.usize_or("experiment.zeta_samples", d.zeta_samples)?,
            rh_checks: r.usize_or("experiment.rh_checks", d.rh_checks)?,
            u0: r.list("experiment.u0")?,
            u1: r.list("experiment.u1")?,
            u2: r.list("experiment.u2")?,
            amplitude: r.num("experiment.amplitude")?,
            profile: match ini.get("experiment.profile") {
                Some(s) => DataProfile::from_str(s).map_err(|e| lab("experiment.profile", e))?,
                None => d.profile,
            },
            harmonics: r.usize_or("experiment.harmonics", d.harmonics)?,
            steady_tol: r.positive("experiment.steady_tol", d.steady_tol)?,
            max_periods: r.usize_or("experiment.max_periods", d.max_periods)?,
            fp_tol: r.positive("experiment.fp_tol", d.fp_tol)?,
            relaxation: r.positive("experiment.relaxation", d.relaxation)?,
            max_iter: r.usize_or("experiment.max_iter", d.max_iter)?,
            a_min: r.positive("experiment.a_min", d.a_min)?,
            a_max: r.positive("experiment.a_max", d.a_max)?,
            scan_factor: r.positive("experiment.scan_factor", d.scan_factor)?,
            ratio: r.positive("experiment.ratio", d.ratio)?,
        };
        check_options(&options, &basis, experiment)?;

        let sweep = match (ini.get("sweep.parameter"), ini.get("sweep.values")) {
            (None, None) => None,
            (Some(_), None) => return Err(ConfigError::new("sweep.values", "missing required key")),
            (None, Some(_)) => return Err(ConfigError::new("sweep.parameter", "missing required key")),
            (Some(p), Some(v)) => {
                let parameter = normalize_parameter(p)?;
                let values = parse_list("sweep.values", v)?;
                if values.is_empty() {
                    return Err(ConfigError::new("sweep.values", "empty value list"));
                }
                Some(Sweep { parameter, values })
            }
        };
        if experiment == Experiment::TauSweep {
            if let Some(s) = &sweep {
                if s.parameter != "physics.tau" {
                    return Err(ConfigError::new(
                        "sweep.parameter",
                        format!("tau-sweep varies physics.tau, got `{}`", s.parameter),
                    ));
                }
                if s.values.iter().any(|&t| t <= 0.0) {
                    return Err(ConfigError::new("sweep.values", "tau ladder values must be > 0"));
                }
            }
        }

        let cfg = RunConfig {
            experiment,
            physics,
            basis,
            solver,
            forcing,
            options,
            sweep,
        };
        for member in cfg.expand()? {
            member.check_member()?;
        }
        Ok(cfg)
    }

    pub fn to_ini(&self) -> Ini {
        let mut ini = Ini::default();
        let p = &self.physics;
        ini.set("physics.tau", fmt_num(p.tau));
        ini.set("physics.c", fmt_num(p.c));
        ini.set("physics.b", fmt_num(p.b));
        ini.set("physics.eta", fmt_num(p.eta));
        let b = &self.basis;
        ini.set("basis.kind", b.kind.as_str().to_string());
        ini.set("basis.lengths", fmt_list(&b.lengths));
        ini.set("basis.modes", fmt_list(&b.modes));
        ini.set("basis.include_zero", b.include_zero.to_string());
        let s = &self.solver;
        if let Some(dt) = s.dt {
            ini.set("solver.dt", fmt_num(dt));
        }
        if let Some(t) = s.t_end {
            ini.set("solver.t_end", fmt_num(t));
        }
        ini.set("solver.scheme", s.scheme.as_str().to_string());
        ini.set("solver.dealias", s.dealias.to_string());
        if let Some(th) = s.blowup_threshold {
            ini.set("solver.blowup_threshold", fmt_num(th));
        }
        ini.set("solver.sample_every", s.sample_every.to_string());
        ini.set("solver.degeneracy_margin", fmt_num(s.degeneracy_margin));
        let f = &self.forcing;
        ini.set("forcing.kind", f.kind.as_str().to_string());
        if let Some(w) = f.omega {
            ini.set("forcing.omega", fmt_num(w));
        }
        if !f.amplitude.is_empty() {
            ini.set("forcing.amplitude", fmt_list(&f.amplitude));
        }
        let o = &self.options;
        ini.set("experiment.kind", self.experiment.as_str().to_string());
        ini.set("experiment.seed", o.seed.to_string());
        if let Some(d) = &o.output_dir {
            ini.set("experiment.output_dir", d.clone());
        }
        if let Some(z) = o.zeta_max {
            ini.set("experiment.zeta_max", fmt_num(z));
        }
        ini.set("experiment.zeta_samples", o.zeta_samples.to_string());
        ini.set("experiment.rh_checks", o.rh_checks.to_string());
        for (k, v) in [("experiment.u0", &o.u0), ("experiment.u1", &o.u1), ("experiment.u2", &o.u2)] {
            if let Some(v) = v {
                ini.set(k, format!("[{}]", fmt_list(v)));
            }
        }
        if let Some(a) = o.amplitude {
            ini.set("experiment.amplitude", fmt_num(a));
        }
        ini.set("experiment.profile", o.profile.as_str().to_string());
        ini.set("experiment.harmonics", o.harmonics.to_string());
        ini.set("experiment.steady_tol", fmt_num(o.steady_tol));
        ini.set("experiment.max_periods", o.max_periods.to_string());
        ini.set("experiment.fp_tol", fmt_num(o.fp_tol));
        ini.set("experiment.relaxation", fmt_num(o.relaxation));
        ini.set("experiment.max_iter", o.max_iter.to_string());
        ini.set("experiment.a_min", fmt_num(o.a_min));
        ini.set("experiment.a_max", fmt_num(o.a_max));
        ini.set("experiment.scan_factor", fmt_num(o.scan_factor));
        ini.set("experiment.ratio", fmt_num(o.ratio));
        if let Some(sw) = &self.sweep {
            ini.set("sweep.parameter", sw.parameter.clone());
            ini.set("sweep.values", fmt_list(&sw.values));
        }
        ini
    }

    /// Canonical text with every default resolved.
    pub fn render(&self) -> String {
        self.to_ini().render()
    }

    /// One config per sweep value (a single member without a sweep). The
    /// tau-sweep experiment consumes its sweep itself and is not expanded.
    pub fn expand(&self) -> Result<Vec<RunConfig>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![self.clone()]);
        };
        if self.experiment == Experiment::TauSweep {
            return Ok(vec![self.clone()]);
        }
        sweep
            .values
            .iter()
            .map(|&v| {
                let mut c = self.clone();
                c.sweep = None;
                match sweep.parameter.as_str() {
                    "physics.tau" => c.physics.tau = v,
                    "physics.c" => c.physics.c = v,
                    "physics.b" => c.physics.b = v,
                    "physics.eta" => c.physics.eta = v,
                    "solver.dt" => c.solver.dt = Some(v),
                    "solver.t_end" => c.solver.t_end = Some(v),
                    "forcing.omega" => c.forcing.omega = Some(v),
                    "experiment.amplitude" => c.options.amplitude = Some(v),
                    other => return Err(ConfigError::new("sweep.parameter", format!("not sweepable: `{other}`"))),
                }
                Ok(c)
            })
            .collect()
    }

    fn check_member(&self) -> Result<()> {
        check_physics(&self.physics)?;
        check_solver(&self.solver)?;
        check_forcing(&self.forcing, &self.basis, self.experiment)?;
        Ok(())
    }

    pub fn params(&self) -> PhysicalParams {
        let p = &self.physics;
        PhysicalParams::new(p.tau, p.c, p.b, p.eta).expect("validated")
    }

    pub fn basis_spec(&self) -> BasisSpec {
        BasisSpec::new(self.basis.kind, self.basis.lengths.clone(), self.basis.modes.clone())
            .with_zero_mode(self.basis.include_zero)
            .with_dealias(self.solver.dealias)
    }

    pub fn solver_config(&self) -> std::result::Result<SolverConfig, LabError> {
        let s = &self.solver;
        let mut cfg = SolverConfig::new(s.dt.unwrap_or(f64::NAN), s.t_end.unwrap_or(f64::NAN))?
            .with_scheme(s.scheme)
            .with_sample_every(s.sample_every);
        if let Some(th) = s.blowup_threshold {
            cfg = cfg.with_blowup_threshold(th);
        }
        cfg.degeneracy_margin = s.degeneracy_margin;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn normalize_parameter(p: &str) -> Result<String> {
    let p = p.trim();
    let full = if p.contains('.') {
        p.to_string()
    } else {
        match SWEEPABLE.iter().find(|k| k.split_once('.').map(|(_, n)| n) == Some(p)) {
            Some(k) => k.to_string(),
            None => p.to_string(),
        }
    };
    if SWEEPABLE.contains(&full.as_str()) {
        Ok(full)
    } else {
        Err(ConfigError::new(
            "sweep.parameter",
            format!("`{p}` is not a sweepable parameter (one of {})", SWEEPABLE.join(", ")),
        ))
    }
}

fn check_physics(p: &Physics) -> Result<()> {
    PhysicalParams::new(p.tau, p.c, p.b, p.eta).map_err(|e| match e {
        LabError::InvalidParameter { name, reason } => ConfigError::new(format!("physics.{name}"), reason),
        other => ConfigError::new("physics", other.to_string()),
    })?;
    Ok(())
}

fn check_basis(b: &Basis) -> Result<()> {
    if b.lengths.len() != b.modes.len() {
        return Err(ConfigError::new(
            "basis.modes",
            format!("{} lengths but {} mode counts", b.lengths.len(), b.modes.len()),
        ));
    }
    if b.kind == BasisKind::DirichletInterval && b.lengths.len() != 1 {
        return Err(ConfigError::new("basis.lengths", "dirichlet-interval takes exactly one length"));
    }
    if b.lengths.iter().any(|&l| !(l > 0.0)) {
        return Err(ConfigError::new("basis.lengths", "lengths must be > 0"));
    }
    if b.kind != BasisKind::Torus && b.modes.contains(&0) {
        return Err(ConfigError::new("basis.modes", "at least one mode per axis"));
    }
    if b.include_zero && b.kind != BasisKind::Torus {
        return Err(ConfigError::new("basis.include_zero", "only meaningful for torus bases"));
    }
    Ok(())
}

fn check_solver(s: &Solver) -> Result<()> {
    if let Some(dt) = s.dt {
        if !(dt > 0.0) {
            return Err(ConfigError::new("solver.dt", format!("must be > 0, got {dt}")));
        }
        if let Some(t) = s.t_end {
            if !(t >= dt) {
                return Err(ConfigError::new("solver.t_end", format!("must be >= dt, got {t}")));
            }
        }
    }
    if let Some(th) = s.blowup_threshold {
        if !(th > 0.0) {
            return Err(ConfigError::new("solver.blowup_threshold", format!("must be > 0, got {th}")));
        }
    }
    if s.sample_every == 0 {
        return Err(ConfigError::new("solver.sample_every", "must be >= 1"));
    }
    if !(s.degeneracy_margin > 0.0) {
        return Err(ConfigError::new("solver.degeneracy_margin", "must be > 0"));
    }
    Ok(())
}

fn basis_len(b: &Basis) -> usize {
    match b.kind {
        BasisKind::Torus => {
            let full: usize = b.modes.iter().map(|&k| 2 * k + 1).product();
            full - usize::from(!b.include_zero)
        }
        _ => b.modes.iter().product(),
    }
}

fn build_basis(b: &Basis) -> Result<()> {
    BasisSpec::new(b.kind, b.lengths.clone(), b.modes.clone())
        .with_zero_mode(b.include_zero)
        .build()
        .map(|_| ())
        .map_err(|e| ConfigError::new("basis", e.to_string()))
}

fn check_forcing(f: &Forcing, b: &Basis, experiment: Experiment) -> Result<()> {
    match f.kind {
        ForcingKind::None => {
            if experiment == Experiment::Periodic {
                return Err(ConfigError::new("forcing.kind", "periodic runs need `modal-harmonic` forcing"));
            }
        }
        ForcingKind::ModalHarmonic => {
            let w = f
                .omega
                .ok_or_else(|| ConfigError::new("forcing.omega", "missing required key (modal-harmonic forcing)"))?;
            if !(w > 0.0) {
                return Err(ConfigError::new("forcing.omega", format!("must be > 0, got {w}")));
            }
            if f.amplitude.is_empty() {
                return Err(ConfigError::new("forcing.amplitude", "missing required key (modal-harmonic forcing)"));
            }
            if f.amplitude.len() > basis_len(b) {
                return Err(ConfigError::new(
                    "forcing.amplitude",
                    format!("{} amplitudes for {} modes", f.amplitude.len(), basis_len(b)),
                ));
            }
        }
    }
    Ok(())
}

fn check_options(o: &ExperimentOptions, b: &Basis, experiment: Experiment) -> Result<()> {
    let n = basis_len(b);
    for (key, v) in [("experiment.u0", &o.u0), ("experiment.u1", &o.u1), ("experiment.u2", &o.u2)] {
        if let Some(v) = v {
            if v.len() > n {
                return Err(ConfigError::new(key, format!("{} coefficients for {n} modes", v.len())));
            }
        }
    }
    match experiment {
        Experiment::Stability => {
            let z = o
                .zeta_max
                .ok_or_else(|| ConfigError::new("experiment.zeta_max", "missing required key (stability atlas)"))?;
            if !(z > 0.0) {
                return Err(ConfigError::new("experiment.zeta_max", format!("must be > 0, got {z}")));
            }
            if o.zeta_samples == 0 {
                return Err(ConfigError::new("experiment.zeta_samples", "must be >= 1"));
            }
        }
        Experiment::Simulate | Experiment::TauSweep => {
            if o.u0.is_none() && o.amplitude.is_none() {
                return Err(ConfigError::new(
                    "experiment.u0",
                    "missing required key (give u0 or amplitude)",
                ));
            }
        }
        Experiment::Periodic => {
            if o.harmonics == 0 {
                return Err(ConfigError::new("experiment.harmonics", "must be >= 1"));
            }
            if !(o.relaxation <= 1.0) {
                return Err(ConfigError::new("experiment.relaxation", "must lie in (0, 1]"));
            }
        }
        Experiment::BlowupSweep => {
            if o.a_max < o.a_min {
                return Err(ConfigError::new("experiment.a_max", "must be >= a_min"));
            }
            if !(o.scan_factor > 1.0) {
                return Err(ConfigError::new("experiment.scan_factor", "must be > 1"));
            }
            if !(o.ratio > 1.0) {
                return Err(ConfigError::new("experiment.ratio", "must be > 1"));
            }
        }
    }
    Ok(())
}
