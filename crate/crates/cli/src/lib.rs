//! Batch driver for the spectral laboratory: reads an INI config, runs one
//! experiment (or a sweep of them) and writes CSV tables plus a JSON
//! manifest into an output directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod runs;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{ConfigError, Experiment, RunConfig};
use output::{write_artifact, Artifact, Written};

pub const DEFAULT_OUT_DIR: &str = "jmgt-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Pool(String),
}

impl CliError {
    /// 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub experiment: Experiment,
    pub config_text: String,
    /// Overrides `experiment.output_dir`.
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct MemberReport {
    pub label: Option<String>,
    pub failure: Option<String>,
    pub outputs: Vec<Written>,
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub out_dir: PathBuf,
    pub members: Vec<MemberReport>,
    pub manifest: Value,
}

impl Summary {
    pub fn failed(&self) -> bool {
        self.members.iter().any(|m| m.failure.is_some())
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn execute(inv: &Invocation) -> Result<Summary, CliError> {
    let started = Instant::now();
    let cfg = RunConfig::parse(&inv.config_text, Some(inv.experiment))?;
    let members = cfg.expand()?;
    let out_dir = inv
        .out
        .clone()
        .or_else(|| cfg.options.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = inv.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| CliError::Pool(e.to_string()))?;
    let outcomes: Vec<(runs::RunOutcome, f64)> = pool.install(|| {
        members
            .par_iter()
            .map(|m| {
                let t0 = Instant::now();
                let o = runs::run(m);
                (o, t0.elapsed().as_secs_f64())
            })
            .collect()
    });

    std::fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
    let resolved = cfg.render();
    let config_record = write_artifact(
        &out_dir,
        None,
        &Artifact {
            name: "config.ini".into(),
            bytes: resolved.clone().into_bytes(),
        },
    )
    .map_err(io_err(&out_dir))?;

    let swept = cfg.sweep.is_some() && cfg.experiment != Experiment::TauSweep;
    let mut reports = Vec::with_capacity(members.len());
    let mut run_records = Vec::with_capacity(members.len());
    for (k, (outcome, elapsed)) in outcomes.into_iter().enumerate() {
        let label = swept.then(|| format!("run_{k:03}"));
        let mut written = Vec::with_capacity(outcome.artifacts.len());
        for a in &outcome.artifacts {
            written.push(write_artifact(&out_dir, label.as_deref(), a).map_err(io_err(&out_dir))?);
        }
        let sweep = match (&cfg.sweep, swept) {
            (Some(s), true) => json!({"parameter": s.parameter, "value": s.values[k]}),
            _ => Value::Null,
        };
        run_records.push(json!({
            "label": label,
            "sweep": sweep,
            "status": if outcome.failure.is_some() { "failed" } else { "ok" },
            "error": outcome.failure,
            "metrics": outcome.metrics,
            "elapsed_s": elapsed,
            "outputs": written.iter().map(record).collect::<Vec<_>>(),
        }));
        reports.push(MemberReport {
            label,
            failure: outcome.failure,
            outputs: written,
        });
    }

    let manifest = json!({
        "tool": {"name": "jmgt-lab", "version": env!("CARGO_PKG_VERSION")},
        "subcommand": inv.experiment.as_str(),
        "seed": cfg.options.seed,
        "config": resolved,
        "config_file": record(&config_record),
        "workers": inv.workers,
        "runs": run_records,
        "elapsed_s": started.elapsed().as_secs_f64(),
    });
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest is plain JSON") + "\n";
    std::fs::write(&path, text).map_err(io_err(&path))?;

    Ok(Summary {
        out_dir,
        members: reports,
        manifest,
    })
}

fn record(w: &Written) -> Value {
    json!({"file": w.file, "sha256": w.sha256, "bytes": w.bytes})
}
