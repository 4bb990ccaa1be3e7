use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jmgt_cli::{execute, Experiment, Invocation};

#[derive(Parser)]
#[command(name = "jmgt-lab", version, about = "Spectral experiments for the MGT and JMGT-Westervelt equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Routh-Hurwitz atlas over a grid of spatial eigenvalues.
    Stability(Common),
    /// Initial-value run with norms, energy and identity diagnostics.
    Simulate(Common),
    /// Periodic steady state, time domain against the multiharmonic fixed point.
    Periodic(Common),
    /// Amplitude scan and bisection for finite-time blow-up.
    BlowupSweep(Common),
    /// Convergence of the third-order model to Westervelt as tau -> 0.
    TauSweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory [default: experiment.output_dir, else jmgt-out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweep members [default: all cores]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::Stability(a) => (Experiment::Stability, a),
        Command::Simulate(a) => (Experiment::Simulate, a),
        Command::Periodic(a) => (Experiment::Periodic, a),
        Command::BlowupSweep(a) => (Experiment::BlowupSweep, a),
        Command::TauSweep(a) => (Experiment::TauSweep, a),
    };
    let config_text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let inv = Invocation {
        experiment,
        config_text,
        out: args.out,
        workers: args.workers.map(|w| w as usize),
    };
    match execute(&inv) {
        Ok(summary) => {
            for m in &summary.members {
                let tag = m.label.as_deref().unwrap_or(experiment.as_str());
                match &m.failure {
                    Some(f) => eprintln!("{tag}: failed: {f}"),
                    None => println!("{tag}: ok ({} files)", m.outputs.len()),
                }
            }
            println!("manifest: {}", summary.out_dir.join("manifest.json").display());
            if summary.failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
