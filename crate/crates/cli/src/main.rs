//! `healshock`: run a simulation sweep described by a TOML config and write
//! the policy tables, optima and survival curves as CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use healshock_core::{load_config, run_experiment, Error};

/// Simulate self-healing systems under random shocks and optimize the
/// preventive replacement margin.
#[derive(Debug, Parser)]
#[command(name = "healshock", version)]
struct Args {
    /// Experiment config (TOML).
    config: PathBuf,

    /// Override `run.seed`.
    #[arg(long)]
    seed: Option<u64>,

    /// Override `run.reps`.
    #[arg(long)]
    reps: Option<usize>,

    /// Override `run.output_dir`.
    #[arg(long, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Also write per-replication damage/boundary traces.
    #[arg(long)]
    emit_traces: bool,

    /// Only run sweep cells matching `key=value[,key=value...]`
    /// (keys: kappa, c, tau, p).
    #[arg(long, value_name = "FILTER")]
    scenario_filter: Option<String>,

    /// Worker threads; defaults to all cores.
    #[arg(long, env = "HEALSHOCK_WORKERS", value_name = "N")]
    workers: Option<usize>,

    /// Do not print the optima table.
    #[arg(long, short)]
    quiet: bool,
}

/// Exit status for invalid configuration, as opposed to a failed run.
const EXIT_CONFIG: u8 = 2;

fn run(args: Args) -> anyhow::Result<()> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
        config.source.run.seed = seed;
    }
    if let Some(reps) = args.reps {
        if reps == 0 {
            return Err(Error::Config {
                key: "reps".into(),
                reason: "must be at least 1".into(),
            }
            .into());
        }
        config.reps = reps;
        config.source.run.reps = reps;
    }
    if let Some(dir) = args.output_dir {
        config.output_dir = dir.clone();
        config.source.run.output_dir = dir;
    }
    if args.emit_traces {
        config.emit_traces = true;
        config.source.run.emit_traces = true;
    }
    if let Some(filter) = &args.scenario_filter {
        config.apply_filter(filter)?;
    }
    if let Some(n) = args.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }

    log::info!(
        "{} cell(s), {} replications each, seed {}, {} worker(s)",
        config.cells.len(),
        config.reps,
        config.master_seed,
        rayon::current_num_threads()
    );
    let report = run_experiment(&config).with_context(|| format!("running {}", args.config.display()))?;
    if !args.quiet {
        print!("{}", report.optima_table());
    }
    log::info!(
        "wrote {} file(s) to {}",
        report.files.len(),
        config.output_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let config_error = matches!(
                err.downcast_ref::<Error>(),
                Some(Error::Config { .. } | Error::Domain { .. } | Error::Io { .. })
            );
            if config_error {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
