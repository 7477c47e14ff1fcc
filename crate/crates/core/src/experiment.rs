//! End-to-end runs: every sweep cell is simulated once, evaluated over the
//! margin grid, and written out as plot-ready CSV.
//!
//! Output layout under the output directory:
//!
//! | file | columns |
//! |------|---------|
//! | `policy_table.csv` | `cell,variant,kappa,tau,p,c,gamma,d,t_star,mean_cycle,failure_fraction,ecput` |
//! | `optima.csv` | same as the policy table plus `censored_fraction` |
//! | `survival/cell_NNN_<rule>.csv` | `t,S` |
//! | `traces/cell_NNN_rep_NNNNN.csv` | `epoch,t,damage,boundary` |
//!
//! Numbers use six significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{ExperimentConfig, SweepCell};
use crate::csv::fmt_g6;
use crate::error::{Error, Result};
use crate::policy::{residual_percentile, sweep_paths, PolicyEvaluation, PolicySweep};
use crate::reliability::{empirical_survival, scenario_replacement_times, ReplacementScenario};
use crate::simulate::{simulate_paths, trace, TrajectoryOutcome};
use crate::stochastic::{derive_seed, RngStream};

pub const POLICY_HEADER: &str = "cell,variant,kappa,tau,p,c,gamma,d,t_star,mean_cycle,failure_fraction,ecput";

#[derive(Debug, Clone)]
pub struct CellResult {
    pub cell: SweepCell,
    pub seed: u64,
    pub sweep: PolicySweep,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub cells: Vec<CellResult>,
    /// Every file written, relative to the output directory.
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    /// Fixed-width optima table for the terminal.
    pub fn optima_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4}  {:<18} {:>8} {:>8} {:>6} {:>10} {:>6} {:>6} {:>8} {:>10} {:>9}",
            "cell", "variant", "kappa", "tau", "p", "c", "gamma", "d", "t_star", "ecput", "censored"
        );
        for r in &self.cells {
            for e in &r.sweep.optima {
                let _ = writeln!(
                    out,
                    "{:>4}  {:<18} {:>8} {:>8} {:>6} {:>10} {:>6} {:>6} {:>8} {:>10} {:>9}",
                    r.cell.index,
                    r.cell.scenario.variant.name(),
                    fmt_g6(r.cell.kappa),
                    fmt_g6(r.cell.tau),
                    fmt_g6(r.cell.p),
                    fmt_g6(r.cell.c),
                    fmt_g6(e.gamma),
                    fmt_g6(e.d),
                    fmt_g6(e.t_star),
                    fmt_g6(e.ecput),
                    fmt_g6(r.sweep.censored_fraction()),
                );
            }
        }
        out
    }
}

fn cell_prefix(cell: &SweepCell) -> String {
    format!(
        "{},{},{},{},{},{}",
        cell.index,
        cell.scenario.variant.name(),
        fmt_g6(cell.kappa),
        fmt_g6(cell.tau),
        fmt_g6(cell.p),
        fmt_g6(cell.c)
    )
}

fn policy_row(out: &mut String, prefix: &str, e: &PolicyEvaluation) {
    let _ = write!(
        out,
        "{prefix},{},{},{},{},{},{}",
        fmt_g6(e.gamma),
        fmt_g6(e.d),
        fmt_g6(e.t_star),
        fmt_g6(e.mean_cycle),
        fmt_g6(e.failure_fraction),
        fmt_g6(e.ecput)
    );
}

/// Simulates and evaluates one cell. The paths are recorded up to the larger
/// of the grid's top margin and the survival margin so both resolve from the
/// same replications.
fn run_cell(config: &ExperimentConfig, cell: &SweepCell) -> Result<(CellResult, Vec<TrajectoryOutcome>)> {
    let seed = derive_seed(config.master_seed, cell.index as u64);
    let cap = config.grid.d_max.max(config.survival_margin);
    log::info!("cell {} ({}): {} replications", cell.index, cell.label(), config.reps);
    let paths = simulate_paths(&cell.scenario, config.reps, seed, cap)?;
    let sweep = sweep_paths(&paths, &config.grid, &config.gammas, &config.costs, config.evaluation)?;
    let outcomes = paths
        .iter()
        .filter(|p| !p.is_censored())
        .map(|p| p.outcome(config.survival_margin))
        .collect();
    Ok((
        CellResult {
            cell: cell.clone(),
            seed,
            sweep,
        },
        outcomes,
    ))
}

fn survival_files(cell: &SweepCell, outcomes: &[TrajectoryOutcome]) -> Result<Vec<(PathBuf, Vec<u8>)>> {
    let residuals: Vec<f64> = outcomes.iter().filter_map(|o| o.residual).collect();
    let mut t_stars = Vec::new();
    for rule in ReplacementScenario::ALL {
        if let Some(g) = rule.gamma() {
            t_stars.push((g, residual_percentile(&residuals, g)?));
        }
    }
    let mut files = Vec::new();
    for rule in ReplacementScenario::ALL {
        let times = scenario_replacement_times(outcomes, rule, &t_stars)?;
        let curve = empirical_survival(&times)?;
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).expect("writing to memory");
        files.push((
            PathBuf::from("survival").join(format!("cell_{:03}_{}.csv", cell.index, rule.name())),
            buf,
        ));
    }
    Ok(files)
}

fn trace_files(config: &ExperimentConfig, result: &CellResult) -> Result<Vec<(PathBuf, Vec<u8>)>> {
    let mut files = Vec::new();
    for rep in 0..config.trace_reps.min(config.reps) {
        let points = trace(&result.cell.scenario, &RngStream::new(result.seed, rep as u64))?;
        let mut out = String::from("epoch,t,damage,boundary\n");
        for p in points {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                p.epoch,
                fmt_g6(p.t),
                fmt_g6(p.damage),
                fmt_g6(p.boundary)
            );
        }
        files.push((
            PathBuf::from("traces").join(format!("cell_{:03}_rep_{:05}.csv", result.cell.index, rep)),
            out.into_bytes(),
        ));
    }
    Ok(files)
}

/// Runs every cell and returns the results without touching the filesystem.
pub fn evaluate_experiment(config: &ExperimentConfig) -> Result<Vec<CellResult>> {
    Ok(run_all(config)?.0)
}

type Files = Vec<(PathBuf, Vec<u8>)>;

fn run_all(config: &ExperimentConfig) -> Result<(Vec<CellResult>, Files)> {
    let mut results = Vec::with_capacity(config.cells.len());
    let mut files = Vec::new();
    let mut table = format!("{POLICY_HEADER}\n");
    let mut optima = format!("{POLICY_HEADER},censored_fraction\n");

    for cell in &config.cells {
        let (result, outcomes) = run_cell(config, cell)?;
        let prefix = cell_prefix(cell);
        for e in &result.sweep.table {
            policy_row(&mut table, &prefix, e);
            table.push('\n');
        }
        for e in &result.sweep.optima {
            policy_row(&mut optima, &prefix, e);
            let _ = writeln!(optima, ",{}", fmt_g6(result.sweep.censored_fraction()));
        }
        files.extend(survival_files(cell, &outcomes)?);
        if config.emit_traces {
            files.extend(trace_files(config, &result)?);
        }
        results.push(result);
    }
    files.insert(0, (PathBuf::from("optima.csv"), optima.into_bytes()));
    files.insert(0, (PathBuf::from("policy_table.csv"), table.into_bytes()));
    Ok((results, files))
}

fn write_all(root: &Path, files: &Files, written: &mut Vec<PathBuf>) -> Result<()> {
    for (rel, bytes) in files {
        let path = root.join(rel);
        let io = |source| Error::Io {
            path: path.clone(),
            source,
        };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io)?;
        }
        written.push(path.clone());
        fs::write(&path, bytes).map_err(io)?;
    }
    Ok(())
}

/// Runs the experiment and writes its outputs under `config.output_dir`.
/// Everything is computed before the first file is written; if writing fails
/// part-way, the files already written are removed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (cells, files) = run_all(config)?;
    let root = &config.output_dir;
    let mut written = Vec::new();
    if let Err(e) = write_all(root, &files, &mut written) {
        for path in &written {
            let _ = fs::remove_file(path);
        }
        return Err(e);
    }
    Ok(ExperimentReport {
        cells,
        files: files.into_iter().map(|(rel, _)| rel).collect(),
    })
}
