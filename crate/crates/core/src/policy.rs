//! Post-alarm survival percentiles, expected cost per unit time, and the grid
//! search for the alarm margin `d`.
//!
//! # Percentile convention
//!
//! `t*_gamma` is the lower empirical order statistic at 1-based position
//! `max(1, floor((1 - gamma) n))` of the sorted residuals, with no
//! interpolation. At least a fraction `gamma` of the residuals are `>= t*`,
//! and the ordering `t*_0.80 >= t*_0.85 >= t*_0.90` holds exactly for every
//! sample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::{map_indexed, simulate_paths, SamplePath, ScenarioConfig, TrajectoryOutcome};

/// Per-cycle and per-time costs of running and replacing the system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostParams {
    /// Installation cost per cycle.
    pub c0: f64,
    pub c_inspection: f64,
    pub c_operation: f64,
    /// Revenue per unit time (enters with a negative sign).
    pub c_revenue: f64,
    /// Surcharge when the cycle ends in failure.
    pub c_failure: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            c0: 5000.0,
            c_inspection: 50.0,
            c_operation: 100.0,
            c_revenue: 200.0,
            c_failure: 1000.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("c0", self.c0),
            ("c_inspection", self.c_inspection),
            ("c_operation", self.c_operation),
            ("c_revenue", self.c_revenue),
            ("c_failure", self.c_failure),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(name, format!("must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Net running cost per unit time.
    pub fn net_rate(&self) -> f64 {
        self.c_inspection + self.c_operation - self.c_revenue
    }

    /// Cost per unit time from the mean cycle length and failure fraction.
    pub fn ecput(&self, mean_cycle: f64, failure_fraction: f64) -> f64 {
        (self.c0 + self.net_rate() * mean_cycle + self.c_failure * failure_fraction) / mean_cycle
    }
}

/// Grid `d_min, d_min + step, ..., <= d_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub d_min: f64,
    pub d_max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            d_min: 8.0,
            d_max: 16.0,
            step: 0.1,
        }
    }
}

impl GridSpec {
    pub fn single(d: f64) -> Self {
        Self {
            d_min: d,
            d_max: d,
            step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_min > 0.0 && self.d_min.is_finite()) {
            return Err(Error::domain("d_min", format!("must be positive, got {}", self.d_min)));
        }
        if !(self.d_max >= self.d_min && self.d_max.is_finite()) {
            return Err(Error::domain("d_max", "must be finite and at least d_min"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::domain("step", format!("must be positive, got {}", self.step)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.d_max - self.d_min) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                let d = self.d_min + i as f64 * self.step;
                // keep grid values free of accumulated representation noise
                (d * 1e9).round() / 1e9
            })
            .collect()
    }
}

/// `t*_gamma`: see the module docs for the convention.
pub fn residual_percentile(residuals: &[f64], gamma: f64) -> Result<f64> {
    let mut sorted = residuals.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted_percentile(&sorted, gamma)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("gamma", format!("must lie in (0, 1), got {gamma}")))
    }
}

fn sorted_percentile(sorted: &[f64], gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if sorted.is_empty() {
        return Err(Error::InsufficientData("no residual lifetimes".into()));
    }
    let n = sorted.len();
    let pos = (((1.0 - gamma) * n as f64) + 1e-9).floor() as usize;
    Ok(sorted[pos.clamp(1, n) - 1])
}

/// Mean cycle, failure fraction and cost rate of replacing at
/// `min(T, T' + t_star)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleCost {
    pub t_star: f64,
    pub mean_cycle: f64,
    pub failure_fraction: f64,
    pub ecput: f64,
}

/// Evaluates the replacement rule over uncensored outcomes. A cycle counts as
/// a failure when `T <= T' + t_star`.
pub fn evaluate_policy(outcomes: &[TrajectoryOutcome], t_star: f64, costs: &CostParams) -> Result<CycleCost> {
    if !(t_star >= 0.0) {
        return Err(Error::domain("t_star", format!("must be non-negative, got {t_star}")));
    }
    if outcomes.is_empty() {
        return Err(Error::InsufficientData("no outcomes to evaluate".into()));
    }
    let mut cycles = 0.0;
    let mut failures = 0usize;
    for o in outcomes {
        let (Some(t), Some(alarm)) = (o.failure_time, o.alarm_time) else {
            return Err(Error::domain("outcomes", "censored outcomes must be excluded"));
        };
        let scheduled = alarm + t_star;
        cycles += t.min(scheduled);
        if t <= scheduled {
            failures += 1;
        }
    }
    let n = outcomes.len() as f64;
    let mean_cycle = cycles / n;
    let failure_fraction = failures as f64 / n;
    Ok(CycleCost {
        t_star,
        mean_cycle,
        failure_fraction,
        ecput: costs.ecput(mean_cycle, failure_fraction),
    })
}

/// One row of the policy table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyEvaluation {
    pub d: f64,
    pub gamma: f64,
    pub t_star: f64,
    pub mean_cycle: f64,
    pub failure_fraction: f64,
    pub ecput: f64,
}

impl PolicyEvaluation {
    fn new(d: f64, gamma: f64, cost: CycleCost) -> Self {
        Self {
            d,
            gamma,
            t_star: cost.t_star,
            mean_cycle: cost.mean_cycle,
            failure_fraction: cost.failure_fraction,
            ecput: cost.ecput,
        }
    }
}

/// How `t*` is estimated relative to the replications used for the cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    /// Estimate `t*` and the cost on the same replications.
    #[default]
    InSample,
    /// Estimate `t*` on even-indexed replications, evaluate on odd ones.
    SplitSample,
}

/// Full grid evaluation plus the per-gamma optimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicySweep {
    /// Ordered by gamma (as given), then by `d`.
    pub table: Vec<PolicyEvaluation>,
    pub optima: Vec<PolicyEvaluation>,
    pub reps: usize,
    pub censored: usize,
}

impl PolicySweep {
    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / self.reps as f64
    }

    pub fn optimum(&self, gamma: f64) -> Option<&PolicyEvaluation> {
        self.optima.iter().find(|e| (e.gamma - gamma).abs() < 1e-12)
    }

    /// Rows for one gamma, in grid order.
    pub fn curve(&self, gamma: f64) -> impl Iterator<Item = &PolicyEvaluation> {
        self.table.iter().filter(move |e| (e.gamma - gamma).abs() < 1e-12)
    }
}

/// Evaluates every `(d, gamma)` over already simulated paths.
pub fn sweep_paths(
    paths: &[SamplePath],
    grid: &GridSpec,
    gammas: &[f64],
    costs: &CostParams,
    mode: EvaluationMode,
) -> Result<PolicySweep> {
    grid.validate()?;
    costs.validate()?;
    if gammas.is_empty() {
        return Err(Error::domain("gammas", "at least one survival probability is required"));
    }
    for &g in gammas {
        check_gamma(g)?;
    }

    let live: Vec<(usize, &SamplePath)> = paths.iter().enumerate().filter(|(_, p)| !p.is_censored()).collect();
    let censored = paths.len() - live.len();
    if censored > 0 {
        log::warn!(
            "{censored} of {} replications censored; excluded from percentile and cost estimates",
            paths.len()
        );
    }
    if live.is_empty() {
        return Err(Error::Optimization(
            "every replication is censored; no grid point can be evaluated".into(),
        ));
    }

    let points = grid.points();
    let per_point: Vec<Result<Vec<PolicyEvaluation>>> = map_indexed(points.len(), |j| {
        let d = points[j];
        let outcomes: Vec<TrajectoryOutcome> = live.iter().map(|(_, p)| p.outcome(d)).collect();
        let (estimate, evaluate): (Vec<&TrajectoryOutcome>, Vec<TrajectoryOutcome>) = match mode {
            EvaluationMode::InSample => (outcomes.iter().collect(), outcomes.clone()),
            EvaluationMode::SplitSample => {
                let est = live
                    .iter()
                    .zip(&outcomes)
                    .filter(|((i, _), _)| i % 2 == 0)
                    .map(|(_, o)| o)
                    .collect();
                let ev = live
                    .iter()
                    .zip(&outcomes)
                    .filter(|((i, _), _)| i % 2 == 1)
                    .map(|(_, o)| *o)
                    .collect();
                (est, ev)
            }
        };
        let mut residuals: Vec<f64> = estimate.iter().filter_map(|o| o.residual).collect();
        residuals.sort_by(f64::total_cmp);
        gammas
            .iter()
            .map(|&gamma| {
                let t_star = sorted_percentile(&residuals, gamma)?;
                Ok(PolicyEvaluation::new(
                    d,
                    gamma,
                    evaluate_policy(&evaluate, t_star, costs)?,
                ))
            })
            .collect()
    });
    let per_point: Vec<Vec<PolicyEvaluation>> = per_point.into_iter().collect::<Result<_>>()?;

    let mut table = Vec::with_capacity(points.len() * gammas.len());
    let mut optima = Vec::with_capacity(gammas.len());
    for g in 0..gammas.len() {
        let mut best: Option<PolicyEvaluation> = None;
        for row in &per_point {
            let e = row[g];
            table.push(e);
            // strict improvement keeps the smallest d among ties
            if best.is_none_or(|b| e.ecput < b.ecput) {
                best = Some(e);
            }
        }
        optima.push(best.expect("grid has at least one point"));
    }

    Ok(PolicySweep {
        table,
        optima,
        reps: paths.len(),
        censored,
    })
}

/// Simulates `reps` replications once and evaluates every grid margin against
/// them; returns the full table and, per gamma, the smallest cost-minimizing
/// `d`.
pub fn optimize_d(
    scenario: &ScenarioConfig,
    grid: &GridSpec,
    gammas: &[f64],
    costs: &CostParams,
    reps: usize,
    master_seed: u64,
) -> Result<PolicySweep> {
    optimize_d_with(
        scenario,
        grid,
        gammas,
        costs,
        reps,
        master_seed,
        EvaluationMode::InSample,
    )
}

pub fn optimize_d_with(
    scenario: &ScenarioConfig,
    grid: &GridSpec,
    gammas: &[f64],
    costs: &CostParams,
    reps: usize,
    master_seed: u64,
    mode: EvaluationMode,
) -> Result<PolicySweep> {
    grid.validate()?;
    let paths = simulate_paths(scenario, reps, master_seed, grid.d_max)?;
    sweep_paths(&paths, grid, gammas, costs, mode)
}
