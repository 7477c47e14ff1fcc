//! Empirical reliability of the replacement time under the five replacement
//! rules: at failure, at the alarm, and at the alarm plus `t*` for 10%, 15%
//! and 20% risk.

use std::io::Write;

use crate::error::{Error, Result};
use crate::simulate::TrajectoryOutcome;

/// Right-continuous step function `S(t) = #{x > t} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    /// `0` followed by the distinct sample values, ascending.
    times: Vec<f64>,
    /// `survival[i]` holds on `[times[i], times[i + 1])`.
    survival: Vec<f64>,
}

impl SurvivalCurve {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn survival(&self) -> &[f64] {
        &self.survival
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.times[0] {
            return 1.0;
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        self.survival[i]
    }

    /// `t,S` rows, one per step.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "t,S")?;
        for (t, s) in self.times.iter().zip(&self.survival) {
            writeln!(out, "{},{}", crate::csv::fmt_g6(*t), crate::csv::fmt_g6(*s))?;
        }
        Ok(())
    }
}

pub fn empirical_survival(replacement_times: &[f64]) -> Result<SurvivalCurve> {
    if replacement_times.is_empty() {
        return Err(Error::InsufficientData("no replacement times".into()));
    }
    if let Some(t) = replacement_times.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::domain("replacement_times", format!("must be positive, got {t}")));
    }
    let mut sorted = replacement_times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();

    let mut times = vec![0.0];
    let mut survival = vec![1.0];
    let mut i = 0;
    while i < n {
        let t = sorted[i];
        let j = sorted.partition_point(|&x| x <= t);
        times.push(t);
        survival.push((n - j) as f64 / n as f64);
        i = j;
    }
    Ok(SurvivalCurve { times, survival })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReplacementScenario {
    /// Replace at failure (100% failure risk).
    Failure100,
    Risk20,
    Risk15,
    Risk10,
    /// Replace as soon as the alarm sounds.
    Risk0,
}

impl ReplacementScenario {
    pub const ALL: [ReplacementScenario; 5] = [
        ReplacementScenario::Failure100,
        ReplacementScenario::Risk20,
        ReplacementScenario::Risk15,
        ReplacementScenario::Risk10,
        ReplacementScenario::Risk0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReplacementScenario::Failure100 => "failure_100",
            ReplacementScenario::Risk20 => "risk_20",
            ReplacementScenario::Risk15 => "risk_15",
            ReplacementScenario::Risk10 => "risk_10",
            ReplacementScenario::Risk0 => "risk_0",
        }
    }

    /// Survival probability whose `t*` the rule waits for.
    pub fn gamma(self) -> Option<f64> {
        match self {
            ReplacementScenario::Risk20 => Some(0.80),
            ReplacementScenario::Risk15 => Some(0.85),
            ReplacementScenario::Risk10 => Some(0.90),
            ReplacementScenario::Failure100 | ReplacementScenario::Risk0 => None,
        }
    }
}

/// Replacement time of each replication under `scenario`. `t_stars` maps
/// survival probability to `t*`.
pub fn scenario_replacement_times(
    outcomes: &[TrajectoryOutcome],
    scenario: ReplacementScenario,
    t_stars: &[(f64, f64)],
) -> Result<Vec<f64>> {
    let wait = match scenario.gamma() {
        Some(g) => Some(
            t_stars
                .iter()
                .find(|(gamma, _)| (gamma - g).abs() < 1e-9)
                .map(|&(_, t)| t)
                .ok_or_else(|| Error::domain("t_stars", format!("no t* for gamma = {g} ({})", scenario.name())))?,
        ),
        None => None,
    };
    outcomes
        .iter()
        .map(|o| {
            let (Some(t), Some(alarm)) = (o.failure_time, o.alarm_time) else {
                return Err(Error::domain("outcomes", "censored outcomes must be excluded"));
            };
            Ok(match (scenario, wait) {
                (ReplacementScenario::Failure100, _) => t,
                (ReplacementScenario::Risk0, _) => alarm,
                (_, Some(w)) => t.min(alarm + w),
                (_, None) => unreachable!("risk scenarios carry a gamma"),
            })
        })
        .collect()
}
