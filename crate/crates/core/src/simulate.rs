//! Discretized epoch walk: failure time, alarm time, residual lifetime and
//! failure mode for single trajectories and seeded batches.
//!
//! A trajectory is first reduced to a [`SamplePath`], which does not depend on
//! the alarm margin `d`. Every margin is then resolved against the same path,
//! so a grid of margins shares one set of simulated shocks.

use serde::{Deserialize, Serialize};

use crate::dynamics::{BoundaryCoeffs, DamageTracker, HealingParams};
use crate::error::{Error, Result};
use crate::shocks::{generate_train, generate_two_streams, mark_nonhealable, ShockTrain};
use crate::stochastic::{DistributionSpec, Family, Lane, RngStream};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Every shock heals indefinitely.
    #[default]
    Base,
    /// Healing stops after `tau`.
    FiniteHealing,
    /// Each shock is nonhealable with probability `p`; nonhealable shocks
    /// lower the boundary instead of adding damage.
    MixedNonhealable,
    /// A separate renewal stream of nonhealable shocks lowers the boundary.
    TwoStream,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::FiniteHealing => "finite_healing",
            Variant::MixedNonhealable => "mixed_nonhealable",
            Variant::TwoStream => "two_stream",
        }
    }
}

/// Laws of the nonhealable stream in the two-stream variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonhealableLaws {
    pub inter_arrival: DistributionSpec,
    pub magnitude: DistributionSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub variant: Variant,
    pub inter_arrival: DistributionSpec,
    pub magnitude: DistributionSpec,
    pub nonhealable: Option<NonhealableLaws>,
    /// Probability that a shock is nonhealable (mixed variant only).
    pub p: f64,
    pub healing: HealingParams,
    pub boundary: BoundaryCoeffs,
    pub horizon: f64,
    pub delta: f64,
    /// Shocks drawn per replication for the fixed-count variants.
    pub shock_count: usize,
}

impl Default for ScenarioConfig {
    /// Weibull arrivals with mean 1, Weibull(shape 10) magnitudes with mean 10,
    /// `kappa = 0.02`, `B(t) = 500 - t^2/50`, horizon 100 observed every 0.05.
    fn default() -> Self {
        Self {
            variant: Variant::Base,
            inter_arrival: DistributionSpec::with_mean(Family::Weibull, 2.0, 1.0).unwrap(),
            magnitude: DistributionSpec::with_mean(Family::Weibull, 10.0, 10.0).unwrap(),
            nonhealable: None,
            p: 0.0,
            healing: HealingParams {
                kappa: 0.02,
                tau: f64::INFINITY,
            },
            boundary: BoundaryCoeffs {
                a: 500.0,
                b: 0.0,
                c: 1.0 / 50.0,
            },
            horizon: 100.0,
            delta: 0.05,
            shock_count: 200,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::domain("delta", format!("must be positive, got {}", self.delta)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain(
                "horizon",
                format!("must be positive, got {}", self.horizon),
            ));
        }
        let ratio = self.horizon / self.delta;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
            return Err(Error::domain(
                "delta",
                format!("horizon / delta = {ratio} is not a whole number of epochs"),
            ));
        }
        if ratio.round() > u32::MAX as f64 {
            return Err(Error::domain("delta", "too many epochs"));
        }
        if self.shock_count == 0 {
            return Err(Error::domain("shock_count", "must be at least 1"));
        }
        self.healing.validate()?;
        self.boundary.validate()?;
        self.boundary.check_non_increasing(self.horizon)?;
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::domain("p", format!("must lie in [0, 1], got {}", self.p)));
        }
        match self.variant {
            Variant::Base => {
                if self.healing.tau != f64::INFINITY {
                    return Err(Error::domain("tau", "base variant heals indefinitely"));
                }
            }
            Variant::FiniteHealing | Variant::MixedNonhealable | Variant::TwoStream => {}
        }
        if self.variant != Variant::MixedNonhealable && self.p != 0.0 {
            return Err(Error::domain(
                "p",
                format!(
                    "only the mixed_nonhealable variant takes p (variant is {})",
                    self.variant.name()
                ),
            ));
        }
        match (self.variant, &self.nonhealable) {
            (Variant::TwoStream, None) => Err(Error::domain(
                "nonhealable",
                "two_stream variant needs nonhealable inter-arrival and magnitude laws",
            )),
            (Variant::TwoStream, Some(_)) | (_, None) => Ok(()),
            (v, Some(_)) => Err(Error::domain(
                "nonhealable",
                format!(
                    "only the two_stream variant takes a nonhealable stream (variant is {})",
                    v.name()
                ),
            )),
        }
    }

    /// Number of observation epochs `horizon / delta`.
    pub fn epochs(&self) -> u32 {
        (self.horizon / self.delta).round() as u32
    }

    #[inline]
    pub fn epoch_time(&self, k: u32) -> f64 {
        k as f64 * self.delta
    }
}

/// The random inputs of one replication.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Realization {
    /// Shocks that add damage; in the mixed variant its nonhealable members
    /// lower the boundary instead.
    pub train: ShockTrain,
    /// Separate nonhealable stream (two-stream variant), empty otherwise.
    pub nonhealable: ShockTrain,
}

impl Realization {
    pub fn generate(scenario: &ScenarioConfig, stream: &RngStream) -> Result<Self> {
        match scenario.variant {
            Variant::Base | Variant::FiniteHealing => Ok(Self {
                train: fixed_count_train(scenario, stream),
                nonhealable: ShockTrain::empty(),
            }),
            Variant::MixedNonhealable => {
                let train = fixed_count_train(scenario, stream);
                let mut marks = stream.on_lane(Lane::Marks);
                Ok(Self {
                    train: mark_nonhealable(&train, scenario.p, &mut marks)?,
                    nonhealable: ShockTrain::empty(),
                })
            }
            Variant::TwoStream => {
                let laws = scenario
                    .nonhealable
                    .as_ref()
                    .ok_or_else(|| Error::domain("nonhealable", "missing nonhealable laws"))?;
                let (train, nonhealable) = generate_two_streams(
                    (&scenario.inter_arrival, &scenario.magnitude),
                    (&laws.inter_arrival, &laws.magnitude),
                    scenario.horizon,
                    stream,
                )?;
                Ok(Self { train, nonhealable })
            }
        }
    }

    /// Boundary drops `(time, magnitude)` from both sources, in time order.
    pub fn drops(&self) -> Vec<(f64, f64)> {
        let mut drops: Vec<(f64, f64)> = self.train.drops().chain(self.nonhealable.drops()).collect();
        drops.sort_by(|x, y| x.0.total_cmp(&y.0));
        drops
    }

    /// Shocks of either kind that arrived by `t`.
    pub fn count_until(&self, t: f64) -> usize {
        self.train.count_until(t) + self.nonhealable.count_until(t)
    }
}

fn fixed_count_train(scenario: &ScenarioConfig, stream: &RngStream) -> ShockTrain {
    let mut rng = stream.on_lane(Lane::Healable);
    generate_train(
        &scenario.inter_arrival,
        &scenario.magnitude,
        scenario.shock_count,
        &mut rng,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    /// A damaging shock pushed the damage over the boundary.
    ShockJump,
    /// The aging boundary came down onto the healing damage.
    HealingCross,
    /// A nonhealable shock dropped the boundary below the damage.
    BoundaryDrop,
    /// No failure within the horizon.
    Censored,
}

impl FailureMode {
    pub fn name(self) -> &'static str {
        match self {
            FailureMode::ShockJump => "shock_jump",
            FailureMode::HealingCross => "healing_cross",
            FailureMode::BoundaryDrop => "boundary_drop",
            FailureMode::Censored => "censored",
        }
    }
}

/// Margin-independent summary of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    delta: f64,
    failure_epoch: Option<u32>,
    failure_mode: FailureMode,
    shock_count: usize,
    /// `(epoch, gap)` at every epoch before failure where `B - D` reached a new
    /// minimum not above the margin cap.
    records: Vec<(u32, f64)>,
}

impl SamplePath {
    pub fn failure_epoch(&self) -> Option<u32> {
        self.failure_epoch
    }

    pub fn failure_mode(&self) -> FailureMode {
        self.failure_mode
    }

    pub fn shock_count(&self) -> usize {
        self.shock_count
    }

    pub fn is_censored(&self) -> bool {
        self.failure_epoch.is_none()
    }

    /// First epoch with `0 <= B - D <= d`. Margins above the cap the path was
    /// recorded with are not resolvable.
    pub fn alarm_epoch(&self, d: f64) -> Option<u32> {
        let first = self.records.iter().find(|&&(_, gap)| gap <= d).map(|&(k, _)| k);
        // damage jumped straight past the band: alarm coincides with failure
        first.or(self.failure_epoch)
    }

    pub fn outcome(&self, d: f64) -> TrajectoryOutcome {
        TrajectoryOutcome::new(
            self.delta,
            self.failure_epoch,
            self.alarm_epoch(d),
            self.shock_count,
            self.failure_mode,
        )
    }
}

/// Result of one replication at a fixed margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOutcome {
    pub failure_epoch: Option<u32>,
    pub alarm_epoch: Option<u32>,
    /// `T`; `None` when censored.
    pub failure_time: Option<f64>,
    /// `T'`; `None` when the margin was never reached.
    pub alarm_time: Option<f64>,
    /// `T - T'` when both exist.
    pub residual: Option<f64>,
    pub shock_count: usize,
    pub failure_mode: FailureMode,
}

impl TrajectoryOutcome {
    fn new(
        delta: f64,
        failure_epoch: Option<u32>,
        alarm_epoch: Option<u32>,
        shock_count: usize,
        failure_mode: FailureMode,
    ) -> Self {
        let residual = match (failure_epoch, alarm_epoch) {
            (Some(f), Some(a)) => Some((f - a) as f64 * delta),
            _ => None,
        };
        Self {
            failure_epoch,
            alarm_epoch,
            failure_time: failure_epoch.map(|k| k as f64 * delta),
            alarm_time: alarm_epoch.map(|k| k as f64 * delta),
            residual,
            shock_count,
            failure_mode,
        }
    }

    pub fn is_censored(&self) -> bool {
        self.failure_epoch.is_none()
    }
}

/// State observed at one epoch, for traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub epoch: u32,
    pub t: f64,
    pub damage: f64,
    pub boundary: f64,
}

/// Walks the epochs of `realization` and summarizes the path. `margin_cap`
/// bounds the margins the path can later resolve.
pub fn walk(
    scenario: &ScenarioConfig,
    realization: &Realization,
    margin_cap: f64,
    mut observe: impl FnMut(TracePoint),
) -> SamplePath {
    let drops = realization.drops();
    let mut tracker = DamageTracker::new(&realization.train, scenario.healing, scenario.delta);
    let mut next_drop = 0;
    let mut lowered = 0.0;
    let mut min_gap = f64::INFINITY;
    let mut records = Vec::new();

    for k in 1..=scenario.epochs() {
        let t = scenario.epoch_time(k);
        let step = tracker.advance(t);
        let mut dropped = false;
        while next_drop < drops.len() && drops[next_drop].0 <= t {
            lowered += drops[next_drop].1;
            next_drop += 1;
            dropped = true;
        }
        let boundary = scenario.boundary.value(t) - lowered;
        observe(TracePoint {
            epoch: k,
            t,
            damage: step.damage,
            boundary,
        });

        if step.damage > boundary {
            let mode = if step.healable_arrival {
                FailureMode::ShockJump
            } else if dropped {
                FailureMode::BoundaryDrop
            } else {
                FailureMode::HealingCross
            };
            return SamplePath {
                delta: scenario.delta,
                failure_epoch: Some(k),
                failure_mode: mode,
                shock_count: realization.count_until(t),
                records,
            };
        }

        let gap = boundary - step.damage;
        if gap < min_gap && gap <= margin_cap {
            min_gap = gap;
            records.push((k, gap));
        }
    }

    SamplePath {
        delta: scenario.delta,
        failure_epoch: None,
        failure_mode: FailureMode::Censored,
        shock_count: realization.count_until(scenario.epoch_time(scenario.epochs())),
        records,
    }
}

/// Simulates the replication driven by `stream`, resolvable for margins up to
/// `margin_cap`.
pub fn simulate_path(scenario: &ScenarioConfig, stream: &RngStream, margin_cap: f64) -> Result<SamplePath> {
    let realization = Realization::generate(scenario, stream)?;
    Ok(walk(scenario, &realization, margin_cap, |_| {}))
}

fn check_margin(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("d", format!("margin must be positive, got {d}")))
    }
}

/// One replication at margin `d`.
pub fn simulate_trajectory(scenario: &ScenarioConfig, d: f64, stream: &RngStream) -> Result<TrajectoryOutcome> {
    check_margin(d)?;
    scenario.validate()?;
    Ok(simulate_path(scenario, stream, d)?.outcome(d))
}

/// Per-epoch `(t, D, B_eff)` for the replication driven by `stream`, up to and
/// including the failure epoch.
pub fn trace(scenario: &ScenarioConfig, stream: &RngStream) -> Result<Vec<TracePoint>> {
    scenario.validate()?;
    let realization = Realization::generate(scenario, stream)?;
    let mut points = Vec::new();
    walk(scenario, &realization, 0.0, |p| points.push(p));
    Ok(points)
}

pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// `reps` sample paths, replication `i` driven by stream `(master_seed, i)`,
/// returned in replication order whatever the worker count.
pub fn simulate_paths(
    scenario: &ScenarioConfig,
    reps: usize,
    master_seed: u64,
    margin_cap: f64,
) -> Result<Vec<SamplePath>> {
    scenario.validate()?;
    if reps == 0 {
        return Err(Error::domain("reps", "must be at least 1"));
    }
    map_indexed(reps, |i| {
        simulate_path(scenario, &RngStream::new(master_seed, i as u64), margin_cap)
    })
    .into_iter()
    .collect()
}

pub fn run_replications(
    scenario: &ScenarioConfig,
    d: f64,
    reps: usize,
    master_seed: u64,
) -> Result<Vec<TrajectoryOutcome>> {
    check_margin(d)?;
    Ok(simulate_paths(scenario, reps, master_seed, d)?
        .iter()
        .map(|p| p.outcome(d))
        .collect())
}
