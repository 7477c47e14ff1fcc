//! Monte Carlo simulation of self-healing systems hit by random shocks, with
//! an aging failure boundary, and grid optimization of the preventive
//! replacement margin.
//!
//! The pipeline: [`stochastic`] draws variates from per-replication streams,
//! [`shocks`] turns them into shock trains, [`dynamics`] evaluates damage and
//! boundary, [`simulate`] walks the observation epochs, [`policy`] picks the
//! margin and post-alarm wait, and [`reliability`] compares replacement rules.
//! [`config`] and [`experiment`] drive full sweeps from a TOML file.

// `!(x > 0.0)` is the NaN-rejecting form throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csv;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod policy;
pub mod reliability;
pub mod shocks;
pub mod simulate;
pub mod stochastic;

pub use config::{load_config, parse_config, ConfigFile, ExperimentConfig, SweepCell};
pub use dynamics::{cumulative_damage, effective_boundary, BoundaryCoeffs, HealingParams};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentReport};
pub use policy::{
    evaluate_policy, optimize_d, residual_percentile, CostParams, EvaluationMode, GridSpec, PolicyEvaluation,
    PolicySweep,
};
pub use reliability::{empirical_survival, scenario_replacement_times, ReplacementScenario, SurvivalCurve};
pub use shocks::{generate_train, generate_two_streams, mark_nonhealable, ShockTrain};
pub use simulate::{
    run_replications, simulate_paths, simulate_trajectory, FailureMode, SamplePath, ScenarioConfig, TrajectoryOutcome,
    Variant,
};
pub use stochastic::{derive_seed, scale_for_mean, DistributionSpec, Family, RngStream};
