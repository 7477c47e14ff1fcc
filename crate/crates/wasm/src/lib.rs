//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes a JSON object of [`DemoParams`] (missing keys fall back
//! to the defaults) and returns a JSON string the page plots directly.

use healshock_core::policy::sweep_paths;
use healshock_core::reliability::{empirical_survival, scenario_replacement_times, ReplacementScenario};
use healshock_core::simulate::{simulate_path, simulate_paths, trace, NonhealableLaws};
use healshock_core::{
    residual_percentile, BoundaryCoeffs, CostParams, DistributionSpec, EvaluationMode, Family, GridSpec, HealingParams,
    RngStream, ScenarioConfig, Variant,
};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoParams {
    pub variant: Variant,
    pub kappa: f64,
    /// Quadratic boundary coefficient in `B(t) = 500 - c t^2`.
    pub c: f64,
    /// `null` means indefinite healing.
    pub tau: Option<f64>,
    pub p: f64,
    pub d: f64,
    pub reps: usize,
    pub seed: u64,
    pub replication: u64,
    pub d_min: f64,
    pub d_max: f64,
    pub step: f64,
}

impl Default for DemoParams {
    fn default() -> Self {
        Self {
            variant: Variant::Base,
            kappa: 0.02,
            c: 1.0 / 50.0,
            tau: None,
            p: 0.0,
            d: 12.0,
            reps: 1000,
            seed: 1,
            replication: 0,
            d_min: 8.0,
            d_max: 16.0,
            step: 0.5,
        }
    }
}

const MAX_REPS: usize = 20_000;

impl DemoParams {
    fn parse(json: &str) -> Result<Self, String> {
        let params: Self = if json.trim().is_empty() {
            Self::default()
        } else {
            serde_json::from_str(json).map_err(|e| e.to_string())?
        };
        if params.reps == 0 || params.reps > MAX_REPS {
            return Err(format!("reps must be between 1 and {MAX_REPS}"));
        }
        if !(params.d > 0.0 && params.d.is_finite()) {
            return Err("d must be positive".into());
        }
        Ok(params)
    }

    fn scenario(&self) -> Result<ScenarioConfig, String> {
        let mut scenario = ScenarioConfig {
            variant: self.variant,
            p: self.p,
            healing: HealingParams {
                kappa: self.kappa,
                tau: self.tau.unwrap_or(f64::INFINITY),
            },
            boundary: BoundaryCoeffs {
                a: 500.0,
                b: 0.0,
                c: self.c,
            },
            ..ScenarioConfig::default()
        };
        if self.variant == Variant::TwoStream {
            scenario.nonhealable = Some(NonhealableLaws {
                inter_arrival: DistributionSpec::with_mean(Family::Weibull, 2.0, 5.0).map_err(|e| e.to_string())?,
                magnitude: DistributionSpec::with_mean(Family::Gamma, 3.0, 3.0).map_err(|e| e.to_string())?,
            });
        }
        scenario.validate().map_err(|e| e.to_string())?;
        Ok(scenario)
    }
}

#[derive(Debug, Serialize)]
pub struct DamagePath {
    pub t: Vec<f64>,
    pub damage: Vec<f64>,
    pub boundary: Vec<f64>,
    pub failure_time: Option<f64>,
    pub alarm_time: Option<f64>,
    pub failure_mode: &'static str,
}

pub fn damage_path_json(params: &str) -> Result<String, String> {
    let params = DemoParams::parse(params)?;
    let scenario = params.scenario()?;
    let stream = RngStream::new(params.seed, params.replication);
    let points = trace(&scenario, &stream).map_err(|e| e.to_string())?;
    let outcome = simulate_path(&scenario, &stream, params.d)
        .map_err(|e| e.to_string())?
        .outcome(params.d);
    let path = DamagePath {
        t: points.iter().map(|p| p.t).collect(),
        damage: points.iter().map(|p| p.damage).collect(),
        boundary: points.iter().map(|p| p.boundary).collect(),
        failure_time: outcome.failure_time,
        alarm_time: outcome.alarm_time,
        failure_mode: outcome.failure_mode.name(),
    };
    serde_json::to_string(&path).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct PolicyCurve {
    pub gamma: f64,
    pub t_star: Vec<f64>,
    pub ecput: Vec<f64>,
    pub optimal_d: f64,
    pub optimal_t_star: f64,
    pub optimal_ecput: f64,
}

#[derive(Debug, Serialize)]
pub struct PolicyCurves {
    pub d: Vec<f64>,
    pub curves: Vec<PolicyCurve>,
    pub censored_fraction: f64,
}

pub fn policy_curves_json(params: &str) -> Result<String, String> {
    let params = DemoParams::parse(params)?;
    let scenario = params.scenario()?;
    let grid = GridSpec {
        d_min: params.d_min,
        d_max: params.d_max,
        step: params.step,
    };
    grid.validate().map_err(|e| e.to_string())?;
    let gammas = [0.90, 0.85, 0.80];
    let paths = simulate_paths(&scenario, params.reps, params.seed, grid.d_max).map_err(|e| e.to_string())?;
    let sweep = sweep_paths(&paths, &grid, &gammas, &CostParams::default(), EvaluationMode::InSample)
        .map_err(|e| e.to_string())?;
    let curves = gammas
        .iter()
        .map(|&g| {
            let best = sweep.optimum(g).expect("optimum per gamma");
            PolicyCurve {
                gamma: g,
                t_star: sweep.curve(g).map(|e| e.t_star).collect(),
                ecput: sweep.curve(g).map(|e| e.ecput).collect(),
                optimal_d: best.d,
                optimal_t_star: best.t_star,
                optimal_ecput: best.ecput,
            }
        })
        .collect();
    let out = PolicyCurves {
        d: grid.points(),
        curves,
        censored_fraction: sweep.censored_fraction(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct Curve {
    pub name: &'static str,
    pub t: Vec<f64>,
    pub survival: Vec<f64>,
}

pub fn survival_curves_json(params: &str) -> Result<String, String> {
    let params = DemoParams::parse(params)?;
    let scenario = params.scenario()?;
    let paths = simulate_paths(&scenario, params.reps, params.seed, params.d).map_err(|e| e.to_string())?;
    let outcomes: Vec<_> = paths
        .iter()
        .filter(|p| !p.is_censored())
        .map(|p| p.outcome(params.d))
        .collect();
    if outcomes.is_empty() {
        return Err("every replication is censored".into());
    }
    let residuals: Vec<f64> = outcomes.iter().filter_map(|o| o.residual).collect();
    let mut t_stars = Vec::new();
    for g in [0.80, 0.85, 0.90] {
        t_stars.push((g, residual_percentile(&residuals, g).map_err(|e| e.to_string())?));
    }
    let mut curves = Vec::new();
    for rule in ReplacementScenario::ALL {
        let times = scenario_replacement_times(&outcomes, rule, &t_stars).map_err(|e| e.to_string())?;
        let curve = empirical_survival(&times).map_err(|e| e.to_string())?;
        curves.push(Curve {
            name: rule.name(),
            t: curve.times().to_vec(),
            survival: curve.survival().to_vec(),
        });
    }
    serde_json::to_string(&curves).map_err(|e| e.to_string())
}

/// One replication's damage and boundary over time.
#[wasm_bindgen]
pub fn damage_path(params: &str) -> Result<String, JsValue> {
    damage_path_json(params).map_err(|e| JsValue::from_str(&e))
}

/// `t*` and cost rate against `d` for each survival probability.
#[wasm_bindgen]
pub fn policy_curves(params: &str) -> Result<String, JsValue> {
    policy_curves_json(params).map_err(|e| JsValue::from_str(&e))
}

/// Survival of the replacement time under the five replacement rules.
#[wasm_bindgen]
pub fn survival_curves(params: &str) -> Result<String, JsValue> {
    survival_curves_json(params).map_err(|e| JsValue::from_str(&e))
}
