//! Experiment configuration: a TOML file with one table per concern.
//!
//! ```toml
//! [scenario]
//! variant = "base"          # base | finite_healing | mixed_nonhealable | two_stream
//! kappa = [0.01, 0.02]      # scalar or list; lists are swept
//! tau = "inf"               # number, "inf", or list
//! horizon = 100
//! delta = 0.05
//! shock_count = 200
//!
//! [scenario.boundary]
//! a = 500
//! b = 0
//! c = [0, "1/60", "1/50"]   # numbers or "p/q" fractions
//!
//! [scenario.inter_arrival]
//! family = "weibull"
//! shape = 2
//! mean = 1
//!
//! [costs]
//! c0 = 5000
//!
//! [grid]
//! d_min = 8
//! d_max = 16
//! step = 0.1
//!
//! [run]
//! gammas = [0.9, 0.85, 0.8]
//! reps = 10000
//! seed = 1
//! ```
//!
//! Every key is optional. Unknown keys are rejected. Sweep cells are the
//! Cartesian product of `kappa`, `c`, `tau` and `p`, in that nesting order.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::dynamics::{BoundaryCoeffs, HealingParams};
use crate::error::{Error, Result};
use crate::policy::{CostParams, EvaluationMode, GridSpec};
use crate::simulate::{NonhealableLaws, ScenarioConfig, Variant};
use crate::stochastic::{DistributionSpec, Family, DEFAULT_INVERSE_GAUSSIAN_SHAPE};

/// A real number written as a TOML number, `"inf"`, or a `"p/q"` fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum RealRepr {
    Num(f64),
    Text(String),
}

impl Real {
    fn parse(text: &str) -> std::result::Result<f64, String> {
        let t = text.trim();
        match t {
            "inf" | "infinity" | "+inf" => return Ok(f64::INFINITY),
            _ => {}
        }
        if let Some((num, den)) = t.split_once('/') {
            let num: f64 = num.trim().parse().map_err(|_| format!("bad numerator in {t:?}"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("bad denominator in {t:?}"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in {t:?}"));
            }
            return Ok(num / den);
        }
        t.parse()
            .map_err(|_| format!("{t:?} is not a number, \"inf\" or a fraction"))
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match RealRepr::deserialize(deserializer)? {
            RealRepr::Num(x) => Ok(Real(x)),
            RealRepr::Text(s) => Real::parse(&s).map(Real).map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            serializer.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_str("-inf")
        }
    }
}

/// One value or a list of values to sweep over.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep(pub Vec<f64>);

#[derive(Deserialize)]
#[serde(untagged)]
enum SweepRepr {
    One(Real),
    Many(Vec<Real>),
}

impl Sweep {
    pub fn one(x: f64) -> Self {
        Sweep(vec![x])
    }
}

impl<'de> Deserialize<'de> for Sweep {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match SweepRepr::deserialize(deserializer)? {
            SweepRepr::One(r) => Sweep(vec![r.0]),
            SweepRepr::Many(v) => Sweep(v.into_iter().map(|r| r.0).collect()),
        })
    }
}

impl Serialize for Sweep {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.len() == 1 {
            Real(self.0[0]).serialize(serializer)
        } else {
            serializer.collect_seq(self.0.iter().map(|&x| Real(x)))
        }
    }
}

/// A law given by family plus either its mean or its native scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSection {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Real>,
    /// Weibull/gamma scale, exponential rate or inverse-Gaussian mean.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Real>,
}

impl LawSection {
    pub fn with_mean(family: Family, shape: f64, mean: f64) -> Self {
        Self {
            family,
            shape: Some(shape),
            mean: Some(Real(mean)),
            scale: None,
        }
    }

    pub fn resolve(&self, key: &str) -> Result<DistributionSpec> {
        let shape = match (self.family, self.shape) {
            (_, Some(s)) => s,
            (Family::Exponential, None) => 1.0,
            (Family::InverseGaussian, None) => DEFAULT_INVERSE_GAUSSIAN_SHAPE,
            (f, None) => {
                return Err(Error::config(
                    format!("{key}.shape"),
                    format!("required for the {} family", f.name()),
                ))
            }
        };
        let spec = match (self.mean, self.scale) {
            (Some(m), None) => DistributionSpec::with_mean(self.family, shape, m.0),
            (None, Some(s)) => DistributionSpec::with_scale(self.family, shape, s.0),
            _ => return Err(Error::config(key, "give exactly one of `mean` and `scale`")),
        };
        spec.map_err(|e| match e {
            Error::Domain { name, reason } => Error::config(format!("{key}.{name}"), reason),
            other => other,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundarySection {
    pub a: f64,
    pub b: f64,
    pub c: Sweep,
}

impl Default for BoundarySection {
    fn default() -> Self {
        Self {
            a: 500.0,
            b: 0.0,
            c: Sweep::one(1.0 / 50.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub variant: Variant,
    pub kappa: Sweep,
    /// Defaults to `inf` for `base`/`mixed_nonhealable`, 50 otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<Sweep>,
    /// Only for `mixed_nonhealable`; defaults to 0.2 there.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Sweep>,
    pub horizon: f64,
    pub delta: f64,
    pub shock_count: usize,
    pub boundary: BoundarySection,
    pub inter_arrival: LawSection,
    pub magnitude: LawSection,
    /// Only for `two_stream`; defaults to Weibull(2) with mean 5.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonhealable_inter_arrival: Option<LawSection>,
    /// Only for `two_stream`; defaults to gamma(3) with mean 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonhealable_magnitude: Option<LawSection>,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            variant: Variant::Base,
            kappa: Sweep::one(0.02),
            tau: None,
            p: None,
            horizon: 100.0,
            delta: 0.05,
            shock_count: 200,
            boundary: BoundarySection::default(),
            inter_arrival: LawSection::with_mean(Family::Weibull, 2.0, 1.0),
            magnitude: LawSection::with_mean(Family::Weibull, 10.0, 10.0),
            nonhealable_inter_arrival: None,
            nonhealable_magnitude: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub gammas: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub emit_traces: bool,
    /// Replications traced per cell when traces are emitted.
    pub trace_reps: usize,
    /// Margin `d` at which the reliability curves are drawn.
    pub survival_margin: f64,
    pub evaluation: EvaluationMode,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            gammas: vec![0.90, 0.85, 0.80],
            reps: 10_000,
            seed: 1,
            output_dir: PathBuf::from("results"),
            emit_traces: false,
            trace_reps: 3,
            survival_margin: 12.0,
            evaluation: EvaluationMode::InSample,
        }
    }
}

/// The file as written, before validation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub scenario: ScenarioSection,
    pub costs: CostParams,
    pub grid: GridSpec,
    pub run: RunSection,
}

impl ConfigFile {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// One point of the parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub index: usize,
    pub kappa: f64,
    pub tau: f64,
    pub p: f64,
    pub c: f64,
    pub scenario: ScenarioConfig,
}

impl SweepCell {
    /// `key=value` pairs describing the cell.
    pub fn label(&self) -> String {
        format!(
            "kappa={},c={},tau={},p={}",
            crate::csv::fmt_g6(self.kappa),
            crate::csv::fmt_g6(self.c),
            crate::csv::fmt_g6(self.tau),
            crate::csv::fmt_g6(self.p)
        )
    }

    fn param(&self, key: &str) -> Option<f64> {
        match key {
            "kappa" => Some(self.kappa),
            "c" => Some(self.c),
            "tau" => Some(self.tau),
            "p" => Some(self.p),
            _ => None,
        }
    }
}

/// Validated experiment with sweep cells expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: ConfigFile,
    pub cells: Vec<SweepCell>,
    pub costs: CostParams,
    pub grid: GridSpec,
    pub gammas: Vec<f64>,
    pub reps: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub emit_traces: bool,
    pub trace_reps: usize,
    pub survival_margin: f64,
    pub evaluation: EvaluationMode,
}

fn keyed(prefix: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Domain { name, reason } => {
            let key = match name {
                "a" | "b" | "c" => format!("{prefix}.boundary.{name}"),
                "d_min" | "d_max" | "step" => format!("grid.{name}"),
                _ => format!("{prefix}.{name}"),
            };
            Error::config(key, reason)
        }
        other => other,
    }
}

fn nonempty(sweep: &Sweep, key: &str) -> Result<()> {
    if sweep.0.is_empty() {
        Err(Error::config(key, "list must not be empty"))
    } else {
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_file(file: ConfigFile) -> Result<Self> {
        let sc = &file.scenario;
        let variant = sc.variant;

        nonempty(&sc.kappa, "scenario.kappa")?;
        nonempty(&sc.boundary.c, "scenario.boundary.c")?;

        let tau = match (&sc.tau, variant) {
            (Some(t), Variant::Base) => {
                if t.0.iter().any(|&x| x != f64::INFINITY) {
                    return Err(Error::config(
                        "scenario.tau",
                        "the base variant heals indefinitely; use finite_healing for a finite tau",
                    ));
                }
                t.clone()
            }
            (Some(t), _) => t.clone(),
            (None, Variant::Base | Variant::MixedNonhealable) => Sweep::one(f64::INFINITY),
            (None, Variant::FiniteHealing | Variant::TwoStream) => Sweep::one(50.0),
        };
        nonempty(&tau, "scenario.tau")?;

        let p = match (&sc.p, variant) {
            (Some(p), Variant::MixedNonhealable) => p.clone(),
            (None, Variant::MixedNonhealable) => Sweep::one(0.2),
            (Some(_), v) => {
                return Err(Error::config(
                    "scenario.p",
                    format!("only the mixed_nonhealable variant takes p (variant is {})", v.name()),
                ))
            }
            (None, _) => Sweep::one(0.0),
        };
        nonempty(&p, "scenario.p")?;

        let nonhealable = match variant {
            Variant::TwoStream => {
                let ia =
                    sc.nonhealable_inter_arrival
                        .clone()
                        .unwrap_or(LawSection::with_mean(Family::Weibull, 2.0, 5.0));
                let mag = sc
                    .nonhealable_magnitude
                    .clone()
                    .unwrap_or(LawSection::with_mean(Family::Gamma, 3.0, 3.0));
                Some(NonhealableLaws {
                    inter_arrival: ia.resolve("scenario.nonhealable_inter_arrival")?,
                    magnitude: mag.resolve("scenario.nonhealable_magnitude")?,
                })
            }
            v => {
                for (key, law) in [
                    ("scenario.nonhealable_inter_arrival", &sc.nonhealable_inter_arrival),
                    ("scenario.nonhealable_magnitude", &sc.nonhealable_magnitude),
                ] {
                    if law.is_some() {
                        return Err(Error::config(
                            key,
                            format!(
                                "only the two_stream variant takes a nonhealable stream (variant is {})",
                                v.name()
                            ),
                        ));
                    }
                }
                None
            }
        };

        let inter_arrival = sc.inter_arrival.resolve("scenario.inter_arrival")?;
        let magnitude = sc.magnitude.resolve("scenario.magnitude")?;

        let mut cells = Vec::new();
        for &kappa in &sc.kappa.0 {
            for &c in &sc.boundary.c.0 {
                for &tau in &tau.0 {
                    for &p in &p.0 {
                        let scenario = ScenarioConfig {
                            variant,
                            inter_arrival,
                            magnitude,
                            nonhealable,
                            p,
                            healing: HealingParams { kappa, tau },
                            boundary: BoundaryCoeffs {
                                a: sc.boundary.a,
                                b: sc.boundary.b,
                                c,
                            },
                            horizon: sc.horizon,
                            delta: sc.delta,
                            shock_count: sc.shock_count,
                        };
                        scenario.validate().map_err(keyed("scenario"))?;
                        cells.push(SweepCell {
                            index: cells.len(),
                            kappa,
                            tau,
                            p,
                            c,
                            scenario,
                        });
                    }
                }
            }
        }

        file.costs.validate().map_err(|e| match e {
            Error::Domain { name, reason } => Error::config(format!("costs.{name}"), reason),
            other => other,
        })?;
        file.grid.validate().map_err(keyed("grid"))?;

        let run = &file.run;
        if run.gammas.is_empty() {
            return Err(Error::config(
                "run.gammas",
                "at least one survival probability is required",
            ));
        }
        if let Some(g) = run.gammas.iter().find(|&&g| !(g > 0.0 && g < 1.0)) {
            return Err(Error::config("run.gammas", format!("{g} is not in (0, 1)")));
        }
        if run.reps == 0 {
            return Err(Error::config("run.reps", "must be at least 1"));
        }
        if !(run.survival_margin > 0.0 && run.survival_margin.is_finite()) {
            return Err(Error::config("run.survival_margin", "must be positive"));
        }

        Ok(Self {
            cells,
            costs: file.costs,
            grid: file.grid,
            gammas: run.gammas.clone(),
            reps: run.reps,
            master_seed: run.seed,
            output_dir: run.output_dir.clone(),
            emit_traces: run.emit_traces,
            trace_reps: run.trace_reps,
            survival_margin: run.survival_margin,
            evaluation: run.evaluation,
            source: file,
        })
    }

    /// Keeps only cells matching every `key=value` pair of `filter`
    /// (comma-separated; keys `kappa`, `c`, `tau`, `p`). Cell indices, and so
    /// their seeds, are unchanged.
    pub fn apply_filter(&mut self, filter: &str) -> Result<()> {
        let mut conditions = Vec::new();
        for part in filter.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::config("scenario-filter", format!("expected key=value, got {part:?}")))?;
            let key = key.trim();
            if !matches!(key, "kappa" | "c" | "tau" | "p") {
                return Err(Error::config(
                    "scenario-filter",
                    format!("unknown key {key:?} (expected kappa, c, tau or p)"),
                ));
            }
            let value = Real::parse(value).map_err(|r| Error::config("scenario-filter", r))?;
            conditions.push((key.to_string(), value));
        }
        self.cells.retain(|cell| {
            conditions.iter().all(|(k, v)| {
                let x = cell.param(k).expect("checked key");
                x == *v || (x - v).abs() <= 1e-9 * v.abs().max(1.0)
            })
        });
        if self.cells.is_empty() {
            return Err(Error::config(
                "scenario-filter",
                format!("{filter:?} matches no sweep cell"),
            ));
        }
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::config(toml_key(&e), e.message().to_string()))?;
    ExperimentConfig::from_file(file)
}

fn toml_key(e: &toml::de::Error) -> String {
    // serde reports unknown keys as "unknown field `x`"
    let msg = e.message();
    msg.split('`')
        .nth(1)
        .filter(|_| msg.starts_with("unknown field") || msg.starts_with("missing field"))
        .unwrap_or("toml")
        .to_string()
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source.to_toml())
    }
}
