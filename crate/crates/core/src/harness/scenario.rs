use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::buffering::FunctionDemand;
use crate::cascade::{FlowModel, ThresholdCascadeSpec};
use crate::graph::GeneratorSpec;
use crate::interdependent::SweepCoupling;
use crate::percolation::{check_grid, RemovalStrategy};
use crate::truth::{EmOptions, SynthSpec};

/// Why a scenario could not be run; each maps to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario is not valid JSON: {0}")]
    Syntax(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("run failed: {0}")]
    Runtime(#[from] crate::Error),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Syntax(_) => 2,
            ScenarioError::Invalid(_) => 3,
            ScenarioError::Runtime(_) => 1,
        }
    }
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    PercolationSweep,
    Watts,
    MotterLai,
    WeightedBeta,
    Interdependent,
    Buffering,
    Truth,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::PercolationSweep,
        ExperimentKind::Watts,
        ExperimentKind::MotterLai,
        ExperimentKind::WeightedBeta,
        ExperimentKind::Interdependent,
        ExperimentKind::Buffering,
        ExperimentKind::Truth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PercolationSweep => "percolation_sweep",
            ExperimentKind::Watts => "watts",
            ExperimentKind::MotterLai => "motter_lai",
            ExperimentKind::WeightedBeta => "weighted_beta",
            ExperimentKind::Interdependent => "interdependent",
            ExperimentKind::Buffering => "buffering",
            ExperimentKind::Truth => "truth",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

fn random() -> RemovalStrategy {
    RemovalStrategy::Random
}

fn targeted() -> RemovalStrategy {
    RemovalStrategy::TargetedStaticDegree
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercolationScenario {
    pub generator: GeneratorSpec,
    #[serde(default = "random")]
    pub strategy: RemovalStrategy,
    pub f_grid: Vec<f64>,
    /// Path-length pair budget per grid point; omit to skip path lengths.
    #[serde(default)]
    pub path_pairs: Option<usize>,
    /// Report the interpolated `f` where `S_mean` drops below this value.
    #[serde(default)]
    pub threshold_cutoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WattsScenario {
    pub generator: GeneratorSpec,
    pub phi: f64,
    #[serde(default = "one")]
    pub seed_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotterLaiScenario {
    pub generator: GeneratorSpec,
    pub alpha: f64,
    #[serde(default = "targeted")]
    pub strategy: RemovalStrategy,
    /// Fraction of nodes removed to trigger the cascade.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedBetaScenario {
    pub generator: GeneratorSpec,
    pub beta_grid: Vec<f64>,
    pub f_grid: Vec<f64>,
    pub alpha: f64,
    #[serde(default)]
    pub flow_model: FlowModel,
}

fn random_permutation() -> SweepCoupling {
    SweepCoupling::RandomPermutation
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterdependentScenario {
    pub net_a: GeneratorSpec,
    pub net_b: GeneratorSpec,
    #[serde(default = "random_permutation")]
    pub coupling: SweepCoupling,
    pub p_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BufferingScenario {
    pub n_agents: usize,
    pub n_functions: usize,
    pub versatility_grid: Vec<usize>,
    pub capacity_grid: Vec<usize>,
    pub removal_fraction: f64,
    /// Required multiplicity per function.
    pub demand: Vec<usize>,
}

/// Synthetic data parameters; the scenario seed drives the draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticClaims {
    pub n_claims: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d: f64,
}

fn level() -> f64 {
    0.95
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthScenario {
    /// Assertion CSV, relative to the scenario file.
    #[serde(default)]
    pub assertions: Option<PathBuf>,
    #[serde(default)]
    pub n_sources: Option<usize>,
    #[serde(default)]
    pub n_claims: Option<usize>,
    #[serde(default)]
    pub synthetic: Option<SyntheticClaims>,
    #[serde(default = "level")]
    pub level: f64,
    #[serde(default = "half")]
    pub threshold: f64,
    #[serde(default)]
    pub em: EmOptions,
}

impl TruthScenario {
    pub fn synth_spec(&self, seed: u64) -> Option<SynthSpec> {
        self.synthetic.as_ref().map(|s| SynthSpec { n_claims: s.n_claims, a: s.a.clone(), b: s.b.clone(), d: s.d, seed })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentSpec {
    PercolationSweep(PercolationScenario),
    Watts(WattsScenario),
    MotterLai(MotterLaiScenario),
    WeightedBeta(WeightedBetaScenario),
    Interdependent(InterdependentScenario),
    Buffering(BufferingScenario),
    Truth(TruthScenario),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub replicates: usize,
    pub output_prefix: String,
    pub spec: ExperimentSpec,
    /// Directory relative paths inside the scenario resolve against.
    pub base_dir: PathBuf,
    /// The scenario as written, echoed into the run manifest.
    pub raw: Value,
}

const TOP_LEVEL_KEYS: [&str; 4] = ["experiment", "seed", "replicates", "output_prefix"];

impl Scenario {
    pub fn from_file(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Runtime(e.into()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    /// Parses and validates a scenario document.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ScenarioError> {
        let raw: Value = serde_json::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
        let obj = raw.as_object().ok_or_else(|| invalid("top level must be a JSON object"))?;
        let name = match obj.get("experiment") {
            Some(Value::String(s)) => s.as_str(),
            Some(_) => return Err(invalid("`experiment` must be a string")),
            None => return Err(invalid("missing field `experiment`")),
        };
        let experiment = ExperimentKind::parse(name).ok_or_else(|| {
            let known: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            invalid(format!("`experiment`: unknown kind `{name}` (expected one of {})", known.join(", ")))
        })?;
        for key in obj.keys() {
            if key != experiment.name() && !TOP_LEVEL_KEYS.contains(&key.as_str()) {
                return Err(invalid(format!("unexpected field `{key}` for experiment `{name}`")));
            }
        }
        let seed = match obj.get("seed") {
            None => 0,
            Some(v) => v.as_u64().ok_or_else(|| invalid("`seed` must be a non-negative integer"))?,
        };
        let replicates = match obj.get("replicates") {
            None => 1,
            Some(v) => v.as_u64().ok_or_else(|| invalid("`replicates` must be a positive integer"))? as usize,
        };
        if replicates == 0 {
            return Err(invalid("`replicates` must be at least 1"));
        }
        let output_prefix = match obj.get("output_prefix") {
            None => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(invalid("`output_prefix` must be a string")),
        };
        if output_prefix.contains(['/', '\\']) {
            return Err(invalid("`output_prefix` must not contain path separators"));
        }
        let body = obj
            .get(experiment.name())
            .ok_or_else(|| invalid(format!("missing spec object `{}`", experiment.name())))?;
        let spec = match experiment {
            ExperimentKind::PercolationSweep => ExperimentSpec::PercolationSweep(typed(experiment, body)?),
            ExperimentKind::Watts => ExperimentSpec::Watts(typed(experiment, body)?),
            ExperimentKind::MotterLai => ExperimentSpec::MotterLai(typed(experiment, body)?),
            ExperimentKind::WeightedBeta => ExperimentSpec::WeightedBeta(typed(experiment, body)?),
            ExperimentKind::Interdependent => ExperimentSpec::Interdependent(typed(experiment, body)?),
            ExperimentKind::Buffering => ExperimentSpec::Buffering(typed(experiment, body)?),
            ExperimentKind::Truth => ExperimentSpec::Truth(typed(experiment, body)?),
        };
        let scenario = Scenario {
            experiment,
            seed,
            replicates,
            output_prefix,
            spec,
            base_dir: base_dir.to_path_buf(),
            raw,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let kind = self.experiment.name();
        let ctx = |e: crate::Error| invalid(format!("{kind}: {e}"));
        match &self.spec {
            ExperimentSpec::PercolationSweep(s) => {
                s.generator.validate().map_err(ctx)?;
                check_grid("f_grid", &s.f_grid).map_err(ctx)?;
                if let Some(c) = s.threshold_cutoff {
                    if !(c > 0.0 && c < 1.0) {
                        return Err(invalid(format!("{kind}: `threshold_cutoff` {c} outside (0, 1)")));
                    }
                }
            }
            ExperimentSpec::Watts(s) => {
                s.generator.validate().map_err(ctx)?;
                ThresholdCascadeSpec { phi: s.phi, seed_count: s.seed_count, seed: 0 }
                    .validate(s.generator.n)
                    .map_err(ctx)?;
            }
            ExperimentSpec::MotterLai(s) => {
                s.generator.validate().map_err(ctx)?;
                if !(s.alpha >= 0.0) {
                    return Err(invalid(format!("{kind}: `alpha` {} must be >= 0", s.alpha)));
                }
                if !(0.0..=1.0).contains(&s.fraction) {
                    return Err(invalid(format!("{kind}: `fraction` {} outside [0, 1]", s.fraction)));
                }
            }
            ExperimentSpec::WeightedBeta(s) => {
                s.generator.validate().map_err(ctx)?;
                check_grid("f_grid", &s.f_grid).map_err(ctx)?;
                if s.beta_grid.is_empty() || s.beta_grid.iter().any(|b| !b.is_finite()) {
                    return Err(invalid(format!("{kind}: `beta_grid` must be non-empty and finite")));
                }
                if !(s.alpha >= 0.0) {
                    return Err(invalid(format!("{kind}: `alpha` {} must be >= 0", s.alpha)));
                }
            }
            ExperimentSpec::Interdependent(s) => {
                s.net_a.validate().map_err(ctx)?;
                s.net_b.validate().map_err(ctx)?;
                check_grid("p_grid", &s.p_grid).map_err(ctx)?;
                if s.coupling != SweepCoupling::Isolated && s.net_a.n != s.net_b.n {
                    return Err(invalid(format!("{kind}: `net_a.n` and `net_b.n` differ")));
                }
            }
            ExperimentSpec::Buffering(s) => {
                if s.versatility_grid.is_empty() || s.capacity_grid.is_empty() {
                    return Err(invalid(format!("{kind}: grids must be non-empty")));
                }
                if let Some(v) = s.versatility_grid.iter().find(|&&v| v == 0 || v > s.n_functions) {
                    return Err(invalid(format!("{kind}: `versatility_grid` value {v} outside [1, n_functions]")));
                }
                if s.capacity_grid.contains(&0) {
                    return Err(invalid(format!("{kind}: `capacity_grid` values must be >= 1")));
                }
                if !(0.0..=1.0).contains(&s.removal_fraction) {
                    return Err(invalid(format!("{kind}: `removal_fraction` outside [0, 1]")));
                }
                if s.demand.len() != s.n_functions {
                    return Err(invalid(format!("{kind}: `demand` needs one entry per function")));
                }
                FunctionDemand::new(s.demand.clone()).map_err(ctx)?;
            }
            ExperimentSpec::Truth(s) => {
                if s.assertions.is_some() == s.synthetic.is_some() {
                    return Err(invalid(format!("{kind}: give exactly one of `assertions` and `synthetic`")));
                }
                if self.replicates != 1 {
                    return Err(invalid(format!("{kind}: `replicates` must be 1")));
                }
                if !(s.level > 0.0 && s.level < 1.0) {
                    return Err(invalid(format!("{kind}: `level` outside (0, 1)")));
                }
                if !(0.0..=1.0).contains(&s.threshold) {
                    return Err(invalid(format!("{kind}: `threshold` outside [0, 1]")));
                }
                if let Some(syn) = &s.synthetic {
                    if syn.a.len() != syn.b.len() || syn.a.len() < 2 || syn.n_claims < 2 {
                        return Err(invalid(format!("{kind}: `synthetic` needs matching a/b lists, >= 2 sources and >= 2 claims")));
                    }
                    let probs = syn.a.iter().chain(&syn.b).chain([&syn.d]);
                    if probs.into_iter().any(|p| !(0.0..=1.0).contains(p)) {
                        return Err(invalid(format!("{kind}: `synthetic` probabilities must lie in [0, 1]")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn typed<T: DeserializeOwned>(kind: ExperimentKind, body: &Value) -> Result<T, ScenarioError> {
    serde_json::from_value(body.clone()).map_err(|e| invalid(format!("{}: {e}", kind.name())))
}
