//! Versioned scenario files and their resolution into runnable setups.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::belief::{BoundedLikelihood, FiniteBelief, ParameterSet};
use crate::error::{Error, Result};
use crate::gaussian::GaussianBelief;
use crate::graph::ValidationReport;
use crate::models::{TabularLabeler, TabularModel};
use crate::sim::partition::{
    partition_features, partition_finite, uncovered_classes, FeatureDesign, FeatureLaw, FeaturePartition,
    FinitePartition,
};
use crate::sim::topology::{build_topology, Topology, TopologySpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub rounds: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub topology: TopologySpec,
    pub model: ModelSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    Finite,
    Gaussian,
}

impl std::str::FromStr for EngineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite" => Ok(EngineKind::Finite),
            "gaussian" => Ok(EngineKind::Gaussian),
            other => Err(Error::Config(format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "kebab-case")]
pub enum ModelSpec {
    Finite(FiniteSpec),
    Gaussian(RegressionSpec),
}

impl ModelSpec {
    pub fn engine(&self) -> EngineKind {
        match self {
            ModelSpec::Finite(_) => EngineKind::Finite,
            ModelSpec::Gaussian(_) => EngineKind::Gaussian,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clamp {
    pub floor: f64,
    pub ceiling: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpec {
    pub family: FiniteFamily,
    /// Index of the parameter that generates labels, and whose belief is
    /// tracked.
    pub truth: usize,
    /// True label law `P(y | x)`, one row per input. Overrides the truth
    /// parameter's rows, which makes the model misspecified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_law: Option<Vec<Vec<f64>>>,
    pub clamp: Clamp,
    /// Global input law `P_X`; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_weights: Option<Vec<f64>>,
    pub partition: FinitePartition,
    /// Prior probabilities; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FiniteFamily {
    /// `table[θ][x][y]`.
    Table {
        parameters: Vec<String>,
        table: Vec<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input_class: Option<Vec<usize>>,
    },
    /// `success[θ][x] = P(y = 1 | θ, x)`.
    Binary {
        parameters: Vec<String>,
        success: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input_class: Option<Vec<usize>>,
    },
    /// See [`TabularModel::softmax_classifier`].
    Softmax {
        classes: usize,
        sharpness: f64,
        confusions: Vec<(usize, usize)>,
    },
}

impl FiniteFamily {
    pub fn build(&self) -> Result<TabularModel> {
        match self {
            FiniteFamily::Table {
                parameters,
                table,
                input_class,
            } => with_classes(TabularModel::new(ParameterSet::new(parameters.clone())?, table.clone())?, input_class),
            FiniteFamily::Binary {
                parameters,
                success,
                input_class,
            } => with_classes(
                TabularModel::binary(ParameterSet::new(parameters.clone())?, success.clone())?,
                input_class,
            ),
            FiniteFamily::Softmax {
                classes,
                sharpness,
                confusions,
            } => TabularModel::softmax_classifier(*classes, *sharpness, confusions),
        }
    }
}

fn with_classes(model: TabularModel, classes: &Option<Vec<usize>>) -> Result<TabularModel> {
    match classes {
        Some(c) => model.with_input_classes(c.clone()),
        None => Ok(model),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub theta_star: Vec<f64>,
    pub noise_std: f64,
    /// Diagonal of the prior covariance (prior mean is zero).
    pub prior_variance: Vec<f64>,
    pub design: FeatureDesign,
    pub partition: FeaturePartition,
    pub test_points: usize,
}

/// Everything the finite engine needs, resolved and checked.
#[derive(Clone, Debug)]
pub struct FiniteSetup {
    pub likelihood: BoundedLikelihood<TabularModel>,
    pub truth: TabularLabeler,
    pub truth_index: usize,
    pub global_inputs: Vec<f64>,
    pub agent_inputs: Vec<Vec<f64>>,
    pub prior: FiniteBelief,
}

impl FiniteSetup {
    pub fn params(&self) -> &ParameterSet {
        self.likelihood.model().params()
    }
}

#[derive(Clone, Debug)]
pub struct RegressionSetup {
    pub theta_star: Vec<f64>,
    pub noise_std: f64,
    pub prior: GaussianBelief,
    pub design: FeatureDesign,
    pub agent_laws: Vec<FeatureLaw>,
    pub test_points: usize,
}

#[derive(Clone, Debug)]
pub enum Setup {
    Finite(FiniteSetup),
    Gaussian(RegressionSetup),
}

/// Result of [`Scenario::validate`]: graph diagnostics plus data-coverage
/// warnings that put global learnability at risk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub graph: Option<ValidationReport>,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if scenario.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                scenario.schema_version
            )));
        }
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_toml_str(&text)
    }

    pub fn engine(&self) -> EngineKind {
        self.model.engine()
    }

    pub fn topology(&self) -> Result<Topology> {
        build_topology(&self.topology)
    }

    /// Builds the topology and engine setup, failing on any invalid piece.
    pub fn resolve(&self) -> Result<(Topology, Setup)> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        let topology = self.topology()?;
        let n = topology.n_agents();
        if let Topology::Static(w) = &topology {
            // single agents are trivially irreducible
            w.ensure_valid()?;
        }
        let setup = match &self.model {
            ModelSpec::Finite(spec) => Setup::Finite(resolve_finite(spec, n)?),
            ModelSpec::Gaussian(spec) => Setup::Gaussian(resolve_regression(spec, n)?),
        };
        Ok((topology, setup))
    }

    /// Like [`Scenario::resolve`] but collects diagnostics instead of stopping
    /// at the first graph problem.
    pub fn validate(&self) -> Result<ScenarioReport> {
        let topology = self.topology()?;
        let graph = topology.as_static().map(|w| w.validate());
        if let Some(report) = &graph {
            if !report.is_valid() {
                return Err(Error::InvalidGraph(report.clone()));
            }
        }
        let (_, setup) = self.resolve()?;
        let mut warnings = Vec::new();
        if let Setup::Finite(f) = &setup {
            let missing = uncovered_classes(&f.global_inputs, f.likelihood.model().input_classes(), &f.agent_inputs);
            if !missing.is_empty() {
                warnings.push(format!(
                    "classes {missing:?} are observed by no agent; global learnability is at risk"
                ));
            }
        }
        Ok(ScenarioReport { graph, warnings })
    }
}

fn resolve_finite(spec: &FiniteSpec, n_agents: usize) -> Result<FiniteSetup> {
    let model = spec.family.build()?;
    if spec.truth >= model.params().len() {
        return Err(Error::Config(format!(
            "truth index {} is outside the {} parameters",
            spec.truth,
            model.params().len()
        )));
    }
    let (lo, hi) = (model.min_entry(), model.max_entry());
    if spec.clamp.floor > lo || spec.clamp.ceiling < hi {
        log::warn!(
            "clamp [{}, {}] cuts into likelihood range [{lo}, {hi}]",
            spec.clamp.floor,
            spec.clamp.ceiling
        );
    }
    let truth = match &spec.label_law {
        Some(rows) => {
            if rows.len() != model.n_inputs() || rows.iter().any(|r| r.len() != model.n_labels()) {
                return Err(Error::Config(format!(
                    "label_law must have {} rows of {} probabilities",
                    model.n_inputs(),
                    model.n_labels()
                )));
            }
            TabularLabeler::new(rows.clone())?
        }
        None => model.labeler(spec.truth),
    };
    let global_inputs = match &spec.input_weights {
        Some(w) => {
            let total: f64 = w.iter().sum();
            if w.len() != model.n_inputs() || !(total > 0.0) || w.iter().any(|x| *x < 0.0) {
                return Err(Error::Config("input_weights must be a nonnegative vector per input".into()));
            }
            w.iter().map(|x| x / total).collect()
        }
        None => vec![1.0 / model.n_inputs() as f64; model.n_inputs()],
    };
    let agent_inputs = partition_finite(&global_inputs, model.input_classes(), &spec.partition, n_agents)?;
    let prior = match &spec.prior {
        Some(p) if p.len() != model.params().len() => {
            return Err(Error::Config(format!("prior has {} entries", p.len())));
        }
        Some(p) => FiniteBelief::from_probs(p)?,
        None => FiniteBelief::uniform(model.params().len()),
    };
    let likelihood = BoundedLikelihood::new(model, spec.clamp.floor, spec.clamp.ceiling)?;
    Ok(FiniteSetup {
        likelihood,
        truth,
        truth_index: spec.truth,
        global_inputs,
        agent_inputs,
        prior,
    })
}

fn resolve_regression(spec: &RegressionSpec, n_agents: usize) -> Result<RegressionSetup> {
    let d = spec.design.dim;
    if spec.theta_star.len() != d || spec.prior_variance.len() != d {
        return Err(Error::Config(format!(
            "theta_star ({}) and prior_variance ({}) must both have dimension {d}",
            spec.theta_star.len(),
            spec.prior_variance.len()
        )));
    }
    if !(spec.noise_std > 0.0) {
        return Err(Error::Config("noise_std must be positive".into()));
    }
    if spec.test_points == 0 {
        return Err(Error::Config("test_points must be positive".into()));
    }
    let agent_laws = partition_features(&spec.design, spec.partition, n_agents)?;
    Ok(RegressionSetup {
        theta_star: spec.theta_star.clone(),
        noise_std: spec.noise_std,
        prior: GaussianBelief::diagonal(vec![0.0; d], &spec.prior_variance)?,
        design: spec.design.clone(),
        agent_laws,
        test_points: spec.test_points,
    })
}
