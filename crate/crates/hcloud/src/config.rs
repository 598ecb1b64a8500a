//! Declarative experiment document.
//!
//! Relative paths inside a config resolve against the config file's
//! directory. [`Experiment::load`] parses and validates everything, and
//! loads every referenced input, before anything runs.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use hcloud_core::allocator::{
    PolicyKind, QAgent, QTable, QTableParams, RewardWeights, StateSpace, ThresholdPolicy,
};
use hcloud_core::forecast::DemandModel;
use hcloud_core::sim::SimConfig;
use hcloud_core::training::TrainingConfig;
use hcloud_core::workload::{generate_trace, Trace, WorkloadSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::formats::{load_trace, read_json};

/// Where requests come from: a spec to generate from, a trace file, or both
/// (the spec then only supplies provenance and the horizon).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSource {
    #[serde(default)]
    pub spec: Option<PathBuf>,
    #[serde(default)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Static {
        units: u32,
    },
    Threshold {
        upper: f64,
        lower: f64,
        step: u32,
        cooldown: f64,
    },
    /// Loads a saved table (and optionally a forecaster); without `qtable`
    /// the agent is trained in-process from the experiment's settings.
    QLearning {
        #[serde(default)]
        qtable: Option<PathBuf>,
        #[serde(default)]
        forecaster: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub name: String,
    #[serde(flatten)]
    pub policy: PolicySpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub state_space: StateSpace,
    pub params: QTableParams,
    pub reward: RewardWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub workload: WorkloadSource,
    /// Base-load workload for the scalability ratio in comparisons.
    #[serde(default)]
    pub base_workload: Option<WorkloadSource>,
    pub sim: SimConfig,
    #[serde(default)]
    pub agent: AgentConfig,
    #[serde(default)]
    pub training: TrainingConfig,
    pub policies: Vec<RosterEntry>,
    /// Exploration seed; overrides `sim.seed` and `agent.params.seed`.
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A ready-to-run policy.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Prepared {
    Fixed(PolicyKind),
    Learned {
        agent: QAgent,
        model: Option<DemandModel>,
    },
    /// Q-learning agent still to be trained from the experiment settings.
    Untrained,
}

/// A fully loaded and validated experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub trace: Trace,
    pub base_trace: Option<Trace>,
    pub roster: Vec<(String, Prepared)>,
    pub output_dir: PathBuf,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn load_spec(path: &Path) -> Result<WorkloadSpec> {
    let spec: WorkloadSpec = read_json(path)?;
    spec.validate()
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    Ok(spec)
}

fn load_workload(base: &Path, src: &WorkloadSource, what: &str) -> Result<Trace> {
    let spec = src
        .spec
        .as_ref()
        .map(|p| load_spec(&resolve(base, p)))
        .transpose()?;
    match (&src.trace, spec) {
        (Some(t), spec) => load_trace(&resolve(base, t), spec),
        (None, Some(spec)) => Ok(generate_trace(&spec)?),
        (None, None) => Err(CliError::invalid(format!(
            "{what}: needs `spec` or `trace`"
        ))),
    }
}

impl ExperimentConfig {
    /// Checks that need no file access.
    pub fn validate(&self) -> Result<()> {
        fn ctx(section: &str) -> impl Fn(hcloud_core::Error) -> CliError + '_ {
            move |e| CliError::invalid(format!("{section}: {e}"))
        }
        self.sim.validate().map_err(ctx("sim"))?;
        self.agent
            .state_space
            .validate()
            .map_err(ctx("agent.state_space"))?;
        self.agent.params.validate().map_err(ctx("agent.params"))?;
        self.agent.reward.validate().map_err(ctx("agent.reward"))?;
        self.training.validate().map_err(ctx("training"))?;
        if self.policies.is_empty() {
            return Err(CliError::invalid("policies: roster is empty"));
        }
        let mut names = BTreeSet::new();
        for (i, p) in self.policies.iter().enumerate() {
            if p.name.trim().is_empty() {
                return Err(CliError::invalid(format!(
                    "policies[{i}].name: must not be empty"
                )));
            }
            if !names.insert(p.name.as_str()) {
                return Err(CliError::invalid(format!(
                    "policies[{i}].name: duplicate `{}`",
                    p.name
                )));
            }
            match &p.policy {
                PolicySpec::Threshold {
                    upper,
                    lower,
                    step,
                    cooldown,
                } => {
                    ThresholdPolicy::new(*upper, *lower, *step, *cooldown)
                        .map_err(ctx(&format!("policies[{i}]")))?;
                }
                PolicySpec::Static { units } if *units > self.sim.public.max_units => {
                    return Err(CliError::invalid(format!(
                        "policies[{i}].units: {units} exceeds sim.public.max_units"
                    )));
                }
                PolicySpec::QLearning {
                    qtable: None,
                    forecaster: Some(_),
                } => {
                    return Err(CliError::invalid(format!(
                        "policies[{i}].forecaster: only allowed together with `qtable`"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The simulator settings with the experiment seed applied.
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            seed: self.seed,
            ..self.sim.clone()
        }
    }

    /// A fresh, zero-initialized agent.
    pub fn new_agent(&self) -> Result<QAgent> {
        let params = QTableParams {
            seed: self.seed,
            ..self.agent.params
        };
        Ok(QAgent::new(
            self.agent.state_space.clone(),
            params,
            self.agent.reward,
        )?)
    }
}

impl Experiment {
    /// Parse `path`, apply an optional seed override, validate, and load all
    /// referenced traces and models.
    pub fn load(path: &Path, seed: Option<u64>) -> Result<Self> {
        let mut config: ExperimentConfig = read_json(path)?;
        if let Some(s) = seed {
            config.seed = s;
        }
        config.validate()?;
        let base = path.parent().unwrap_or(Path::new(""));
        let trace = load_workload(base, &config.workload, "workload")?;
        let base_trace = config
            .base_workload
            .as_ref()
            .map(|w| load_workload(base, w, "base_workload"))
            .transpose()?;
        let mut roster = Vec::with_capacity(config.policies.len());
        for entry in &config.policies {
            let prepared = match &entry.policy {
                PolicySpec::Static { units } => {
                    Prepared::Fixed(PolicyKind::Static { units: *units })
                }
                PolicySpec::Threshold {
                    upper,
                    lower,
                    step,
                    cooldown,
                } => Prepared::Fixed(PolicyKind::Threshold(ThresholdPolicy::new(
                    *upper, *lower, *step, *cooldown,
                )?)),
                PolicySpec::QLearning { qtable: None, .. } => Prepared::Untrained,
                PolicySpec::QLearning {
                    qtable: Some(q),
                    forecaster,
                } => {
                    let qpath = resolve(base, q);
                    let table: QTable = read_json(&qpath)?;
                    let agent = QAgent {
                        table,
                        space: config.agent.state_space.clone(),
                        reward: config.agent.reward,
                    };
                    agent
                        .validate()
                        .map_err(|e| CliError::invalid(format!("{}: {e}", qpath.display())))?;
                    let model = forecaster
                        .as_ref()
                        .map(|f| read_json::<DemandModel>(&resolve(base, f)))
                        .transpose()?;
                    Prepared::Learned { agent, model }
                }
            };
            roster.push((entry.name.clone(), prepared));
        }
        let output_dir = resolve(base, &config.output_dir);
        Ok(Experiment {
            config,
            trace,
            base_trace,
            roster,
            output_dir,
        })
    }
}
