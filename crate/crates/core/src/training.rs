//! Episodic training: each episode simulates the trace with the learning
//! agent, runs the recorded history through the preprocessing pipeline,
//! refits the demand forecaster, and carries the Q-table into the next
//! episode.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::allocator::{PolicyKind, QAgent};
use crate::error::{Error, Result};
use crate::forecast::{self, DemandModel, TrainConfig};
use crate::pipeline::{preprocess, PipelineConfig, ProcessedDataset};
use crate::sim::{self, Mode, SimConfig};
use crate::workload::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub episodes: usize,
    /// Exploration rate for the last episode; `epsilon` decays linearly
    /// towards it. `None` keeps the table's epsilon fixed.
    pub final_epsilon: Option<f64>,
    pub pipeline: PipelineConfig,
    pub forecast: TrainConfig,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            episodes: 50,
            final_epsilon: None,
            pipeline: PipelineConfig::default(),
            forecast: TrainConfig::default(),
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.final_epsilon {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::invalid(
                    "training.final_epsilon",
                    "must be in [0, 1]",
                ));
            }
        }
        self.pipeline.window.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub epsilon: f64,
    pub mean_reward: f64,
    pub total_cost: f64,
    pub sla_violation_rate: f64,
    /// Validation MSE of the forecaster refitted after this episode.
    pub forecast_mse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingOutcome {
    pub agent: QAgent,
    pub model: Option<DemandModel>,
    /// Dataset the final forecaster was fitted on.
    pub dataset: Option<ProcessedDataset>,
    pub episodes: Vec<EpisodeSummary>,
}

fn epsilon_at(start: f64, end: Option<f64>, episode: usize, episodes: usize) -> f64 {
    match end {
        Some(end) if episodes > 1 => start + (end - start) * episode as f64 / (episodes - 1) as f64,
        Some(end) => end,
        None => start,
    }
}

/// Run `cfg.episodes` training episodes. Episode `e` explores with seed
/// `sim.seed + e`. The forecaster is refitted after every episode; if the
/// history is too short to fit one, the previous model is kept.
pub fn train_agent(
    sim: &SimConfig,
    trace: &Trace,
    agent: QAgent,
    cfg: &TrainingConfig,
) -> Result<TrainingOutcome> {
    cfg.validate()?;
    sim.validate()?;
    agent.validate()?;
    let start_eps = agent.table.params().epsilon;
    let start_seed = agent.table.params().seed;
    let mut policy = PolicyKind::QLearning(agent);
    let mut model: Option<DemandModel> = None;
    let mut dataset = None;
    let mut episodes = Vec::with_capacity(cfg.episodes);
    let mut run_cfg = sim.clone();
    for e in 0..cfg.episodes {
        let eps = epsilon_at(start_eps, cfg.final_epsilon, e, cfg.episodes);
        if let PolicyKind::QLearning(a) = &mut policy {
            a.table.set_epsilon(eps);
        }
        run_cfg.seed = sim.seed.wrapping_add(e as u64);
        let out = sim::run(&run_cfg, trace, &mut policy, model.as_ref(), Mode::Train)?;
        let w = cfg.pipeline.window;
        let refit = preprocess(&out.samples, &cfg.pipeline).and_then(|ds| {
            Ok((
                forecast::train(&ds, &cfg.forecast, w.window_len, w.horizon)?,
                ds,
            ))
        });
        let forecast_mse = match refit {
            Ok((m, ds)) => {
                let mse = m.validation_mse;
                model = Some(m);
                dataset = Some(ds);
                Some(mse)
            }
            Err(_) => None,
        };
        episodes.push(EpisodeSummary {
            episode: e,
            epsilon: eps,
            mean_reward: out.mean_reward,
            total_cost: out.report.total_cost,
            sla_violation_rate: out.report.sla_violation_rate,
            forecast_mse,
        });
    }
    let PolicyKind::QLearning(mut agent) = policy else {
        unreachable!("policy is constructed as QLearning")
    };
    agent.table.set_epsilon(start_eps);
    agent.table.reseed(start_seed);
    Ok(TrainingOutcome {
        agent,
        model,
        dataset,
        episodes,
    })
}

/// Moving average over every full window of `window` points; empty when
/// there are fewer points than that.
pub fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    values
        .windows(window.max(1))
        .map(|w| w.iter().sum::<f64>() / w.len() as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::{QTableParams, RewardWeights, StateSpace};

    #[test]
    fn epsilon_schedule() {
        assert_eq!(epsilon_at(0.3, Some(0.0), 0, 4), 0.3);
        assert!((epsilon_at(0.3, Some(0.0), 3, 4)).abs() < 1e-15);
        assert_eq!(epsilon_at(0.3, None, 3, 4), 0.3);
        assert_eq!(epsilon_at(0.3, Some(0.1), 0, 1), 0.1);
    }

    #[test]
    fn smoothing() {
        assert_eq!(smooth(&[1.0, 2.0, 3.0, 4.0], 2), alloc::vec![1.5, 2.5, 3.5]);
        assert!(smooth(&[1.0], 2).is_empty());
        assert!(smooth(&[], 10).is_empty());
    }

    #[test]
    fn zero_episodes_leave_agent_untouched() {
        let agent = QAgent::new(
            StateSpace::default(),
            QTableParams::default(),
            RewardWeights::default(),
        )
        .unwrap();
        let cfg = TrainingConfig {
            episodes: 0,
            ..TrainingConfig::default()
        };
        let sim = crate::sim::tests::config();
        let trace = Trace::new(None, Vec::new()).unwrap();
        let out = train_agent(&sim, &trace, agent.clone(), &cfg).unwrap();
        assert_eq!(out.agent, agent);
        assert!(out.model.is_none());
        assert!(out.episodes.is_empty());
    }
}
