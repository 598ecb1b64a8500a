use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ScaleAction, StateSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QTableParams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for QTableParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.9,
            epsilon: 0.1,
            seed: 0,
        }
    }
}

impl QTableParams {
    pub fn validate(&self) -> Result<()> {
        // alpha = 0 is allowed: it freezes the table, which evaluation relies on.
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid("alpha", "must be in [0, 1]"));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::invalid("gamma", "must be in [0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::invalid("epsilon", "must be in [0, 1]"));
        }
        Ok(())
    }
}

/// Dense `states x actions` value table with epsilon-greedy selection.
///
/// Exploration draws come from a ChaCha8 stream keyed by `seed`, so runs
/// replay exactly on every platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "QTableData", try_from = "QTableData")]
pub struct QTable {
    states: usize,
    actions: usize,
    values: Vec<f64>,
    params: QTableParams,
    rng: ChaCha8Rng,
}

/// Serialized form: dimensions, hyperparameters, seed and row-major values.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct QTableData {
    states: usize,
    actions: usize,
    alpha: f64,
    gamma: f64,
    epsilon: f64,
    seed: u64,
    values: Vec<f64>,
}

impl From<QTable> for QTableData {
    fn from(q: QTable) -> Self {
        QTableData {
            states: q.states,
            actions: q.actions,
            alpha: q.params.alpha,
            gamma: q.params.gamma,
            epsilon: q.params.epsilon,
            seed: q.params.seed,
            values: q.values,
        }
    }
}

impl TryFrom<QTableData> for QTable {
    type Error = Error;

    fn try_from(d: QTableData) -> Result<Self> {
        let params = QTableParams {
            alpha: d.alpha,
            gamma: d.gamma,
            epsilon: d.epsilon,
            seed: d.seed,
        };
        let mut q = QTable::new(d.states, d.actions, params)?;
        if d.values.len() != q.values.len() {
            return Err(Error::DimensionMismatch {
                expected: q.values.len(),
                got: d.values.len(),
            });
        }
        if d.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "must all be finite"));
        }
        q.values = d.values;
        Ok(q)
    }
}

impl QTable {
    pub fn new(states: usize, actions: usize, params: QTableParams) -> Result<Self> {
        params.validate()?;
        if states == 0 || actions == 0 {
            return Err(Error::invalid(
                "dimensions",
                "need at least one state and one action",
            ));
        }
        Ok(Self {
            states,
            actions,
            values: vec![0.0; states * actions],
            params,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn params(&self) -> &QTableParams {
        &self.params
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.values[state * self.actions..(state + 1) * self.actions]
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.actions + action]
    }

    pub fn set(&mut self, state: usize, action: usize, v: f64) {
        self.values[state * self.actions + action] = v;
    }

    pub fn set_epsilon(&mut self, epsilon: f64) {
        self.params.epsilon = epsilon.clamp(0.0, 1.0);
    }

    /// Restart the exploration stream from `seed`.
    pub fn reseed(&mut self, seed: u64) {
        self.params.seed = seed;
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    /// Highest-valued action; ties go to the lowest index.
    pub fn greedy(&self, state: usize) -> usize {
        let row = self.row(state);
        let mut best = 0;
        for (a, v) in row.iter().enumerate().skip(1) {
            if *v > row[best] {
                best = a;
            }
        }
        best
    }

    /// Epsilon-greedy choice. With epsilon = 0 no random numbers are drawn.
    pub fn choose(&mut self, state: usize) -> usize {
        let eps = self.params.epsilon;
        if eps > 0.0 && self.rng.random::<f64>() < eps {
            return self.rng.random_range(0..self.actions);
        }
        self.greedy(state)
    }

    /// `Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))`.
    pub fn update(
        &mut self,
        state: usize,
        action: usize,
        reward: f64,
        next_state: usize,
    ) -> Result<()> {
        if !reward.is_finite() {
            return Err(Error::NonFiniteReward(reward));
        }
        let best_next = self
            .row(next_state)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let q = self.get(state, action);
        let updated = q + self.params.alpha * (reward + self.params.gamma * best_next - q);
        self.set(state, action, updated);
        Ok(())
    }
}

/// Weights of the per-tick reward terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardWeights {
    pub cost: f64,
    pub latency: f64,
    pub sla: f64,
    pub util: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            cost: 1.0,
            latency: 1.0,
            sla: 5.0,
            util: 0.5,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<()> {
        let w = [self.cost, self.latency, self.sla, self.util];
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("reward", "weights must be finite and >= 0"));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(Error::invalid("reward", "at least one weight must be > 0"));
        }
        Ok(())
    }
}

/// What happened during one tick, as seen by the reward.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RewardInputs {
    pub tick_cost: f64,
    pub mean_latency: f64,
    pub latency_target: f64,
    pub sla_violations: u64,
    pub served: u64,
    pub mean_util: f64,
}

/// `-w_cost*cost - w_lat*max(0, lat/target - 1) - w_sla*violations/max(served,1) + w_util*util`.
pub fn compute_reward(w: &RewardWeights, x: &RewardInputs) -> f64 {
    let latency_excess = if x.latency_target > 0.0 {
        (x.mean_latency / x.latency_target - 1.0).max(0.0)
    } else {
        0.0
    };
    let violation_rate = x.sla_violations as f64 / x.served.max(1) as f64;
    -w.cost * x.tick_cost - w.latency * latency_excess - w.sla * violation_rate
        + w.util * x.mean_util
}

/// A Q-learning scaling agent: table, observation layout and reward weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAgent {
    pub table: QTable,
    pub space: StateSpace,
    pub reward: RewardWeights,
}

impl QAgent {
    pub fn new(space: StateSpace, params: QTableParams, reward: RewardWeights) -> Result<Self> {
        space.validate()?;
        reward.validate()?;
        let table = QTable::new(space.state_count(), ScaleAction::ALL.len(), params)?;
        Ok(Self {
            table,
            space,
            reward,
        })
    }

    /// Check that a (possibly deserialized) agent is self-consistent.
    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        self.reward.validate()?;
        if self.table.states() != self.space.state_count()
            || self.table.actions() != ScaleAction::ALL.len()
        {
            return Err(Error::DimensionMismatch {
                expected: self.space.state_count() * ScaleAction::ALL.len(),
                got: self.table.states() * self.table.actions(),
            });
        }
        Ok(())
    }
}
