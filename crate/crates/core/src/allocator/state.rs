use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discretized observation fed to the Q-table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateCode {
    pub private_util: usize,
    pub public_util: usize,
    pub forecast: usize,
    pub queue: usize,
}

/// Bucket layout of the observation space. All bins are half-open `[a, b)`;
/// anything at or beyond the last edge lands in the top bucket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StateSpace {
    /// Uniform buckets over utilization in `[0, 1]`.
    pub util_buckets: usize,
    /// Uniform buckets over forecast load in `[0, forecast_ceiling]`.
    pub forecast_buckets: usize,
    pub forecast_ceiling: f64,
    /// Ascending queue-length edges; `n` edges give `n + 1` buckets.
    pub queue_edges: Vec<usize>,
}

impl Default for StateSpace {
    fn default() -> Self {
        Self {
            util_buckets: 5,
            forecast_buckets: 3,
            forecast_ceiling: 1.5,
            queue_edges: vec![1, 20],
        }
    }
}

fn uniform_bucket(x: f64, buckets: usize, ceiling: f64) -> usize {
    // Count edges k * ceiling / n (k = 1..n-1) that are <= x.
    (1..buckets)
        .take_while(|&k| x >= ceiling * k as f64 / buckets as f64)
        .count()
}

impl StateSpace {
    pub fn validate(&self) -> Result<()> {
        if self.util_buckets == 0 || self.forecast_buckets == 0 {
            return Err(Error::invalid("state_space", "bucket counts must be >= 1"));
        }
        if !(self.forecast_ceiling.is_finite() && self.forecast_ceiling > 0.0) {
            return Err(Error::invalid(
                "state_space.forecast_ceiling",
                "must be > 0",
            ));
        }
        if self.queue_edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "state_space.queue_edges",
                "must be strictly ascending",
            ));
        }
        Ok(())
    }

    pub fn queue_buckets(&self) -> usize {
        self.queue_edges.len() + 1
    }

    pub fn state_count(&self) -> usize {
        self.util_buckets * self.util_buckets * self.forecast_buckets * self.queue_buckets()
    }

    pub fn encode(
        &self,
        private_util: f64,
        public_util: f64,
        forecast: f64,
        queue_len: usize,
    ) -> StateCode {
        StateCode {
            private_util: uniform_bucket(private_util, self.util_buckets, 1.0),
            public_util: uniform_bucket(public_util, self.util_buckets, 1.0),
            forecast: uniform_bucket(forecast, self.forecast_buckets, self.forecast_ceiling),
            queue: self
                .queue_edges
                .iter()
                .take_while(|&&e| queue_len >= e)
                .count(),
        }
    }

    /// Row-major index: private, public, forecast, queue.
    pub fn index(&self, s: &StateCode) -> usize {
        ((s.private_util * self.util_buckets + s.public_util) * self.forecast_buckets + s.forecast)
            * self.queue_buckets()
            + s.queue
    }
}
