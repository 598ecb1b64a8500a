use serde::{Deserialize, Serialize};

use super::{Decision, ScaleAction};
use crate::error::{Error, Result};

/// Reactive autoscaler with a utilization dead band and a cooldown.
///
/// The hybrid counts as saturated only when both tiers are, so the combined
/// utilization is `min(private, public)`, with an empty public tier treated
/// as fully used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub upper: f64,
    pub lower: f64,
    /// Instance units added or removed per action.
    pub step: u32,
    /// Seconds that must pass after an action before the next one.
    pub cooldown: f64,
    #[serde(skip)]
    last_action: Option<f64>,
}

impl ThresholdPolicy {
    pub fn new(upper: f64, lower: f64, step: u32, cooldown: f64) -> Result<Self> {
        let p = Self {
            upper,
            lower,
            step,
            cooldown,
            last_action: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.lower && self.lower < self.upper && self.upper <= 1.0) {
            return Err(Error::invalid("threshold", "need 0 <= lower < upper <= 1"));
        }
        if self.step == 0 {
            return Err(Error::invalid("threshold.step", "must be >= 1"));
        }
        if !(self.cooldown.is_finite() && self.cooldown >= 0.0) {
            return Err(Error::invalid("threshold.cooldown", "must be >= 0"));
        }
        Ok(())
    }

    /// Forget the cooldown timer (start of a new run).
    pub fn reset(&mut self) {
        self.last_action = None;
    }

    /// `public_util` is `None` while no public capacity is provisioned.
    pub fn step(&mut self, private_util: f64, public_util: Option<f64>, clock: f64) -> Decision {
        let combined = private_util.min(public_util.unwrap_or(1.0));
        let ready = self.last_action.is_none_or(|t| clock - t >= self.cooldown);
        let action = if !ready {
            ScaleAction::Hold
        } else if combined > self.upper {
            ScaleAction::ScaleUpPublic
        } else if combined < self.lower {
            ScaleAction::ScaleDownPublic
        } else {
            ScaleAction::Hold
        };
        if action == ScaleAction::Hold {
            return Decision::HOLD;
        }
        self.last_action = Some(clock);
        Decision {
            action,
            units: self.step,
        }
    }
}
