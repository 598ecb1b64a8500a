//! Allocation policies: rule-based request routing plus the scaling
//! decision makers (tabular Q-learning agent, static and threshold baselines).

mod baseline;
mod qlearning;
mod state;

pub use baseline::ThresholdPolicy;
pub use qlearning::{compute_reward, QAgent, QTable, QTableParams, RewardInputs, RewardWeights};
pub use state::{StateCode, StateSpace};

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{CloudTier, RequestClass, ServiceRequest, TierKind};

/// Where an arriving request goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Private,
    Public,
    Reject,
}

impl From<TierKind> for Route {
    fn from(k: TierKind) -> Self {
        match k {
            TierKind::Private => Route::Private,
            TierKind::Public => Route::Public,
        }
    }
}

/// Sensitive work runs privately or not at all; scalable work prefers the
/// private tier and spills to the public one.
pub fn route_request(r: &ServiceRequest, private: &CloudTier, public: &CloudTier) -> Route {
    if private.can_host(&r.demand) {
        return Route::Private;
    }
    match r.class {
        RequestClass::Sensitive => Route::Reject,
        RequestClass::Scalable if public.can_host(&r.demand) => Route::Public,
        RequestClass::Scalable => Route::Reject,
    }
}

/// Public-tier scaling action. Index order (used for tie-breaking) is
/// `Hold = 0`, `ScaleUpPublic = 1`, `ScaleDownPublic = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleAction {
    Hold,
    ScaleUpPublic,
    ScaleDownPublic,
}

impl ScaleAction {
    pub const ALL: [ScaleAction; 3] = [
        ScaleAction::Hold,
        ScaleAction::ScaleUpPublic,
        ScaleAction::ScaleDownPublic,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScaleAction::Hold => "hold",
            ScaleAction::ScaleUpPublic => "scale_up",
            ScaleAction::ScaleDownPublic => "scale_down",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == s)
    }
}

impl fmt::Display for ScaleAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An action plus how many instance units it moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub action: ScaleAction,
    pub units: u32,
}

impl Decision {
    pub const HOLD: Decision = Decision {
        action: ScaleAction::Hold,
        units: 0,
    };

    pub fn single(action: ScaleAction) -> Self {
        Decision {
            action,
            units: u32::from(action != ScaleAction::Hold),
        }
    }
}

/// Scaling policies compared by the harness.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum PolicyKind {
    QLearning(QAgent),
    /// Fixed public capacity, provisioned up front, never changed.
    Static {
        units: u32,
    },
    Threshold(ThresholdPolicy),
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::QLearning(_) => "q_learning",
            PolicyKind::Static { .. } => "static",
            PolicyKind::Threshold(_) => "threshold",
        }
    }
}

/// The static baseline never scales.
pub fn static_step() -> ScaleAction {
    ScaleAction::Hold
}
