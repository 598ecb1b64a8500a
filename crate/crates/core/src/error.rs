use alloc::string::String;

/// Errors produced by the simulator core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A configuration or input value violates its contract. `field` names the offender.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("resource subtraction would go negative in {dimension}")]
    NegativeResource { dimension: &'static str },

    #[error("degenerate normalization range (min = max = {value})")]
    DegenerateRange { value: f64 },

    #[error("input too short: need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite reward {0}")]
    NonFiniteReward(f64),

    #[error("{quantity} must be positive, got {value}")]
    NonPositive { quantity: &'static str, value: f64 },

    #[error("empty {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
