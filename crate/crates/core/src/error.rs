use thiserror::Error;

use crate::numerics::Rational;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    /// Input outside the domain of a partial operation (non-dyadic, out of `[0,1)`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error{}: {message}", entry.map(|i| format!(" in entry {i}")).unwrap_or_default())]
    Config { entry: Option<usize>, message: String },

    /// The approximation reached its limit, so `limit - a_n` is zero.
    #[error("degenerate approximation: {real} reaches its limit at index {index}")]
    DegenerateApproximation { real: String, index: u64 },

    #[error("search exhausted: no index up to {cap} exceeds the target for i = {index}")]
    SearchExhausted { index: u64, cap: u64 },

    #[error("degenerate witness: no positive value alpha - f(0.sigma) at length {length}")]
    WitnessDegenerate { length: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("prefix violation ({prefix}, {extension})")]
    PrefixViolation { prefix: String, extension: String },

    #[error("duplicate code {0}")]
    DuplicateCode(String),

    #[error("construction error at code {code}: f(0.sigma) = {value} is outside [0,1)")]
    Construction { code: String, value: Rational },

    #[error("set {set} has no member >= {from} within its certified range")]
    FiniteSet { set: String, from: u64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl LabError {
    pub fn config(message: impl Into<String>) -> Self {
        LabError::Config {
            entry: None,
            message: message.into(),
        }
    }

    pub(crate) fn at_entry(self, index: usize) -> Self {
        match self {
            LabError::Config { message, .. } => LabError::Config {
                entry: Some(index),
                message,
            },
            other => LabError::Config {
                entry: Some(index),
                message: other.to_string(),
            },
        }
    }
}

impl From<serde_json::Error> for LabError {
    fn from(err: serde_json::Error) -> Self {
        LabError::Parse(err.to_string())
    }
}
