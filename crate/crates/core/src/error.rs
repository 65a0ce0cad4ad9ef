use thiserror::Error;

use crate::capacity::CapacityViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a state space needs between 1 and {max} states, got {got}")]
    StateCount { got: usize, max: usize },

    #[error("state names must be non-empty")]
    EmptyStateName,

    #[error("duplicate state name {0:?}")]
    DuplicateState(String),

    #[error("unknown state {0:?}")]
    UnknownState(String),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("value at position {index} is not finite")]
    NonFinite { index: usize },

    #[error("operands live on different state spaces")]
    SpaceMismatch,

    #[error("strike must be non-negative, got {0}")]
    NegativeStrike(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid capacity: {}", format_violations(.0))]
    InvalidCapacity(Vec<CapacityViolation>),

    #[error("{what} supports at most {max} states, got {got}")]
    Budget {
        what: &'static str,
        got: usize,
        max: usize,
    },

    #[error("solver could not decide within tolerance: {0}")]
    SolverTolerance(String),

    #[error("{0}")]
    Logic(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-contract input, as
    /// opposed to solver or internal failures.
    pub fn is_input(&self) -> bool {
        !matches!(self, Error::SolverTolerance(_) | Error::Logic(_))
    }
}

fn format_violations(violations: &[CapacityViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
