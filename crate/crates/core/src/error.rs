use thiserror::Error;

/// Errors raised while building or analysing a model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("transition rate must be positive and finite, got {rate} for {from}->{to}")]
    NonPositiveRate { from: usize, to: usize, rate: f64 },
    #[error("self-loop transition on state {0}")]
    SelfLoop(usize),
    #[error("state index {index} out of range for {n_states} states")]
    StateOutOfRange { index: usize, n_states: usize },
    #[error("generator must have at least one state")]
    EmptyChain,
    #[error("generator is invalid: {0}")]
    InvalidGenerator(String),
    #[error("chain is reducible: state {unreachable} cannot be reached from state 0 or cannot reach it")]
    Reducible { unreachable: usize },
    #[error("linear solve failed: {0}")]
    SingularSystem(String),
    #[error("state space of {count} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { count: u128, cap: usize },
    #[error("invalid VNF specification: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("probability must be finite and non-negative, got {0}")]
    InvalidProbability(f64),
    #[error("composition needs at least one distribution")]
    EmptyComposition,
    #[error("redundancy vector {0}")]
    InvalidRedundancy(String),
    #[error("search space of {size} configurations exceeds the guard of {guard}")]
    SearchSpaceTooLarge { size: u128, guard: u128 },
    #[error("availability target must lie in (0, 1), got {0}")]
    InvalidTarget(f64),
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("target {target} is not bracketed in [{low:e}, {high:e}] per second")]
    NotBracketed { target: f64, low: f64, high: f64 },
    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
