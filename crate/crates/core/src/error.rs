use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),
    #[error("no capacity reaches rate {0}")]
    NoCapacity(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid code spec: `{field}` {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("symbol needs message bits up to {needed}, only {available} available")]
    NeedMoreMessage { needed: usize, available: usize },
    #[error("transmitter {k} or time {i} out of range")]
    InvalidCoordinate { k: usize, i: u64 },
    #[error("decoder received an inconsistent equation from transmitter {k} at time {i}")]
    Inconsistent { k: usize, i: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
