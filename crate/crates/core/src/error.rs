use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// The point lies on a stratum where the Hamiltonian is not differentiable.
    #[error("point on a nonsmooth stratum (indices {indices:?})")]
    Stratum { indices: Vec<usize> },

    #[error("no turning event within guard time {guard}")]
    Runaway { guard: f64 },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("data corruption: {0}")]
    DataCorruption(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::NumericFailure(msg.into())
    }
}
