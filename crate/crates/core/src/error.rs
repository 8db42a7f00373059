use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("channel is not symmetric: {0}")]
    Asymmetric(String),

    #[error("construction infeasible: {reason} (needed {needed}, available {available}, deficit {deficit})")]
    Infeasible {
        reason: String,
        needed: usize,
        available: usize,
        deficit: usize,
    },

    #[error("rate pair outside the rate-equivocation region: {0}")]
    RegionViolation(String),

    #[error("exhaustive oracle refused: blocklength {n} exceeds limit {limit}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("oracle disagreement: {0}")]
    OracleMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
