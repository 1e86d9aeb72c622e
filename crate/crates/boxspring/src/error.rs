use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by parameter construction and the simulation entry points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A precondition on a parameter, plan or argument was violated.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    /// Requested drop count is above the supported maximum of 2^32.
    #[error("drop count {0} exceeds the supported maximum of 2^32")]
    DropCountOverflow(u64),
}
