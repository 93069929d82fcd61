use thiserror::Error;

/// Error type shared by all library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The request would exceed a documented resource cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A prime table does not cover the scales a computation needs.
    #[error("insufficient prime table: {0}")]
    Coverage(String),

    /// An internal cross-check failed; indicates a bug, not bad input.
    #[error("internal consistency: {0}")]
    Internal(String),

    /// A prime cache stream is malformed or from an incompatible version.
    #[error("cache format: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
