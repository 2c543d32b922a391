use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: expected n={expected_n}, L={expected_l}; found n={found_n}, L={found_l}")]
    GridMismatch {
        expected_n: usize,
        expected_l: f64,
        found_n: usize,
        found_l: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("{}:{line}: {msg}", path.display())]
    Config { path: PathBuf, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
