use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A requested object would be too large to build or enumerate.
    #[error("size limit exceeded: {what} (limit {limit})")]
    Size { what: String, limit: u64 },

    /// An operation was applied outside its domain (e.g. complement of a ternary word).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    /// A caller-supplied argument violates an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("malformed PBM: {0}")]
    Pbm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
