use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Point data incompatible with the chosen metric, or a structural
    /// invariant violated at construction time.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was called with arguments outside its contract.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A brute-force oracle or dense-matrix routine was asked to exceed
    /// its explicit size guard.
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("parse error in {path} at line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A consistency check failed on data the library itself produced
    /// (e.g. a completed tree that does not span). Indicates a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
