use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation was invoked on the wrong kind of system.
    #[error("usage error: {0}")]
    Usage(String),

    /// The root finder could not certify that every root in an interval was found.
    #[error("completeness failure on [{lo}, {hi}]: {detail}")]
    Completeness { lo: f64, hi: f64, detail: String },

    /// Not enough data for a statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A generated artifact failed its built-in consistency check.
    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {path}: {detail}")]
    Parse { path: PathBuf, detail: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
