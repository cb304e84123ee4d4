use std::path::PathBuf;

use thiserror::Error;

/// Errors from validated constructors, table lookups, configuration
/// parsing, and file I/O. Numerical kernels panic on contract violations
/// instead of returning these.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("missing critical-value table: {0}")]
    MissingTable(String),
    #[error("critical-value table mismatch: {0}")]
    TableMismatch(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("line {line}: cannot parse {content:?} as a number")]
    ParseLine { line: usize, content: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
