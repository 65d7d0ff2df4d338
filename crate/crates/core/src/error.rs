use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column '{column}': cannot parse '{value}' as a finite number")]
    Parse { row: usize, column: String, value: String },

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("unknown class '{0}'")]
    UnknownClass(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feature subset is empty")]
    EmptySubset,

    #[error("unknown method '{0}'")]
    UnknownMethod(String),

    #[error("score vector has zero variance; correlation undefined")]
    ZeroVariance,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("{solver} did not converge after {iterations} iterations (last change {last_change:.3e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        last_change: f64,
    },

    #[error("JSON serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures caused by input files or their contents rather than
    /// by how the toolkit was invoked.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Csv(_)
                | Error::Parse { .. }
                | Error::UnknownColumn(_)
                | Error::InsufficientData(_)
        )
    }
}
