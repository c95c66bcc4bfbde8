//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error in {op}: {message}")]
    Domain { op: &'static str, message: String },

    /// Two vectors that must share a length did not.
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    /// An opinion with zero uncertainty mass has no finite Dirichlet image.
    #[error("degenerate opinion: uncertainty mass is zero, concentration would be infinite")]
    DegenerateOpinion,

    /// Parameters violated a structural precondition.
    #[error("invalid parameters in {op}: {message}")]
    InvalidParameters { op: &'static str, message: String },

    /// A metric is undefined for the given inputs (e.g. AUROC with one class).
    #[error("undefined metric {metric}: {message}")]
    UndefinedMetric {
        metric: &'static str,
        message: String,
    },

    /// An experiment configuration failed validation; `path` names the field.
    #[error("invalid config at `{path}`: {message}")]
    InvalidConfig { path: String, message: String },

    /// Dataset-level failures (empty splits, malformed rows, ...).
    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            op,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(op: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameters {
            op,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
