use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("point {0} lies outside the domain")]
    OutOfDomain(Point),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed PGM at byte {offset}: {message}")]
    Pgm { offset: usize, message: String },

    #[error("trace schema mismatch at row {row}, column {column}: {message}")]
    TraceSchema {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::NonFinite(_) => "non_finite",
            Error::OutOfDomain(_) => "out_of_domain",
            Error::Unsupported(_) => "unsupported",
            Error::Pgm { .. } => "malformed_pgm",
            Error::TraceSchema { .. } => "trace_schema",
            Error::Scenario(_) => "invalid_scenario",
            Error::Io { .. } => "io",
            Error::Json(_) => "malformed_json",
        }
    }
}
