use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty data: {0}")]
    Empty(&'static str),

    #[error("length mismatch: expected {expected}, got {got} ({what})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid stratum layout: {0}")]
    InvalidLayout(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("design matrix is rank deficient at column `{column}`")]
    Singular { column: String },

    #[error("exact enumeration refused: {count} configurations exceed the cap of {cap}")]
    TooManyConfigurations { count: String, cap: u64 },

    #[error("zero reference rejection rate; power ratio undefined")]
    UndefinedRatio,

    #[error("replication {replication}: {source}")]
    Replication {
        replication: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("scenario `{id}`: {source}")]
    Scenario {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("endpoint `{endpoint}`: {source}")]
    Endpoint {
        endpoint: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular { .. } | Error::UndefinedRatio => true,
            Error::Replication { source, .. }
            | Error::Scenario { source, .. }
            | Error::Endpoint { source, .. } => {
                source.is_numerical()
            }
            _ => false,
        }
    }
}
