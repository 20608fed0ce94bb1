use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("point {point} coordinate {axis} = {value} lies outside [0,1)")]
    CoordinateOutOfRange {
        point: usize,
        axis: usize,
        value: f64,
    },

    /// Exhaustive enumeration would exceed the configured budget.
    #[error("{what} requires {required} evaluations, budget is {budget}; {hint}")]
    BudgetExceeded {
        what: &'static str,
        required: f64,
        budget: f64,
        hint: &'static str,
    },

    #[error("region has volume {volume}; dependence ratios need 0 < volume < 1")]
    DegenerateRegion { volume: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
