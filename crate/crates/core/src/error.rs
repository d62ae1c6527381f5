use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by the command line front-end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value {value} at grid point {index:?}")]
    NonFinite { index: Vec<usize>, value: f64 },

    #[error("field length {actual} does not match grid size {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("window at center {center:?} with radius {radius} {reason}")]
    Window {
        center: Vec<usize>,
        radius: f64,
        reason: String,
    },

    #[error("degenerate least-squares system at center {center:?}, radius {radius}")]
    Degenerate { center: Vec<usize>, radius: f64 },

    #[error("radius {0} is not a level of the scale ladder")]
    NotInLadder(f64),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter { .. } | Error::InvalidGrid(_) | Error::NotInLadder(_) => {
                ErrorClass::Usage
            }
            Error::NonFinite { .. } | Error::Window { .. } | Error::Degenerate { .. } => {
                ErrorClass::Numeric
            }
            Error::LengthMismatch { .. }
            | Error::Empty(_)
            | Error::MalformedHeader(_)
            | Error::UnsupportedDimension(_)
            | Error::Parse { .. }
            | Error::Io { .. }
            | Error::Json(_) => ErrorClass::Data,
        }
    }
}
