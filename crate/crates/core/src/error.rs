use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite value at coordinate {index}")]
    NonFinite { index: usize },

    #[error("vector norm {norm} exceeds radius {radius}")]
    Radius { norm: f64, radius: f64 },

    #[error("vector is not unit norm (norm = {norm})")]
    Norm { norm: f64 },

    #[error("point is not in the convex hull: {0}")]
    NotInHull(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown or deleted point index {0}")]
    Index(usize),

    #[error("index holds no live points")]
    EmptyIndex,

    #[error("solver stalled after {halvings} consecutive threshold halvings at iteration {iteration} (r = {r:e})")]
    Stall { iteration: usize, halvings: u32, r: f64 },

    #[error("calibration target unreachable: {0}")]
    Calibration(String),

    #[error("malformed input {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
