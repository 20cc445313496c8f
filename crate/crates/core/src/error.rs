use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = FcmError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FcmError {
    /// Shapes, labels or dimensions do not line up.
    #[error("structural error: {0}")]
    Structural(String),

    /// Values are well-formed but violate a precondition (convexity, ranges, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error at epoch {epoch}: {detail}")]
    Numeric { epoch: usize, detail: String },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("training failed for expert `{expert}`: {source}")]
    Training {
        expert: String,
        #[source]
        source: Box<FcmError>,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl FcmError {
    pub fn structural(msg: impl Into<String>) -> Self {
        FcmError::Structural(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        FcmError::Domain(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FcmError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            FcmError::Io { .. } => 4,
            FcmError::Training { .. } | FcmError::Numeric { .. } => 3,
            _ => 2,
        }
    }
}
