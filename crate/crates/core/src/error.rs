use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by model loading, frame queries and batch I/O.
///
/// Solver failures are not errors in this sense; they are reported through
/// [`crate::ik::IkFailure`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("frame index {0} out of range (expected 1..=6)")]
    FrameIndex(usize),

    #[error("matrix is not a rotation: orthogonality error {orthogonality:.3e}, det {det}")]
    NotRotation { orthogonality: f64, det: f64 },

    #[error("invalid robot model: {0}")]
    InvalidModel(String),

    #[error("config parse error: {0}")]
    Config(#[from] toml::de::Error),

    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for malformed input (as opposed to I/O trouble).
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Config(_) | Error::InvalidModel(_) | Error::NotRotation { .. }
        ) || matches!(self, Error::Csv(e) if !matches!(e.kind(), csv::ErrorKind::Io(_)))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
