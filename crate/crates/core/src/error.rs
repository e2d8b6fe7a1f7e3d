use std::path::PathBuf;

/// Errors raised by loading, selection and evaluation.
///
/// [`Error::Degenerate`] marks inputs that are well-formed but carry too
/// little labeled data to compute anything; the CLI reports those with a
/// distinct exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corrupt input {path}: expected {expected} bytes, found {actual}")]
    CorruptInput {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("band index {band} out of range for cube with {n_bands} bands")]
    BandOutOfRange { band: usize, n_bands: usize },

    #[error("mask selects no pixels")]
    EmptyMask,

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("malformed json in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn mismatch(left: (usize, usize), right: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            left_w: left.0,
            left_h: left.1,
            right_w: right.0,
            right_h: right.1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
