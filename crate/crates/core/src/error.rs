use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("series too short: need at least {needed} samples, got {actual}")]
    TooShort { needed: usize, actual: usize },

    #[error("cumulant generating function overflow: |t| * max|x| = {product} exceeds {limit}")]
    CgfOverflow { product: f64, limit: f64 },

    #[error("insufficient usable scales for {context}: need {needed}, found {found}")]
    InsufficientPoints {
        context: String,
        needed: usize,
        found: usize,
    },

    #[error("zero wavelet energy at octave {octave}")]
    ZeroEnergy { octave: u32 },

    #[error("{0}")]
    Empty(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: unrecognised format version {found:?}")]
    UnknownVersion { path: PathBuf, found: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
