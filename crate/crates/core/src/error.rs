use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in training, evaluation, or file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("never-hit unit {0}")]
    UntrainedUnit(usize),

    #[error("bad magic number {found:#010x} (expected {expected:#010x})")]
    BadMagic { expected: u32, found: u32 },

    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("count mismatch: {images} images vs {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("unsupported image shape {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("record layout: {0}")]
    BadRecord(String),

    #[error("label {label} out of range (classes {classes})")]
    BadLabel { label: usize, classes: usize },

    #[error("dataset is missing class {0}")]
    MissingClass(usize),

    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Short stable identifier, used for machine-readable CLI errors and
    /// FFI error codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "index",
            Error::DimensionMismatch { .. } => "dimension",
            Error::NonFinite => "non_finite",
            Error::Empty(_) => "empty",
            Error::InvalidParameter(_) => "parameter",
            Error::UntrainedUnit(_) => "untrained_unit",
            Error::BadMagic { .. } => "bad_magic",
            Error::Truncated { .. } => "truncated",
            Error::CountMismatch { .. } => "count_mismatch",
            Error::BadShape { .. } => "bad_shape",
            Error::BadRecord(_) => "bad_record",
            Error::BadLabel { .. } => "bad_label",
            Error::MissingClass(_) => "missing_class",
            Error::BadCheckpoint(_) => "bad_checkpoint",
            Error::Config(_) => "config",
            Error::File { .. } | Error::Io(_) => "io",
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, len })
    }
}

pub(crate) fn check_input(x: &[f64], dim: usize) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}
