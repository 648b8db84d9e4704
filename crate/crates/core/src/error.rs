use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty color region")]
    EmptyColorRegion,

    #[error("empty mask: {0}")]
    EmptyMask(String),

    #[error("mask is not a single connected region: found {components} components")]
    DisconnectedMask { components: usize },

    #[error("block {index} at ({x}, {y}) with side {side} lies outside the {width}x{height} image")]
    BlockOutOfBounds {
        index: usize,
        x: usize,
        y: usize,
        side: usize,
        width: usize,
        height: usize,
    },

    #[error("matrix is singular or not positive definite: {0}")]
    Singular(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("too many columns for brute-force enumeration: {columns} > {limit}")]
    TooManyColumns { columns: usize, limit: usize },

    #[error("{modality}: {source}")]
    Modality {
        modality: String,
        #[source]
        source: Box<Error>,
    },

    #[error("no samples")]
    NoSamples,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sample {id}, modality {modality}: expected dimension {expected}, got {actual}")]
    SampleDimension {
        id: String,
        modality: String,
        expected: usize,
        actual: usize,
    },

    #[error("cannot draw {requested} training samples per class; class counts are {counts:?}")]
    SplitTooLarge { requested: usize, counts: Vec<usize> },

    #[error("training sample {0} has a zero-norm feature vector")]
    ZeroNormSample(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn in_modality(self, modality: impl ToString) -> Self {
        Error::Modality {
            modality: modality.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
