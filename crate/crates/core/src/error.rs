use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("ragged data: row {row} has {found} coordinates, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("too few observations for {b} slices (n = {n})")]
    TooFewForSlices { n: usize, b: usize },

    #[error("too few observations for {b} shells (n = {n})")]
    TooFewForShells { n: usize, b: usize },

    #[error("depth undefined for fewer than two observations")]
    DepthUndefined,

    #[error("shell count mismatch: profile has {profile}, requested {requested}")]
    ShellMismatch { profile: usize, requested: usize },

    #[error("empty shell {0}")]
    EmptyShell(usize),

    #[error("degenerate scale")]
    DegenerateScale,

    #[error("degenerate covariance")]
    DegenerateCovariance,

    #[error("covariance not positive-definite")]
    NotPositiveDefinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("column selectors by name require a header row")]
    NameWithoutHeader,

    #[error("no usable rows in {path} ({usable} usable, at least 2 required)")]
    NoUsableRows { path: PathBuf, usable: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
