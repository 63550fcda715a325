use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("label column `{0}` not found")]
    MissingLabelColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}`")]
    UnparseableCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: label `{value}` is not 0 or 1")]
    InvalidLabel { row: usize, value: String },

    #[error("duplicate feature name `{0}`")]
    DuplicateFeature(String),

    #[error("row {row} has {found} cells, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("mask length {mask} does not match feature count {features}")]
    MaskLength { mask: usize, features: usize },

    #[error("mask selects no features")]
    EmptyMask,

    #[error("feature count mismatch: expected {expected}, got {found}")]
    FeatureCount { expected: usize, found: usize },

    #[error("feature `{0}` has no observed values")]
    AllMissing(String),

    #[error("row {0} has no observed features")]
    EmptyRow(usize),

    #[error("dataset still contains missing values")]
    HasMissing,

    #[error("too few rows: {0}")]
    TooFewRows(String),

    #[error("only one class present")]
    SingleClass,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{features} features exceed the exhaustive search limit of {limit}")]
    TooManyFeatures { features: usize, limit: usize },

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("test row {0} reached a training step")]
    Leakage(u64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

/// Attaches a pipeline stage name to an error.
pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            already @ Error::Stage { .. } => already,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        })
    }
}
