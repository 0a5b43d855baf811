//! Crate-wide error type.

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // --- ingestion and schema ---
    #[error("column `{0}` is missing from the CSV header")]
    MissingColumn(String),
    #[error("column `{0}` is not declared in the schema")]
    UnexpectedColumn(String),
    #[error("row {row}, column `{col}`: cannot parse `{token}` as a finite number")]
    TypeMismatch { row: usize, col: String, token: String },
    #[error("row {row}: label `{label}` is not one of the schema labels")]
    UnknownLabel { row: usize, label: String },
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("shape mismatch: {0}")]
    Shape(String),

    // --- statistics and splitting ---
    #[error("quantile of an empty sequence")]
    EmptyInput,
    #[error("{name} must lie in {range}, got {value}")]
    InvalidFraction {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("split leaves an empty side (train {train}, eval {eval})")]
    DegenerateSplit { train: usize, eval: usize },
    #[error("feature `{0}` has no observed cells")]
    FullyMissingFeature(String),

    // --- missingness ---
    #[error("dataset already carries missing cells; pass allow_compounding to inject on top")]
    CompoundingRefused,
    #[error("MAR subset is empty")]
    EmptySubset,
    #[error("independent column `{0}` has missing values")]
    IndependentColMissingValues(String),
    #[error("feature `{0}` must be continuous")]
    NotContinuous(String),
    #[error("categorical feature `{0}` has no declared ordering")]
    UnorderedCategorical(String),

    // --- imputation ---
    #[error("no donor row observes feature `{col}` (row {row})")]
    NoDonor { row: usize, col: String },
    #[error("k = {k} exceeds the {available} candidate donors")]
    InsufficientDonors { k: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    // --- contextualization ---
    #[error("descriptor catalog has no entry for feature `{0}`")]
    CatalogGap(String),
    #[error("row {row} out of range (n = {n})")]
    RowOutOfRange { row: usize, n: usize },
    #[error("sentence {index} cannot be parsed: `{sentence}`")]
    UnparseableSentence { index: usize, sentence: String },
    #[error("template `{0}` is not registered")]
    UnknownTemplate(String),

    // --- descriptor service ---
    #[error("network error: {0}")]
    Network(String),
    #[error("endpoint rejected credentials: {0}")]
    Auth(String),
    #[error("malformed descriptor response line: `{0}`")]
    MalformedResponse(String),
    #[error("descriptor response does not cover: {}", .0.join(", "))]
    CoverageGap(Vec<String>),
    #[error("no bundled resource for dataset `{0}`")]
    UnknownDataset(String),
    #[error("dataset description must be non-empty")]
    EmptyDescription,

    // --- evaluation ---
    #[error("training split is empty")]
    EmptyTrain,
    #[error("evaluation split is empty")]
    EmptyEval,

    // --- emission ---
    #[error("records mix rendered and omitted targets")]
    MixedTargetPresence,

    // --- plumbing ---
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }

    /// True for failures that originate at the remote descriptor endpoint.
    pub fn is_network(&self) -> bool {
        matches!(self, Error::Network(_) | Error::Auth(_))
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Config(e.to_string())
    }
}
