use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row} has {found} fields, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("missing value in column '{column}' at row {row}")]
    MissingValue { column: String, row: usize },
    #[error("data file has a header but no rows")]
    EmptyBody,
    #[error("column '{0}' not found")]
    MissingColumn(String),
    #[error("outcome column '{0}' is not numeric")]
    NonNumericOutcome(String),
    #[error("column '{0}' already exists")]
    DuplicateColumn(String),
    #[error("'{0}' is the outcome, not a predictor")]
    OutcomeAsPredictor(String),
    #[error("invalid dataset: {0}")]
    InvalidData(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("external predictor: {0}")]
    Exec(String),
    #[error("external predictor output line {line}: cannot parse '{text}' as a number")]
    ExecParse { line: usize, text: String },
    #[error("bootstrap iteration {iteration} failed: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("random variable {index} failed: {source}")]
    RandomVariable {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
