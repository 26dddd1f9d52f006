use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("vector must have at least one component")]
    EmptyVector,

    #[error("non-finite component {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("degenerate (zero-length) vector")]
    DegenerateVector,

    #[error("{0} activation is not differentiable")]
    NonDifferentiable(&'static str),

    #[error("decision boundary is undefined when all feature weights are zero")]
    DegenerateBoundary,

    #[error("dataset is empty")]
    EmptyData,

    #[error("label {label} in sample {sample} is outside the allowed domain {domain}")]
    LabelDomain {
        sample: usize,
        label: f64,
        domain: &'static str,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("training history has {len} epochs, need at least {window}")]
    InsufficientHistory { len: usize, window: usize },

    #[error("data generation failed after {attempts} attempts: {reason}")]
    Generation { attempts: usize, reason: String },

    #[error("{path}: row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        path: PathBuf,
        row: u64,
        expected: usize,
        found: usize,
    },

    #[error("{path}: row {row}, column {column}: cannot parse {cell:?} as a number")]
    CellParse {
        path: PathBuf,
        row: u64,
        column: usize,
        cell: String,
    },

    #[error("model format: line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}
