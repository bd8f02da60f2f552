use thiserror::Error;

use crate::range::Inclusion;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyShape { rows: usize, cols: usize },

    #[error("entry count {len} does not match shape {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op} requires a square matrix (got {rows}x{cols})")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is singular")]
    Singular,

    #[error("block split ({row_split}, {col_split}) out of range for a {rows}x{cols} matrix")]
    BadSplit {
        rows: usize,
        cols: usize,
        row_split: usize,
        col_split: usize,
    },

    #[error("hypothesis violated: {}", names(.failed))]
    HypothesisViolated { failed: Vec<Inclusion> },

    #[error("generation failed after {rejects} rejected draws: {reason}")]
    GenerationFailed { rejects: usize, reason: String },

    #[error("generator strategy cannot satisfy request: {0}")]
    Unsatisfiable(String),
}

fn names(failed: &[Inclusion]) -> String {
    failed
        .iter()
        .map(|i| i.name())
        .collect::<Vec<_>>()
        .join(", ")
}
