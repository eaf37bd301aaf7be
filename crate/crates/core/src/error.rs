use thiserror::Error;

use crate::exprparse::EvalError;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("singular matrix: pivot in column {column} is below tolerance")]
    SingularMatrix { column: usize },

    #[error("{what} = {value} is outside the supported range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("basis construction failed at index {index}: {reason}")]
    BasisConstruction { index: usize, reason: String },

    #[error("quadrature construction failed: {0}")]
    Quadrature(String),

    #[error("evaluation failed at x = {x}: {source}")]
    Evaluation { x: f64, source: EvalError },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error(
        "ill-posed problem: boundary conditions leave the system singular (pivot column {column})"
    )]
    IllPosed { column: usize },

    #[error("unsupported problem: {0}")]
    Unsupported(String),

    #[error("integration diverged at step {step}")]
    Divergence { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
