use thiserror::Error;

/// Errors raised by matrix construction, factorization, solves and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("entry ({row}, {col}) is out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },

    #[error("matrix is not symmetric: a({row},{col}) = {upper} but a({col},{row}) = {lower}")]
    Asymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular: no acceptable pivot with {remaining} columns remaining")]
    SingularMatrix { remaining: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
