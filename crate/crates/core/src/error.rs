use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("graph invariant violated: {0}")]
    InvalidGraph(String),

    #[error("invalid S0 algebra: {0}")]
    InvalidAlgebra(String),

    #[error("malformed SDP problem: {0}")]
    MalformedProblem(String),

    #[error("SDP solver failed: {0}")]
    Numerical(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Singular)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
