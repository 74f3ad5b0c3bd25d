use thiserror::Error;

/// Every failure the library can report.
///
/// Variants carry the measured quantity that broke the invariant so callers
/// (and the CLI) can print something actionable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace:.12} instead of 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid matrix shape: {0}")]
    Shape(String),

    #[error("expectation value has imaginary part {imag:.3e}")]
    ComplexExpectation { imag: f64 },

    #[error("variance evaluated to {value:.3e}, below the rounding floor")]
    NegativeVariance { value: f64 },

    #[error("operator set must have exactly {expected} members, found {found}")]
    Cardinality { expected: usize, found: usize },

    #[error("operator set is empty")]
    EmptySet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("relation kind {kind} does not accept {detail}")]
    KindMismatch { kind: String, detail: String },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
