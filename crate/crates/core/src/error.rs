use thiserror::Error;

use crate::dense::{EigDecomposition, Scalar};
use crate::matio::MtxError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("matrix is numerically singular (pivot {pivot})")]
    SingularMatrix { pivot: usize },

    #[error("QR iteration failed to converge after {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        partial: Box<EigDecomposition>,
    },

    #[error("{op} requires a Hermitian matrix")]
    NotHermitian { op: &'static str },

    #[error("matrix claimed Hermitian but ||A - A*||_max = {defect:e} exceeds tolerance")]
    HermitianCheck { defect: f64 },

    #[error("{op} received a zero vector")]
    ZeroVector { op: &'static str },

    #[error("{op} requires a unit vector, got norm {norm}")]
    NotNormalized { op: &'static str, norm: f64 },

    #[error("diagonal shift a_ii - lambda vanishes at index {index}")]
    SingularDiagonal { index: usize },

    #[error("breakdown in {op}: {reason}")]
    Breakdown {
        op: &'static str,
        reason: &'static str,
    },

    #[error("{op} requires a real shift, got {lambda}")]
    ComplexShift { op: &'static str, lambda: Scalar },

    #[error("expansion vector is numerically in the span of the basis")]
    LinearlyDependent,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Mtx(#[from] MtxError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }
}
