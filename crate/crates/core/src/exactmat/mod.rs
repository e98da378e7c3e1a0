//! Symmetric matrices with exact-rational or floating entries.
//!
//! Exact mode decides every sign exactly; float mode uses the scale-aware
//! tolerances in [`MINOR_TOL`] and [`EIGEN_TOL`].

mod det;
mod json;
mod mandelstam;
mod matrix;
mod scalar;

use thiserror::Error;

pub use det::{bareiss_det, exact_det, exact_rank, float_det, numerical_rank, singular_values, RANK_CUTOFF};
pub use json::parse_rational;
pub use mandelstam::{
    eigen_signature, find_minor_violation, is_mandelstam, minor_sign_test, minor_tolerance, principal_minor, rank,
    MandelstamVerdict, MinorWitness, Signature, Violation, EIGEN_TOL, MAX_MINOR_N, MINOR_TOL,
};
pub use matrix::SymmetricMatrix;
pub use scalar::{Mode, Scalar};
pub(crate) use scalar::rational_to_f64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("arithmetic between exact and floating scalars")]
    ModeMismatch,
    #[error("not a finite number")]
    NotANumber,
    #[error("index subset is empty")]
    EmptySubset,
    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("n = {n} exceeds the principal-minor enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("the zero matrix has rank 0 and is not assigned a Mandelstam rank")]
    ZeroMatrix,
    #[error("sign vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("symmetric eigen-solver did not converge")]
    EigenFailure,
    #[error("malformed matrix: {0}")]
    Format(String),
}

impl MatrixError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            MatrixError::ModeMismatch => "mode_mismatch",
            MatrixError::NotANumber => "not_a_number",
            MatrixError::EmptySubset => "empty_subset",
            MatrixError::IndexOutOfRange { .. } => "index_out_of_range",
            MatrixError::TooLarge { .. } => "too_large",
            MatrixError::ZeroMatrix => "zero_matrix",
            MatrixError::LengthMismatch { .. } => "length_mismatch",
            MatrixError::EmptyMatrix => "empty_matrix",
            MatrixError::NotSymmetric { .. } => "not_symmetric",
            MatrixError::EigenFailure => "eigen_failure",
            MatrixError::Format(_) => "format",
        }
    }
}
