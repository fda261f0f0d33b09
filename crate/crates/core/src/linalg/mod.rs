//! Exact linear algebra over `Q` and over `Q(sqrt(-d))`.
//!
//! Dense matrices cover the small systems (operators on a summand, Lie algebra
//! solves); [`SubspaceQ`] keeps an incrementally maintained reduced row basis
//! for subspaces of large ambient spaces such as the Clifford algebra.

mod commutant;
mod dense;
mod hermitian;
mod subspace;

pub use commutant::commutant;
pub use dense::{rref, MatrixQ};
pub use hermitian::{signature_hermitian, MatrixK};
pub use subspace::{SparseVec, SubspaceQ};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not hermitian (entry ({row}, {col}))")]
    NotHermitian { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("hermitian form is degenerate: radical of dimension {radical_dim}")]
    Degenerate { radical_dim: usize },
    #[error("matrix entries live in different fields")]
    FieldMismatch,
}
