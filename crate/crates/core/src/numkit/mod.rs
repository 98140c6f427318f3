//! Dense linear algebra, finite differences and seeded randomness used by the
//! rest of the crate.

mod diff;
mod eigen;
mod matrix;
mod rng;

pub use diff::{central_difference_gradient, default_step};
pub use eigen::{symmetric_eigen, symmetric_eigenvalues, SymmetricEigen, DEFAULT_EIGEN_TOL};
pub use matrix::DenseMatrix;
pub use rng::RandomStream;

use thiserror::Error;

/// Errors raised by the numeric substrate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {residual:e} exceeds {tol:e}")]
    Asymmetric { row: usize, col: usize, residual: f64, tol: f64 },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
}

/// Euclidean norm of a slice.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean distance between two slices of equal length.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
