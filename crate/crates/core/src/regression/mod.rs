//! Partitioned linear and logistic regression.
//!
//! Samples are split into contiguous blocks of `⌈m/n⌉`; agent `i` holds
//! `f_i(x) = (n/m) Σ_{j ∈ block i} ℓ_j(x)` so that `(1/n) Σ f_i` is the
//! empirical risk `(1/m) Σ ℓ_j`.

mod dataset;
mod losses;

pub use dataset::{parse_libsvm, synth_regression, Dataset};
pub use losses::{partitioned_regression_set, Loss, PartitionedSet, DENSE_EIGEN_LIMIT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressionError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid regression input: {0}")]
    Invalid(String),
}
