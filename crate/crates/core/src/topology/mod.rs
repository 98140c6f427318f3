//! Communication graphs and gossip matrices.
//!
//! Mixing matrices are built as `W = I − R/λ1(R)` from a weighted graph
//! Laplacian `R`. [`mixing_for_gap`] produces a matrix with a prescribed
//! spectral gap from a path with one reweighted edge (or a weighted
//! triangle when the gap exceeds 1/3).

mod graph;
mod mixing;

pub use graph::Graph;
pub use mixing::{
    iota, laplacian_mixing, mixing_for_gap, path_length_for_gap, validate_mixing, ClauseCheck, GapConstruction,
    MixingMatrix, MixingReport, GAP_TOL, MAX_GAP_NODES, PATTERN_TOL, ROW_SUM_TOL, SPECTRUM_TOL, SYMMETRY_TOL,
};

use thiserror::Error;

use crate::numkit::NumError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("invalid topology: {0}")]
    Invalid(String),
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph is not connected")]
    Disconnected,
    #[error("could not reach gap {gamma} within {iterations} bisection steps (best {achieved})")]
    NoConvergence { gamma: f64, iterations: usize, achieved: f64 },
    #[error(transparent)]
    Numeric(#[from] NumError),
}
