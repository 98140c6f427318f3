//! Hard instances built from the chain function `g_{T,t}`.
//!
//! `g_{T,t}(x) = q_{T,t}(b − x) + Σ ψ_{b_i}(b_i − x_i)` is 37-smooth,
//! `1/(aT)`-PL with `a = 19708`, has infimum 0 at `x = b`, and reveals at
//! most one new coordinate per gradient query. The constructions here scale
//! it, embed it block-wise across agents, or split it over a network so that
//! progress needs communication between distant nodes.

mod chain;
mod checks;
mod constructions;
mod fields;
mod psi;
mod split;
mod suite;

pub use chain::{ChainPart, ChainSpec, CHAIN_RATIO, PL_CONST_A};
pub use checks::{
    check_block_zero_chain, check_h_average, check_span_gap, check_sparse_gap, check_split_identity, check_zero_chain,
    restricted_sparse_minimum,
};
pub use constructions::{
    dfo_hard, experiment_instance, ifo_hard, linear_span, ConstructionInfo, HardInstance, NetworkInfo,
    CHAIN_SMOOTHNESS, DFO_GAP_TOL, EXPERIMENT_BLOCK_COUNT, EXPERIMENT_BLOCK_LEN, EXPERIMENT_SIGMA,
};
pub use fields::{BlockEmbedded, ChainField, FieldSet, LinearSpan, Scaled};
pub use psi::{psi, psi_grad};
pub use split::{h_set, h_set_smoothness, NetworkSplitSpec};
pub use suite::{
    chain_suite, check_psi_boundaries, property_suite, span_gap_profile, SpanGapRow, SuiteConfig, CONSTANT_SLACK,
};

use thiserror::Error;

use crate::topology::TopologyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("invalid instance parameter: {0}")]
    Invalid(String),
    #[error("construction infeasible: {0}")]
    Infeasible(String),
    #[error("point has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Topology(#[from] TopologyError),
}
