//! Decentralized finite-sum optimization under the PL condition: lower-bound
//! instances, accelerated gossip, and the DRONE / DGD-GT solvers.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod gossip;
pub mod instances;
pub mod numkit;
pub mod objectives;
pub mod regression;
pub mod solvers;
pub mod topology;
