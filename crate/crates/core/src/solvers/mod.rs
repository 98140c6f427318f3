//! GD, centralized GD, DGD with gradient tracking, and DRONE.
//!
//! Every algorithmic gradient goes through the oracle meter. Per-iteration
//! diagnostics (gap, gradient norm, consensus error, Lyapunov terms) are
//! computed directly from the objective set and never metered.

mod central;
mod lyapunov;
mod params;
mod record;
mod tracking;

pub use central::{cgd, gd};
pub use lyapunov::{lyapunov_components, Lyapunov, LyapunovWeights};
pub use params::{drone_default_params, DroneDefaults, SolverParams};
pub use record::{GapKind, RecordRow, Residual, RunOptions, RunRecord};
pub use tracking::{dgd_gt, dgd_gt_with_gossip, drone};

use thiserror::Error;

use crate::gossip::GossipError;
use crate::numkit::NumError;
use crate::objectives::ObjectiveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver parameter: {0}")]
    Invalid(String),
    #[error("diverged at iteration {iter}: {detail}")]
    Diverged { iter: usize, detail: String },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Gossip(#[from] GossipError),
    #[error(transparent)]
    Numeric(#[from] NumError),
}

/// Which algorithm produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Gd,
    Cgd,
    DgdGt,
    Drone,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Gd => "gd",
            Self::Cgd => "cgd",
            Self::DgdGt => "dgd-gt",
            Self::Drone => "drone",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gd" => Some(Self::Gd),
            "cgd" => Some(Self::Cgd),
            "dgd-gt" | "dgdgt" | "dgd_gt" => Some(Self::DgdGt),
            "drone" => Some(Self::Drone),
            _ => None,
        }
    }
}
