//! Experiment harness: TOML-configured runs over named problem presets,
//! metric CSVs, log-scale SVG plots and the instance property suite.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod output;
pub mod plot;
pub mod presets;

use plopt_core::gossip::GossipError;
use plopt_core::instances::InstanceError;
use plopt_core::regression::RegressionError;
use plopt_core::solvers::SolverError;
use plopt_core::topology::TopologyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Regression(#[from] RegressionError),
    #[error(transparent)]
    Gossip(#[from] GossipError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for usage and configuration errors, 1 for everything that failed
    /// while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io { path: path.as_ref().display().to_string(), source }
    }
}
