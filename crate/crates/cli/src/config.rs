//! Experiment configuration.
//!
//! ```toml
//! seed = 1
//! tau = 1.0
//! target = 1e-6
//! out = "runs/hard"
//! topology = "linear:32"
//!
//! [problem]
//! preset = "hard-decentralized"
//!
//! [[solver]]
//! name = "drone"
//! eta = 1e-6
//! auto = true
//! ```
//!
//! Parsing, serializing and parsing again gives the same value.

use serde::{Deserialize, Serialize};

use crate::CliError;
use plopt_core::solvers::Algorithm;

fn default_tau() -> f64 {
    1.0
}

fn default_out() -> String {
    "out".into()
}

fn yes() -> bool {
    true
}

fn is_true(v: &bool) -> bool {
    *v
}

fn is_false(v: &bool) -> bool {
    !*v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    /// Cost of one communication round in computation steps.
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Target accuracy `ε` on the gap.
    pub target: f64,
    #[serde(default = "default_out")]
    pub out: String,
    /// Stop a run at the first row with gap `≤ ε` (known optimum only).
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub stop_at_target: bool,
    /// `linear:n`, `ring:n`, `complete:n`, `gap:<γ>` or `edges:<path>`.
    /// Defaults to the network the problem was built for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<String>,
    pub problem: ProblemConfig,
    #[serde(rename = "solver")]
    pub solvers: Vec<SolverConfig>,
}

/// Preset name and its parameters. Unset parameters take the preset defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub preset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Sample count of synthetic regression data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Feature dimension of synthetic regression data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    /// `square` or `logistic`, for `libsvm:` problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<String>,
    /// Seed for synthetic data; defaults to the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_seed: Option<u64>,
    /// Replaces the declared smoothness constant (negative controls).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_l: Option<f64>,
    /// Replaces the declared PL constant (negative controls).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_mu: Option<f64>,
}

/// One solver run. With `auto`, unset parameters come from the DRONE default
/// parameter rule; otherwise `eta` and `iters` are required.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub name: String,
    /// File stem of the CSV; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub auto: bool,
}

impl SolverConfig {
    pub fn algorithm(&self) -> Result<Algorithm, CliError> {
        Algorithm::parse(&self.name).ok_or_else(|| CliError::Usage(format!("unknown solver `{}`", self.name)))
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serializable")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(format!("config: {m}")));
        if !(self.target > 0.0 && self.target.is_finite()) {
            return bad(format!("target must be positive, got {}", self.target));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be non-negative, got {}", self.tau));
        }
        if self.solvers.is_empty() {
            return bad("at least one [[solver]] is required".into());
        }
        let mut labels = std::collections::BTreeSet::new();
        for s in &self.solvers {
            s.algorithm()?;
            if !labels.insert(s.label()) {
                return bad(format!("duplicate solver label `{}`", s.label()));
            }
            if s.label().is_empty() || s.label().contains(['/', '\\']) {
                return bad(format!("solver label `{}` is not a file stem", s.label()));
            }
        }
        crate::presets::check_preset_name(&self.problem.preset)
    }
}
