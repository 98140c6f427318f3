//! Local objective sets and the oracle meter.
//!
//! A [`LocalObjectiveSet`] is the finite sum `f = (1/n) Σ f_i` seen from the
//! agents' side: agent `i` can only query `f_i`. Solvers must route every
//! algorithmic gradient query through [`metered_gradient`] so that the
//! [`OracleMeter`] sees it; diagnostics call the set directly.

mod checks;
mod meter;

pub use checks::{check_gradients, check_mean_squared_smoothness, check_pl, gradient_relative_error, CheckOutcome};
pub use meter::{MeterSnapshot, OracleMeter};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("agent index {agent} out of range for {agents} agents")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error("point has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("optimal value is unknown; {0} is unavailable")]
    UnknownOptimum(&'static str),
}

/// Optimal value of `f = (1/n) Σ f_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimalValue {
    Known(f64),
    Unknown,
}

impl OptimalValue {
    pub fn known(&self) -> Option<f64> {
        match self {
            Self::Known(v) => Some(*v),
            Self::Unknown => None,
        }
    }
}

/// Declared constants of an objective set.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    /// Mean-squared smoothness `L`.
    pub smoothness: Option<f64>,
    /// PL constant `μ` of the average.
    pub pl: Option<f64>,
    pub f_star: OptimalValue,
    /// Natural length scale of the instance. Sampled checks draw points from
    /// `[-2s, 2s]^d` and use finite-difference steps proportional to `s`.
    pub length_scale: f64,
}

impl Constants {
    pub fn unknown() -> Self {
        Self { smoothness: None, pl: None, f_star: OptimalValue::Unknown, length_scale: 1.0 }
    }

    pub fn condition_number(&self) -> Option<f64> {
        Some(self.smoothness? / self.pl?)
    }
}

/// `n` local objectives over `R^d` with value and gradient access.
pub trait LocalObjectiveSet: Send + Sync {
    fn agents(&self) -> usize;
    fn dim(&self) -> usize;
    fn value(&self, agent: usize, x: &[f64]) -> f64;
    /// Writes `∇f_agent(x)` into `out` (length `dim`).
    fn gradient(&self, agent: usize, x: &[f64], out: &mut [f64]);
    fn constants(&self) -> &Constants;
}

/// A single smooth function over `R^m`.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
}

impl<F: ScalarField + ?Sized> ScalarField for Box<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        (**self).gradient(x, out)
    }
}

impl<S: LocalObjectiveSet + ?Sized> LocalObjectiveSet for Box<S> {
    fn agents(&self) -> usize {
        (**self).agents()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, agent: usize, x: &[f64]) -> f64 {
        (**self).value(agent, x)
    }
    fn gradient(&self, agent: usize, x: &[f64], out: &mut [f64]) {
        (**self).gradient(agent, x, out)
    }
    fn constants(&self) -> &Constants {
        (**self).constants()
    }
}

/// Queries `∇f_agent(x)` and charges one LFO call to `agent`.
pub fn metered_gradient(
    set: &dyn LocalObjectiveSet,
    meter: &mut OracleMeter,
    agent: usize,
    x: &[f64],
    out: &mut [f64],
) -> Result<(), ObjectiveError> {
    if agent >= set.agents() {
        return Err(ObjectiveError::AgentOutOfRange { agent, agents: set.agents() });
    }
    if x.len() != set.dim() || out.len() != set.dim() {
        return Err(ObjectiveError::Dimension {
            expected: set.dim(),
            got: if x.len() != set.dim() { x.len() } else { out.len() },
        });
    }
    set.gradient(agent, x, out);
    meter.record_lfo(agent);
    Ok(())
}

/// `f(x) = (1/n) Σ f_i(x)`; unmetered.
pub fn mean_value(set: &dyn LocalObjectiveSet, x: &[f64]) -> f64 {
    let n = set.agents();
    (0..n).map(|i| set.value(i, x)).sum::<f64>() / n as f64
}

/// `∇f(x)`; unmetered.
pub fn mean_gradient(set: &dyn LocalObjectiveSet, x: &[f64]) -> Vec<f64> {
    let n = set.agents();
    let mut acc = vec![0.0; set.dim()];
    let mut buf = vec![0.0; set.dim()];
    for i in 0..n {
        set.gradient(i, x, &mut buf);
        acc.iter_mut().zip(&buf).for_each(|(a, g)| *a += g);
    }
    let inv = 1.0 / n as f64;
    acc.iter_mut().for_each(|a| *a *= inv);
    acc
}

/// `f(x̄) − f*`; a diagnostic that never touches a meter.
pub fn mean_objective_gap(set: &dyn LocalObjectiveSet, x: &[f64]) -> Result<f64, ObjectiveError> {
    let f_star = set.constants().f_star.known().ok_or(ObjectiveError::UnknownOptimum("the suboptimality gap"))?;
    if x.len() != set.dim() {
        return Err(ObjectiveError::Dimension { expected: set.dim(), got: x.len() });
    }
    Ok(mean_value(set, x) - f_star)
}

/// Wraps a set and overrides its declared constants. Used for negative
/// controls in the property suites.
pub struct Redeclared<S> {
    pub inner: S,
    pub constants: Constants,
}

impl<S: LocalObjectiveSet> LocalObjectiveSet for Redeclared<S> {
    fn agents(&self) -> usize {
        self.inner.agents()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, agent: usize, x: &[f64]) -> f64 {
        self.inner.value(agent, x)
    }
    fn gradient(&self, agent: usize, x: &[f64], out: &mut [f64]) {
        self.inner.gradient(agent, x, out)
    }
    fn constants(&self) -> &Constants {
        &self.constants
    }
}
