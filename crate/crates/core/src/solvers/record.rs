use super::lyapunov::Lyapunov;
use super::SolverError;
use crate::objectives::{mean_gradient, mean_value, LocalObjectiveSet, MeterSnapshot};

/// Whether `gap` is against the true optimum or against the best value seen
/// during the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapKind {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub iter: usize,
    pub lfo_total: u64,
    pub comm_rounds: u64,
    pub time_units: f64,
    /// `f(x̄) − f*`, or `f(x̄) − min_t f(x̄^t)` for [`GapKind::Relative`].
    pub gap: f64,
    pub value: f64,
    pub grad_norm: Option<f64>,
    pub consensus_err: f64,
    pub lyapunov: Option<Lyapunov>,
    /// `x̄^t − (x̄^{t−1} − η s̄^{t−1})`, scaled by `‖x̄^{t−1}‖ + η‖s̄^{t−1}‖`.
    pub mean_recursion: Option<Residual>,
    /// `s̄^t − ḡ^t`, scaled by `1 + ‖ḡ^t‖ + max_{τ≤t} ‖S^τ‖_F`. Gossip keeps
    /// means only up to rounding relative to the gossiped matrix, and the
    /// drift accumulates over iterations, hence the peak tracker norm.
    pub tracking: Option<Residual>,
    /// `x̄^t`, kept when [`RunOptions::keep_iterates`] is set.
    pub x_bar: Option<Vec<f64>>,
}

/// An invariant residual with the magnitude it should be compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub abs: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.abs / self.scale
        } else {
            self.abs
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Stop after the first row whose absolute gap is at most this value.
    pub target_gap: Option<f64>,
    /// Record `‖∇f(x̄)‖` (costs `n` unmetered gradients per row).
    pub grad_norm: bool,
    /// Record `U, V, C, Φ` (needs a known optimum).
    pub lyapunov: bool,
    /// Record the mean-recursion and tracking residuals.
    pub invariants: bool,
    /// Keep `x̄^t` on every row.
    pub keep_iterates: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { target_gap: None, grad_norm: true, lyapunov: false, invariants: true, keep_iterates: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub rows: Vec<RecordRow>,
    pub gap_kind: GapKind,
    /// Average of the final local iterates.
    pub x_bar: Vec<f64>,
    /// One final local iterate drawn uniformly (decentralized methods) or the
    /// final iterate (GD/CGD).
    pub x_out: Vec<f64>,
    pub meter: MeterSnapshot,
}

impl RunRecord {
    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    /// First row whose gap is at most `eps`.
    pub fn first_reaching(&self, eps: f64) -> Option<&RecordRow> {
        self.rows.iter().find(|r| r.gap <= eps)
    }
}

/// Shared row bookkeeping: gap baseline, divergence guard and early stop.
pub(crate) struct Recorder<'a> {
    set: &'a dyn LocalObjectiveSet,
    opts: &'a RunOptions,
    f_star: Option<f64>,
    first: Option<f64>,
    pub rows: Vec<RecordRow>,
}

pub(crate) struct RowInputs<'a> {
    pub iter: usize,
    pub meter: MeterSnapshot,
    pub x_bar: &'a [f64],
    pub consensus_err: f64,
    pub lyapunov: Option<Lyapunov>,
    pub mean_recursion: Option<Residual>,
    pub tracking: Option<Residual>,
}

const DIVERGENCE_FACTOR: f64 = 1e12;

impl<'a> Recorder<'a> {
    pub fn new(set: &'a dyn LocalObjectiveSet, opts: &'a RunOptions) -> Self {
        Self { set, opts, f_star: set.constants().f_star.known(), first: None, rows: Vec::new() }
    }

    pub fn gap_kind(&self) -> GapKind {
        if self.f_star.is_some() {
            GapKind::Absolute
        } else {
            GapKind::Relative
        }
    }

    /// Appends a row; returns `true` when the target gap is reached.
    pub fn push(&mut self, r: RowInputs<'_>) -> Result<bool, SolverError> {
        let value = mean_value(self.set, r.x_bar);
        if !value.is_finite() || r.x_bar.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::Diverged { iter: r.iter, detail: format!("non-finite objective value {value}") });
        }
        let base = self.f_star.unwrap_or(0.0);
        let excess = value - base;
        let first = *self.first.get_or_insert(excess);
        let limit = DIVERGENCE_FACTOR * first.abs().max(1e-12);
        if excess - first.min(0.0) > limit {
            return Err(SolverError::Diverged {
                iter: r.iter,
                detail: format!("objective excess {excess:e} exceeds 1e12 times the initial {first:e}"),
            });
        }
        let grad_norm = self.opts.grad_norm.then(|| crate::numkit::norm2(&mean_gradient(self.set, r.x_bar)));
        self.rows.push(RecordRow {
            iter: r.iter,
            lfo_total: r.meter.lfo_total,
            comm_rounds: r.meter.comm_rounds,
            time_units: r.meter.time_units,
            gap: excess,
            value,
            grad_norm,
            consensus_err: r.consensus_err,
            lyapunov: r.lyapunov,
            mean_recursion: r.mean_recursion,
            tracking: r.tracking,
            x_bar: self.opts.keep_iterates.then(|| r.x_bar.to_vec()),
        });
        Ok(match (self.f_star, self.opts.target_gap) {
            (Some(_), Some(eps)) => excess <= eps,
            _ => false,
        })
    }

    /// Converts raw values into relative gaps when the optimum is unknown.
    pub fn finish(mut self) -> (Vec<RecordRow>, GapKind) {
        let kind = self.gap_kind();
        if kind == GapKind::Relative {
            let best = self.rows.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
            for r in &mut self.rows {
                r.gap = r.value - best;
            }
        }
        (self.rows, kind)
    }
}
