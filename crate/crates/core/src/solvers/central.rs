use super::record::{Recorder, RowInputs};
use super::{RunOptions, RunRecord, SolverError};
use crate::objectives::{metered_gradient, LocalObjectiveSet, ObjectiveError, OracleMeter};

/// Gradient descent on `f = (1/n) Σ f_i`. Each step costs `n` LFO calls and
/// one computation step.
pub fn gd(
    set: &dyn LocalObjectiveSet,
    x0: &[f64],
    eta: f64,
    iters: usize,
    meter: &mut OracleMeter,
    opts: &RunOptions,
) -> Result<RunRecord, SolverError> {
    central(set, x0, eta, iters, meter, opts, false)
}

/// Centralized GD: the same iterates as [`gd`], plus one communication round
/// per step for the server aggregation.
pub fn cgd(
    set: &dyn LocalObjectiveSet,
    x0: &[f64],
    eta: f64,
    iters: usize,
    meter: &mut OracleMeter,
    opts: &RunOptions,
) -> Result<RunRecord, SolverError> {
    central(set, x0, eta, iters, meter, opts, true)
}

fn central(
    set: &dyn LocalObjectiveSet,
    x0: &[f64],
    eta: f64,
    iters: usize,
    meter: &mut OracleMeter,
    opts: &RunOptions,
    aggregate: bool,
) -> Result<RunRecord, SolverError> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(SolverError::Invalid(format!("step size must be positive, got {eta}")));
    }
    let n = set.agents();
    let d = set.dim();
    if x0.len() != d {
        return Err(ObjectiveError::Dimension { expected: d, got: x0.len() }.into());
    }
    if meter.lfo_per_agent().len() != n {
        return Err(SolverError::Invalid("meter agent count differs from the objective set".into()));
    }
    let mut x = x0.to_vec();
    let mut grad = vec![0.0; d];
    let mut buf = vec![0.0; d];
    let inv = 1.0 / n as f64;
    let mut rec = Recorder::new(set, opts);
    let row = |rec: &mut Recorder, iter: usize, x: &[f64], meter: &OracleMeter| {
        rec.push(RowInputs {
            iter,
            meter: meter.snapshot(),
            x_bar: x,
            consensus_err: 0.0,
            lyapunov: None,
            mean_recursion: None,
            tracking: None,
        })
    };
    let mut done = row(&mut rec, 0, &x, meter)?;
    let mut t = 0;
    while t < iters && !done {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for i in 0..n {
            metered_gradient(set, meter, i, &x, &mut buf)?;
            grad.iter_mut().zip(&buf).for_each(|(g, b)| *g += b);
        }
        meter.record_computation_step();
        if aggregate {
            meter.record_comm_round();
        }
        x.iter_mut().zip(&grad).for_each(|(xi, g)| *xi -= eta * (g * inv));
        t += 1;
        done = row(&mut rec, t, &x, meter)?;
    }
    let (rows, gap_kind) = rec.finish();
    Ok(RunRecord { rows, gap_kind, x_bar: x.clone(), x_out: x, meter: meter.snapshot() })
}
