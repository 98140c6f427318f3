use super::lyapunov::{lyapunov_components, LyapunovWeights};
use super::record::{Recorder, Residual, RowInputs};
use super::{RunOptions, RunRecord, SolverError, SolverParams};
use crate::gossip::{acc_gossip, GossipConfig, GossipError};
use crate::numkit::{dist2, norm2, DenseMatrix, RandomStream};
use crate::objectives::{metered_gradient, LocalObjectiveSet, ObjectiveError, OracleMeter};
use crate::topology::MixingMatrix;

/// DGD with gradient tracking: `X ← AccGossip(X − ηS)`,
/// `S ← AccGossip(S + ∇F(X_new) − ∇F(X))`. Each iteration costs `n` LFO
/// calls, one computation step and `2K` rounds.
#[allow(clippy::too_many_arguments)]
pub fn dgd_gt(
    set: &dyn LocalObjectiveSet,
    w: &MixingMatrix,
    x0: &[f64],
    eta: f64,
    k: usize,
    iters: usize,
    meter: &mut OracleMeter,
    opts: &RunOptions,
) -> Result<RunRecord, SolverError> {
    let params = SolverParams { eta, iters, k, p: 1.0, b: set.agents().max(1), seed: 0 };
    let cfg = GossipConfig::new(w, k);
    run(set, w, &cfg, x0, &params, false, meter, opts)
}

/// [`dgd_gt`] with an explicit gossip configuration (for example zero
/// momentum, which makes one round on `(1/n)11ᵀ` exact averaging).
#[allow(clippy::too_many_arguments)]
pub fn dgd_gt_with_gossip(
    set: &dyn LocalObjectiveSet,
    w: &MixingMatrix,
    cfg: &GossipConfig,
    x0: &[f64],
    eta: f64,
    iters: usize,
    meter: &mut OracleMeter,
    opts: &RunOptions,
) -> Result<RunRecord, SolverError> {
    let params = SolverParams { eta, iters, k: cfg.k, p: 1.0, b: set.agents().max(1), seed: 0 };
    run(set, w, cfg, x0, &params, false, meter, opts)
}

/// DRONE: gradient tracking with a probabilistically refreshed,
/// minibatch-corrected local estimator.
///
/// Every iteration draws `ζ ~ Bernoulli(p)` and then
/// `ξ ~ Multinomial(b, 1/n)`. On `ζ = 1` all agents refresh. Otherwise agent
/// `i` adds `(ξ_i n / b)(∇f_i(x_new) − ∇f_i(x_old))`; the old gradient comes
/// from a per-agent cache keyed by iterate version and is recomputed (and
/// metered) on a miss.
pub fn drone(
    set: &dyn LocalObjectiveSet,
    w: &MixingMatrix,
    x0: &[f64],
    params: &SolverParams,
    meter: &mut OracleMeter,
    opts: &RunOptions,
) -> Result<RunRecord, SolverError> {
    let cfg = GossipConfig::new(w, params.k);
    run(set, w, &cfg, x0, params, true, meter, opts)
}

struct CacheEntry {
    version: usize,
    grad: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn run(
    set: &dyn LocalObjectiveSet,
    w: &MixingMatrix,
    cfg: &GossipConfig,
    x0: &[f64],
    params: &SolverParams,
    sampled: bool,
    meter: &mut OracleMeter,
    opts: &RunOptions,
) -> Result<RunRecord, SolverError> {
    let n = set.agents();
    let d = set.dim();
    params.validate(n)?;
    if w.nodes() != n {
        return Err(GossipError::Dimension { rows: n, nodes: w.nodes() }.into());
    }
    if x0.len() != d {
        return Err(ObjectiveError::Dimension { expected: d, got: x0.len() }.into());
    }
    if meter.lfo_per_agent().len() != n {
        return Err(SolverError::Invalid("meter agent count differs from the objective set".into()));
    }
    if opts.lyapunov && set.constants().f_star.known().is_none() {
        return Err(ObjectiveError::UnknownOptimum("the Lyapunov function").into());
    }
    let weights = LyapunovWeights {
        eta: params.eta,
        p: params.p,
        rho: cfg.rho,
        smoothness: set.constants().smoothness.unwrap_or(0.0),
    };
    let eta = params.eta;
    let scale = n as f64 / params.b as f64;
    let mut rng = RandomStream::new(params.seed);

    let mut x = DenseMatrix::broadcast_row(n, x0);
    let mut g = DenseMatrix::zeros(n, d);
    let mut cache: Vec<CacheEntry> = Vec::with_capacity(n);
    for i in 0..n {
        metered_gradient(set, meter, i, x.row(i), g.row_mut(i))?;
        cache.push(CacheEntry { version: 0, grad: g.row(i).to_vec() });
    }
    meter.record_computation_step();
    let mut s = g.clone();

    let mut rec = Recorder::new(set, opts);
    let lyap = |x: &DenseMatrix, s: &DenseMatrix, g: &DenseMatrix| {
        if opts.lyapunov {
            lyapunov_components(set, x, s, g, weights).map(Some)
        } else {
            Ok(None)
        }
    };
    let mut x_bar = x.row_mean();
    let mut s_bar = s.row_mean();
    let mut s_peak = s.frobenius_norm();
    let tracking = |s_bar: &[f64], g: &DenseMatrix, s_peak: f64| {
        let g_bar = g.row_mean();
        Residual { abs: dist2(s_bar, &g_bar), scale: 1.0 + norm2(&g_bar) + s_peak }
    };
    let mut done = rec.push(RowInputs {
        iter: 0,
        meter: meter.snapshot(),
        x_bar: &x_bar,
        consensus_err: x.deviation_from_mean(),
        lyapunov: lyap(&x, &s, &g)?,
        mean_recursion: None,
        tracking: opts.invariants.then(|| tracking(&s_bar, &g, s_peak)),
    })?;

    let mut y = DenseMatrix::zeros(n, d);
    let mut fresh = vec![0.0; d];
    let mut old = vec![0.0; d];
    let mut t = 0;
    while t < params.iters && !done {
        let (zeta, xi) = if sampled {
            let zeta = rng.bernoulli(params.p);
            (zeta, rng.multinomial(params.b, n)?)
        } else {
            (true, Vec::new())
        };

        for ((yv, xv), sv) in y.data_mut().iter_mut().zip(x.data()).zip(s.data()) {
            *yv = xv - eta * sv;
        }
        let x_new = acc_gossip(&y, w, cfg, meter)?;

        let mut g_new = g.clone();
        for i in 0..n {
            if zeta {
                metered_gradient(set, meter, i, x_new.row(i), g_new.row_mut(i))?;
                let entry = &mut cache[i];
                entry.version = t + 1;
                entry.grad.copy_from_slice(g_new.row(i));
            } else if xi[i] > 0 {
                metered_gradient(set, meter, i, x_new.row(i), &mut fresh)?;
                let entry = &mut cache[i];
                if entry.version == t {
                    old.copy_from_slice(&entry.grad);
                } else {
                    metered_gradient(set, meter, i, x.row(i), &mut old)?;
                }
                let c = xi[i] as f64 * scale;
                for ((gv, f), o) in g_new.row_mut(i).iter_mut().zip(&fresh).zip(&old) {
                    *gv += c * (f - o);
                }
                let entry = &mut cache[i];
                entry.version = t + 1;
                entry.grad.copy_from_slice(&fresh);
            }
        }
        meter.record_computation_step();

        for (((yv, sv), gn), go) in y.data_mut().iter_mut().zip(s.data()).zip(g_new.data()).zip(g.data()) {
            *yv = (sv + gn) - go;
        }
        let s_new = acc_gossip(&y, w, cfg, meter)?;

        let x_bar_new = x_new.row_mean();
        let mean_recursion = opts.invariants.then(|| {
            let predicted: Vec<f64> = x_bar.iter().zip(&s_bar).map(|(a, b)| a - eta * b).collect();
            Residual { abs: dist2(&x_bar_new, &predicted), scale: norm2(&x_bar) + eta * norm2(&s_bar) }
        });
        x = x_new;
        s = s_new;
        g = g_new;
        x_bar = x_bar_new;
        s_bar = s.row_mean();
        s_peak = s_peak.max(s.frobenius_norm());
        t += 1;
        done = rec.push(RowInputs {
            iter: t,
            meter: meter.snapshot(),
            x_bar: &x_bar,
            consensus_err: x.deviation_from_mean(),
            lyapunov: lyap(&x, &s, &g)?,
            mean_recursion,
            tracking: opts.invariants.then(|| tracking(&s_bar, &g, s_peak)),
        })?;
    }

    let pick = rng.below(n);
    let x_out = x.row(pick).to_vec();
    let (rows, gap_kind) = rec.finish();
    Ok(RunRecord { rows, gap_kind, x_bar, x_out, meter: meter.snapshot() })
}
