use super::SolverError;
use crate::numkit::DenseMatrix;
use crate::objectives::{mean_value, LocalObjectiveSet, ObjectiveError};

/// Single-trajectory values of `U`, `V`, `C` and `Φ = gap + αU + βV + L·C`
/// with `α = 2η/p` and `β = 8Lρ²nη²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lyapunov {
    pub u: f64,
    pub v: f64,
    pub c: f64,
    pub phi: f64,
}

/// Weights entering `Φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovWeights {
    pub eta: f64,
    pub p: f64,
    pub rho: f64,
    pub smoothness: f64,
}

/// Evaluates the Lyapunov terms at `(X, S, G)`. Unmetered.
pub fn lyapunov_components(
    set: &dyn LocalObjectiveSet,
    x: &DenseMatrix,
    s: &DenseMatrix,
    g: &DenseMatrix,
    w: LyapunovWeights,
) -> Result<Lyapunov, SolverError> {
    let f_star = set.constants().f_star.known().ok_or(ObjectiveError::UnknownOptimum("the Lyapunov function"))?;
    let n = set.agents();
    let d = set.dim();
    for m in [x, s, g] {
        if m.rows() != n || m.cols() != d {
            return Err(ObjectiveError::Dimension { expected: d, got: m.cols() }.into());
        }
    }
    let nf = n as f64;
    let mut diff_sum = vec![0.0; d];
    let mut v_sum = 0.0;
    let mut grad = vec![0.0; d];
    for i in 0..n {
        set.gradient(i, x.row(i), &mut grad);
        for ((acc, gi), fi) in diff_sum.iter_mut().zip(g.row(i)).zip(&grad) {
            let e = gi - fi;
            *acc += e;
            v_sum += e * e;
        }
    }
    let u = diff_sum.iter().map(|e| (e / nf) * (e / nf)).sum::<f64>();
    let v = v_sum / nf;
    let xd = x.deviation_from_mean();
    let sd = s.deviation_from_mean();
    let c = xd * xd + w.eta * w.eta * sd * sd;
    let gap = mean_value(set, &x.row_mean()) - f_star;
    let alpha = 2.0 * w.eta / w.p;
    let beta = 8.0 * w.smoothness * w.rho * w.rho * nf * w.eta * w.eta;
    Ok(Lyapunov { u, v, c, phi: gap + alpha * u + beta * v + w.smoothness * c })
}
