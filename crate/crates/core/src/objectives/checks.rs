//! Sampled one-sided checks of declared constants.

use super::{mean_gradient, mean_value, LocalObjectiveSet};
use crate::numkit::{central_difference_gradient, dist2, norm2, RandomStream};

/// Outcome of a sampled check. `worst` is the extreme observed statistic and
/// `threshold` the bound it was compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn skipped(name: &str, why: &str) -> Self {
        Self {
            name: name.to_owned(),
            passed: true,
            worst: f64::NAN,
            threshold: f64::NAN,
            detail: format!("skipped: {why}"),
        }
    }
}

/// Half-width and anchor of the `k`-th sampling box: anchors alternate
/// between `center` (when given) and the origin, and half-widths cycle through
/// `2s·{1, 1e-1, 1e-2, 1e-3}`. The small boxes reach the narrow regions where
/// piecewise curvature peaks, which uniform sampling of the large box misses.
fn sample_box<'a>(set: &dyn LocalObjectiveSet, center: Option<&'a [f64]>, k: usize) -> (f64, Option<&'a [f64]>) {
    let s = set.constants().length_scale;
    let (anchor, level) = match center {
        Some(c) if k.is_multiple_of(2) => (Some(c), (k / 2) % 4),
        Some(_) => (None, (k / 2) % 4),
        None => (None, k % 4),
    };
    (2.0 * s * 10f64.powi(-(level as i32)), anchor)
}

fn sample_point(set: &dyn LocalObjectiveSet, center: Option<&[f64]>, k: usize, rng: &mut RandomStream) -> Vec<f64> {
    let (half, anchor) = sample_box(set, center, k);
    let mut x = rng.uniform_box(set.dim(), half);
    if let Some(c) = anchor {
        x.iter_mut().zip(c).for_each(|(v, c)| *v += c);
    }
    x
}

/// `‖fd − g‖ / max(‖g‖, 1)` at `x`, with a central-difference step tied to
/// the instance length scale.
pub fn gradient_relative_error(set: &dyn LocalObjectiveSet, agent: usize, x: &[f64]) -> f64 {
    let s = set.constants().length_scale;
    let inf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let h = 1e-6 * s * (inf / s).max(1.0);
    let fd = match central_difference_gradient(|p| set.value(agent, p), x, h) {
        Ok(v) => v,
        Err(_) => return f64::INFINITY,
    };
    let mut g = vec![0.0; set.dim()];
    set.gradient(agent, x, &mut g);
    dist2(&fd, &g) / norm2(&g).max(1.0)
}

/// Gradient vs central differences for every agent at `samples` points.
pub fn check_gradients(
    set: &dyn LocalObjectiveSet,
    samples: usize,
    tol: f64,
    center: Option<&[f64]>,
    rng: &mut RandomStream,
) -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for k in 0..samples {
        // Only the large box: central differences across a kink are not a
        // gradient error.
        let x = sample_point(set, center, 0, rng);
        for i in 0..set.agents() {
            let e = gradient_relative_error(set, i, &x);
            if !(e <= worst) {
                worst = e;
                at = format!("sample {k}, agent {i}");
            }
        }
    }
    CheckOutcome {
        name: "gradient".into(),
        passed: worst <= tol,
        worst,
        threshold: tol,
        detail: format!("worst relative error at {at}"),
    }
}

/// `sqrt((1/n) Σ ‖∇f_i(x) − ∇f_i(y)‖²) / ‖x − y‖ ≤ L (1 + slack)` over
/// `pairs` sampled pairs, half of them far apart and half a short
/// coordinate step apart.
pub fn check_mean_squared_smoothness(
    set: &dyn LocalObjectiveSet,
    pairs: usize,
    slack: f64,
    center: Option<&[f64]>,
    rng: &mut RandomStream,
) -> CheckOutcome {
    let name = "mean-squared smoothness";
    let Some(l) = set.constants().smoothness else {
        return CheckOutcome::skipped(name, "no declared smoothness");
    };
    let n = set.agents();
    let d = set.dim();
    let (mut gx, mut gy) = (vec![0.0; d], vec![0.0; d]);
    let mut worst = 0.0f64;
    for k in 0..pairs {
        // Even k: two independent points of one box. Odd k: a single-coordinate
        // step of 1% of the box half-width.
        let x = sample_point(set, center, k / 2, rng);
        let y = if k % 2 == 0 {
            sample_point(set, center, k / 2, rng)
        } else {
            let (half, _) = sample_box(set, center, k / 2);
            let mut y = x.clone();
            y[rng.below(d)] += 0.01 * half;
            y
        };
        let dxy = dist2(&x, &y);
        if dxy == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for i in 0..n {
            set.gradient(i, &x, &mut gx);
            set.gradient(i, &y, &mut gy);
            acc += dist2(&gx, &gy).powi(2);
        }
        let q = (acc / n as f64).sqrt() / dxy;
        if !(q <= worst) {
            worst = q;
        }
    }
    let threshold = l * (1.0 + slack);
    CheckOutcome {
        name: name.into(),
        passed: worst <= threshold,
        worst,
        threshold,
        detail: format!("max quotient over {pairs} pairs vs declared L = {l:e}"),
    }
}

/// `‖∇f(x)‖² ≥ 2μ (f(x) − f*) (1 − slack)` at sampled points. `worst` is the
/// smallest observed ratio `‖∇f‖² / (2 (f − f*))`, compared against `μ`.
pub fn check_pl(
    set: &dyn LocalObjectiveSet,
    samples: usize,
    slack: f64,
    center: Option<&[f64]>,
    rng: &mut RandomStream,
) -> CheckOutcome {
    let name = "PL";
    let (Some(mu), Some(f_star)) = (set.constants().pl, set.constants().f_star.known()) else {
        return CheckOutcome::skipped(name, "PL constant or optimal value not declared");
    };
    let mut worst = f64::INFINITY;
    let mut violations = 0usize;
    for k in 0..samples {
        let x = sample_point(set, center, k, rng);
        let gap = mean_value(set, &x) - f_star;
        let g2 = norm2(&mean_gradient(set, &x)).powi(2);
        if gap <= 0.0 {
            continue;
        }
        let ratio = g2 / (2.0 * gap);
        if ratio < mu * (1.0 - slack) {
            violations += 1;
        }
        worst = worst.min(ratio);
    }
    CheckOutcome {
        name: name.into(),
        passed: violations == 0,
        worst,
        threshold: mu,
        detail: format!("{violations} violations over {samples} samples; min ratio vs declared μ = {mu:e}"),
    }
}
