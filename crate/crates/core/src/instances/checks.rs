//! Structural checks of the chain constructions.

use super::chain::{ChainPart, ChainSpec};
use super::constructions::CHAIN_SMOOTHNESS;
use super::fields::LinearSpan;
use crate::numkit::RandomStream;
use crate::objectives::{mean_objective_gap, CheckOutcome, LocalObjectiveSet, ScalarField};

fn outcome(name: &str, worst: f64, threshold: f64, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.into(), passed, worst, threshold, detail }
}

/// Draws `x` with `supp(x) ⊆ {0..k}` and checks that `∇field(x)` vanishes
/// beyond index `k` (0-based), i.e. at most one new coordinate is revealed.
pub fn check_zero_chain(field: &dyn ScalarField, trials: usize, rng: &mut RandomStream) -> CheckOutcome {
    let d = field.dim();
    let mut g = vec![0.0; d];
    let mut worst = 0.0f64;
    let mut at = String::new();
    for trial in 0..trials {
        let k = rng.below(d + 1);
        let mut x = vec![0.0; d];
        x[..k].iter_mut().for_each(|v| *v = 4.0 * rng.uniform() - 2.0);
        field.gradient(&x, &mut g);
        let leak = g.iter().skip(k + 1).fold(0.0f64, |m, v| m.max(v.abs()));
        if leak > worst {
            worst = leak;
            at = format!("trial {trial}, k = {k}");
        }
    }
    outcome("zero chain", worst, 0.0, worst == 0.0, format!("largest gradient entry past the support {at}"))
}

/// Per-block zero chain for block-embedded sets: with block `i` of `x`
/// supported on its first `k` coordinates, `∇f_i(x)` reveals at most one more.
pub fn check_block_zero_chain(
    set: &dyn LocalObjectiveSet,
    block: usize,
    trials: usize,
    rng: &mut RandomStream,
) -> CheckOutcome {
    let n = set.agents();
    let d = set.dim();
    let mut g = vec![0.0; d];
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let agent = rng.below(n);
        let k = rng.below(block + 1);
        let mut x = vec![0.0; d];
        let start = agent * block;
        x[start..start + k].iter_mut().for_each(|v| *v = 4.0 * rng.uniform() - 2.0);
        set.gradient(agent, &x, &mut g);
        for (j, v) in g.iter().enumerate() {
            let inside = j >= start && j <= start + k;
            if !inside {
                worst = worst.max(v.abs());
            }
        }
    }
    outcome("block zero chain", worst, 0.0, worst == 0.0, "largest gradient entry outside block prefix".into())
}

fn random_point(d: usize, rng: &mut RandomStream) -> Vec<f64> {
    rng.uniform_box(d, 2.0)
}

/// `q1(b − x) + q2(b − x) + r(x) = g(x)` to `1e-10 (1 + |g|)`.
pub fn check_split_identity(spec: &ChainSpec, samples: usize, rng: &mut RandomStream) -> CheckOutcome {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = random_point(spec.dim(), rng);
        let y: Vec<f64> = spec.b().iter().zip(&x).map(|(b, x)| b - x).collect();
        let g = spec.g_value(&x).unwrap_or(f64::NAN);
        let parts = spec.q_value(ChainPart::Q1, &y).unwrap_or(f64::NAN)
            + spec.q_value(ChainPart::Q2, &y).unwrap_or(f64::NAN)
            + spec.r_value(&x).unwrap_or(f64::NAN);
        let rel = (parts - g).abs() / (1.0 + g.abs());
        worst = if rel.is_nan() { f64::INFINITY } else { worst.max(rel) };
    }
    outcome("split identity", worst, 1e-10, worst <= 1e-10, format!("{samples} points"))
}

/// `(1/n) Σ h_i = g/n` to `1e-10 (1 + |g|/n)`; `set` must be the unscaled
/// split set over `spec`.
pub fn check_h_average(
    set: &dyn LocalObjectiveSet,
    spec: &ChainSpec,
    samples: usize,
    rng: &mut RandomStream,
) -> CheckOutcome {
    let n = set.agents() as f64;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = random_point(spec.dim(), rng);
        let h = crate::objectives::mean_value(set, &x);
        let g = spec.g_value(&x).unwrap_or(f64::NAN) / n;
        let rel = (h - g).abs() / (1.0 + g.abs());
        worst = if rel.is_nan() { f64::INFINITY } else { worst.max(rel) };
    }
    outcome("average identity", worst, 1e-10, worst <= 1e-10, format!("{samples} points"))
}

/// For `k = 0..=n`, the point equal to the minimizer on the supports of the
/// first `k` agents and zero elsewhere has gap `Δ(1 − k/n)`; random points
/// confined to `k ≤ n/2` supports have gap at least `Δ(1 − k/n)`.
pub fn check_span_gap(set: &LinearSpan, delta: f64, samples: usize, rng: &mut RandomStream) -> CheckOutcome {
    let n = set.agents();
    let xs = set.minimizer();
    let mut worst = 0.0f64;
    for k in 0..=n {
        let mut x = vec![0.0; set.dim()];
        for a in 0..k {
            for j in set.support(a) {
                x[j] = xs[j];
            }
        }
        let gap = mean_objective_gap(set, &x).unwrap_or(f64::NAN);
        let want = delta * (1.0 - k as f64 / n as f64);
        let err = (gap - want).abs() / delta;
        worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
    }
    let mut below = 0usize;
    for _ in 0..samples {
        let k = rng.below(n / 2 + 1);
        let mut agents: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + rng.below(n - i);
            agents.swap(i, j);
        }
        let mut x = vec![0.0; set.dim()];
        for &a in &agents[..k] {
            for j in set.support(a) {
                x[j] = xs[j] * (1.0 + rng.standard_normal());
            }
        }
        let gap = mean_objective_gap(set, &x).unwrap_or(f64::NAN);
        let bound = delta * (1.0 - k as f64 / n as f64);
        if !(gap >= bound * (1.0 - 1e-12)) || gap < 0.5 * delta * (1.0 - 1e-12) {
            below += 1;
        }
    }
    outcome(
        "span gap",
        worst,
        1e-12,
        worst <= 1e-12 && below == 0,
        format!("exact-gap residual; {below} of {samples} sparse samples below the bound"),
    )
}

fn sparse_chain(t_blk: usize, delta: f64) -> Option<(ChainSpec, usize)> {
    let t_cnt = 2 * ((2.0 / (3.0 * delta)).ln() / (8.0f64 / 7.0).ln()).floor() as usize;
    ChainSpec::new(t_blk, t_cnt.max(2)).ok().map(|s| (s, t_cnt))
}

/// Weak form of the sparse-gap statement: with `t = 2⌊log_{8/7}(2/(3δ))⌋` and
/// `supp(x)` in the first half of the coordinates, `g(x) > 3Tδ` at random
/// points of `[-2, 2]` on that half.
///
/// The bound does not hold uniformly: see [`restricted_sparse_minimum`].
pub fn check_sparse_gap(t_blk: usize, delta: f64, samples: usize, rng: &mut RandomStream) -> CheckOutcome {
    let Some((spec, t_cnt)) = sparse_chain(t_blk, delta) else {
        return CheckOutcome::skipped("sparse gap", "invalid chain");
    };
    let d = spec.dim();
    let half = d / 2;
    let threshold = 3.0 * t_blk as f64 * delta;
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let mut x = vec![0.0; d];
        x[..half].copy_from_slice(&rng.uniform_box(half, 2.0));
        let v = spec.g_value(&x).unwrap_or(f64::NAN);
        worst = if v.is_nan() { f64::NEG_INFINITY } else { worst.min(v) };
    }
    outcome(
        "sparse gap",
        worst,
        threshold,
        worst > threshold,
        format!("T = {t_blk}, t = {t_cnt}, delta = {delta}; minimum g over random half-supported points"),
    )
}

/// Minimum of `g` over points supported on the first half of the coordinates,
/// found by projected gradient descent started at `b` restricted to that half.
///
/// Starting from `b` leaves only the junction term and the second-half `ψ`
/// terms, which are of order `(7/8)^t ≈ (3δ/2)²`. The infimum therefore scales
/// like `Tδ²` and sits well below `3Tδ` for small `δ`.
pub fn restricted_sparse_minimum(t_blk: usize, delta: f64) -> Option<f64> {
    let (spec, _) = sparse_chain(t_blk, delta)?;
    let half = spec.dim() / 2;
    let mut x = vec![0.0; spec.dim()];
    x[..half].copy_from_slice(&spec.b()[..half]);
    let mut best = spec.g_value(&x).ok()?;
    for _ in 0..5000 {
        let g = spec.g_grad(&x).ok()?;
        for j in 0..half {
            x[j] -= g[j] / CHAIN_SMOOTHNESS;
        }
    }
    best = best.min(spec.g_value(&x).ok()?);
    Some(best)
}
