//! The property suite run by `check-instance` and the acceptance tests.

use std::sync::Arc;

use super::checks::{check_block_zero_chain, check_h_average, check_span_gap, check_split_identity, check_zero_chain};
use super::constructions::chain_constants;
use super::fields::{ChainField, FieldSet, LinearSpan};
use super::psi::{psi_grad_unchecked, psi_unchecked};
use super::split::{h_set, NetworkSplitSpec};
use super::{ChainSpec, HardInstance};
use crate::numkit::RandomStream;
use crate::objectives::{
    check_gradients, check_mean_squared_smoothness, check_pl, mean_objective_gap, CheckOutcome, LocalObjectiveSet,
};

/// Sample sizes for the suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// Points for gradient and identity checks.
    pub samples: usize,
    /// Point pairs (and points) for the smoothness and PL checks.
    pub pairs: usize,
    /// Zero-chain trials.
    pub trials: usize,
    pub gradient_tol: f64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { samples: 100, pairs: 1000, trials: 200, gradient_tol: 1e-6, seed: 0 }
    }
}

/// Relative slack on declared constants in the sampled inequalities.
pub const CONSTANT_SLACK: f64 = 1e-9;

/// `ψ'_θ` against central differences next to and on the branch boundaries
/// `31θ/32`, `θ`, `33θ/32`, with steps that stay on one side of a kink when
/// the point is off it. Errors are relative to `max(|ψ'|, θ)`.
pub fn check_psi_boundaries(thetas: &[f64]) -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for &theta in thetas {
        for x0 in [31.0 * theta / 32.0, theta, 33.0 * theta / 32.0] {
            let mut probes = vec![(x0, 1e-9 * theta)];
            for off in [1e-6, 1e-9] {
                probes.push((x0 - off * theta, 0.5 * off * theta));
                probes.push((x0 + off * theta, 0.5 * off * theta));
            }
            for (x, h) in probes {
                let fd = (psi_unchecked(theta, x + h) - psi_unchecked(theta, x - h)) / (2.0 * h);
                let g = psi_grad_unchecked(theta, x);
                let e = (fd - g).abs() / g.abs().max(theta);
                if !(e <= worst) {
                    worst = e;
                    at = format!("theta = {theta}, x = {x}");
                }
            }
        }
    }
    CheckOutcome {
        name: "psi boundary gradients".into(),
        passed: worst <= 1e-6,
        worst,
        threshold: 1e-6,
        detail: format!("worst at {at}"),
    }
}

/// Checks on the bare chain: zero chain, 37-smoothness, `1/(aT)`-PL around
/// `b`, `g(0) ≤ 3T`, piece gradients and (for even `T`) the split identity.
pub fn chain_suite(spec: &Arc<ChainSpec>, cfg: &SuiteConfig, rng: &mut RandomStream) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let g = ChainField::g(spec.clone());
    out.push(check_zero_chain(&g, cfg.trials, rng));
    let single = FieldSet::new(vec![g], chain_constants(spec.block_len())).expect("one field is a valid set");
    out.push(named(
        "chain smoothness 37",
        check_mean_squared_smoothness(&single, cfg.pairs, CONSTANT_SLACK, None, rng),
    ));
    out.push(named("chain PL 1/(aT)", check_pl(&single, cfg.pairs, CONSTANT_SLACK, Some(spec.b()), rng)));
    out.push(named("chain gradient", check_gradients(&single, cfg.samples, cfg.gradient_tol, None, rng)));
    let g0 = spec.g_value(&vec![0.0; spec.dim()]).unwrap_or(f64::NAN);
    let bound = 3.0 * spec.block_len() as f64;
    out.push(CheckOutcome {
        name: "g(0) <= 3T".into(),
        passed: g0 <= bound,
        worst: g0,
        threshold: bound,
        detail: format!("T = {}, t = {}", spec.block_len(), spec.block_count()),
    });
    if spec.supports_split() {
        out.push(check_split_identity(spec, cfg.samples, rng));
        let pieces = [("r", 1.0, 0.0, 0.0), ("q1", 0.0, 1.0, 0.0), ("q2", 0.0, 0.0, 1.0)];
        let fields = pieces
            .iter()
            .map(|&(_, wr, w1, w2)| ChainField::split(spec.clone(), wr, w1, w2).expect("even T"))
            .collect();
        let set = FieldSet::new(fields, chain_constants(spec.block_len())).expect("same dimension");
        out.push(named("r/q1/q2 gradients", check_gradients(&set, cfg.samples, cfg.gradient_tol, None, rng)));
    }
    out
}

/// Every check that applies to `inst`: gradients, declared smoothness and PL
/// constants around the known minimizer, chain properties, and the
/// construction-specific identities.
pub fn property_suite(inst: &HardInstance, cfg: &SuiteConfig) -> Vec<CheckOutcome> {
    let mut rng = RandomStream::new(cfg.seed);
    let set = inst.set.as_ref();
    let center = inst.info.minimizer.as_deref();
    let mut out = vec![
        check_gradients(set, cfg.samples, cfg.gradient_tol, center, &mut rng),
        check_mean_squared_smoothness(set, cfg.pairs, CONSTANT_SLACK, center, &mut rng),
        check_pl(set, cfg.pairs, CONSTANT_SLACK, center, &mut rng),
    ];
    if let Some(spec) = &inst.info.chain {
        out.extend(chain_suite(spec, cfg, &mut rng));
        if inst.info.sigma.is_none() && inst.set.agents() > 1 {
            out.push(check_block_zero_chain(set, spec.dim(), cfg.trials, &mut rng));
        }
    }
    if let (Some(spec), Some(sigma), Some(net)) = (&inst.info.chain, inst.info.sigma, &inst.network) {
        match NetworkSplitSpec::new(net.graph.clone(), inst.info.c.clone(), sigma)
            .and_then(|split| h_set(&split, spec.clone()))
        {
            Ok(h) => out.push(check_h_average(&h, spec, cfg.samples, &mut rng)),
            Err(e) => out.push(failed("average identity", e.to_string())),
        }
    }
    if let Some((span, delta)) = span_instance(inst) {
        out.push(check_span_gap(&span, delta, cfg.samples, &mut rng));
    }
    out
}

/// The linear-span set and `Δ = c²/L` rebuilt from the declared constants.
fn span_instance(inst: &HardInstance) -> Option<(LinearSpan, f64)> {
    if inst.info.name != "theorem2" {
        return None;
    }
    let c = inst.set.constants().clone();
    let l = c.smoothness?;
    let delta = inst.info.alpha * inst.info.alpha / l;
    Some((LinearSpan::new(inst.set.agents(), inst.info.alpha, l, c), delta))
}

/// One row of the span-gap profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanGapRow {
    pub k: usize,
    pub gap: f64,
    pub expected: f64,
}

/// Gap of the point that agrees with the minimizer on the first `k` agent
/// supports, for `k = 0..=n`, against `Δ(1 − k/n)`. `None` unless `inst` is
/// the linear-span instance.
pub fn span_gap_profile(inst: &HardInstance) -> Option<Vec<SpanGapRow>> {
    let (span, delta) = span_instance(inst)?;
    let n = span.agents();
    let xs = span.minimizer();
    let mut x = vec![0.0; span.dim()];
    let mut rows = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            for j in span.support(k - 1) {
                x[j] = xs[j];
            }
        }
        let gap = mean_objective_gap(inst.set.as_ref(), &x).unwrap_or(f64::NAN);
        rows.push(SpanGapRow { k, gap, expected: delta * (1.0 - k as f64 / n as f64) });
    }
    Some(rows)
}

fn named(name: &str, mut o: CheckOutcome) -> CheckOutcome {
    o.name = name.into();
    o
}

fn failed(name: &str, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.into(), passed: false, worst: f64::NAN, threshold: f64::NAN, detail }
}
