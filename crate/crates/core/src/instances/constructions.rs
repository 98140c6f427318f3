use std::sync::Arc;

use super::chain::{ChainSpec, PL_CONST_A};
use super::fields::{BlockEmbedded, ChainField, FieldSet, LinearSpan, Scaled};
use super::split::{h_set, NetworkSplitSpec};
use super::InstanceError;
use crate::objectives::{Constants, LocalObjectiveSet, OptimalValue};
use crate::topology::{laplacian_mixing, mixing_for_gap, Graph, MixingMatrix};

/// Smoothness of `g_{T,t}`.
pub const CHAIN_SMOOTHNESS: f64 = 37.0;

/// The network an instance was built for.
#[derive(Debug, Clone)]
pub struct NetworkInfo {
    pub graph: Graph,
    pub mixing: MixingMatrix,
    /// Bracket index and weight parameter when the gap was targeted.
    pub gap_bracket: Option<(usize, f64)>,
}

/// Parameters chosen while building an instance.
#[derive(Debug, Clone, Default)]
pub struct ConstructionInfo {
    pub name: &'static str,
    pub agents: usize,
    pub dim: usize,
    pub block_len: Option<usize>,
    /// Block length before the evenness adjustment.
    pub raw_block_len: Option<usize>,
    pub block_count: Option<usize>,
    pub alpha: f64,
    pub beta: f64,
    pub c: Vec<usize>,
    pub sigma: Option<usize>,
    pub c_sigma: Vec<usize>,
    /// A known global minimizer of the average.
    pub minimizer: Option<Vec<f64>>,
    pub chain: Option<Arc<ChainSpec>>,
    pub notes: Vec<String>,
}

pub struct HardInstance {
    pub set: Box<dyn LocalObjectiveSet>,
    pub info: ConstructionInfo,
    pub network: Option<NetworkInfo>,
}

impl std::fmt::Debug for HardInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HardInstance")
            .field("info", &self.info)
            .field("constants", self.set.constants())
            .finish_non_exhaustive()
    }
}

fn positive(name: &str, v: f64) -> Result<(), InstanceError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(InstanceError::Invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `2⌊log_{8/7}(ratio)⌋`, rejecting fewer than two blocks.
fn block_count(ratio: f64) -> Result<usize, InstanceError> {
    let t = 2 * ((ratio.ln() / (8.0f64 / 7.0).ln()).floor().max(0.0) as usize);
    if t < 2 {
        return Err(InstanceError::Infeasible(format!("accuracy ratio {ratio} gives fewer than two blocks")));
    }
    Ok(t)
}

pub(crate) fn chain_constants(t_blk: usize) -> Constants {
    Constants {
        smoothness: Some(CHAIN_SMOOTHNESS),
        pl: Some(1.0 / (PL_CONST_A * t_blk as f64)),
        f_star: OptimalValue::Known(0.0),
        length_scale: 1.0,
    }
}

/// Finite-sum instance for the incremental-oracle lower bound:
/// `f_i(x) = α g_{T,t}(β U_i x)` with `T = ⌊L/(37a√n μ)⌋`,
/// `t = 2⌊log_{8/7}(Δ/(3ε))⌋`, `α = Δ/(3T)`, `β = √(3√n L T/(37Δ))`.
///
/// `T` is normalized to an even value (odd `T ≥ 3` drops by one, `T = 1`
/// becomes 2). The declared constants are the ones the construction
/// guarantees for the adjusted `T`; with `T` raised from 1 the PL constant
/// falls below the requested `μ`, which is reported in `info.notes`.
pub fn ifo_hard(l: f64, mu: f64, n: usize, delta: f64, eps: f64) -> Result<HardInstance, InstanceError> {
    for (name, v) in [("L", l), ("mu", mu), ("Delta", delta), ("eps", eps)] {
        positive(name, v)?;
    }
    if n == 0 {
        return Err(InstanceError::Invalid("n must be at least 1".into()));
    }
    if !(eps < 0.005 * delta) {
        return Err(InstanceError::Infeasible(format!(
            "requires eps < 0.005 * Delta, got eps = {eps}, Delta = {delta}"
        )));
    }
    let sqrt_n = (n as f64).sqrt();
    let bound = 37.0 * PL_CONST_A * sqrt_n * mu;
    if !(l >= bound) {
        return Err(InstanceError::Infeasible(format!("requires L >= 37 a sqrt(n) mu = {bound}, got L = {l}")));
    }
    let raw = (l / bound).floor() as usize;
    let mut notes = Vec::new();
    let t_blk = match raw {
        1 => 2,
        r if r % 2 == 1 => r - 1,
        r => r,
    };
    if t_blk != raw {
        notes.push(format!("block length {raw} adjusted to even {t_blk}"));
    }
    let t_cnt = block_count(delta / (3.0 * eps))?;
    let alpha = delta / (3.0 * t_blk as f64);
    let beta = (3.0 * sqrt_n * l * t_blk as f64 / (37.0 * delta)).sqrt();
    let spec = Arc::new(ChainSpec::new(t_blk, t_cnt)?);
    let scaled = Scaled::new(ChainField::g(spec.clone()), alpha, beta)?;
    let scaled_constants = scaled.scale_constants(&chain_constants(t_blk));
    let set = BlockEmbedded::new(scaled, n, &scaled_constants)?;
    let declared_pl = set.constants().pl.unwrap_or(0.0);
    if declared_pl < mu {
        notes.push(format!("guaranteed PL constant {declared_pl:e} is below the requested {mu:e}"));
    }
    let block_min: Vec<f64> = spec.b().iter().map(|b| b / beta).collect();
    let minimizer = block_min.repeat(n);
    let info = ConstructionInfo {
        name: "ifo-hard",
        agents: n,
        dim: set.dim(),
        block_len: Some(t_blk),
        raw_block_len: Some(raw),
        block_count: Some(t_cnt),
        alpha,
        beta,
        minimizer: Some(minimizer),
        chain: Some(spec),
        notes,
        ..Default::default()
    };
    Ok(HardInstance { set: Box::new(set), info, network: None })
}

/// Instance for the linear-span lower bound: `d = 2n²`, `c = √(LΔ)`,
/// `f_i(x) = c⟨u_i, x⟩ + (L/2)‖x‖²` with `u_i` the indicator of the `i`-th
/// run of `2n` coordinates. Declares smoothness `L`, PL constant `μ` and
/// `f* = −c²/L`.
pub fn linear_span(l: f64, mu: f64, n: usize, delta: f64) -> Result<HardInstance, InstanceError> {
    for (name, v) in [("L", l), ("mu", mu), ("Delta", delta)] {
        positive(name, v)?;
    }
    if n == 0 {
        return Err(InstanceError::Invalid("n must be at least 1".into()));
    }
    if !(l >= mu) {
        return Err(InstanceError::Infeasible(format!("requires L >= mu, got L = {l}, mu = {mu}")));
    }
    let c = (l * delta).sqrt();
    let x_star = c / (n as f64 * l);
    let constants = Constants {
        smoothness: Some(l),
        pl: Some(mu),
        f_star: OptimalValue::Known(-c * c / l),
        length_scale: x_star.max(1.0),
    };
    let set = LinearSpan::new(n, c, l, constants);
    let info = ConstructionInfo {
        name: "theorem2",
        agents: n,
        dim: set.dim(),
        alpha: c,
        beta: 1.0,
        minimizer: Some(set.minimizer()),
        ..Default::default()
    };
    Ok(HardInstance { set: Box::new(set), info, network: None })
}

/// `f_i(x) = α h_i(β x)` for a network split, with the declared constants
/// scaled accordingly.
fn scaled_h_set(
    split: &NetworkSplitSpec,
    spec: Arc<ChainSpec>,
    alpha: f64,
    beta: f64,
) -> Result<FieldSet<Scaled<ChainField>>, InstanceError> {
    let base = h_set(split, spec)?;
    let fields = base.fields().iter().map(|f| Scaled::new(f.clone(), alpha, beta)).collect::<Result<Vec<_>, _>>()?;
    let constants = fields[0].scale_constants(crate::objectives::LocalObjectiveSet::constants(&base));
    FieldSet::new(fields, constants)
}

fn split_info(
    name: &'static str,
    split: &NetworkSplitSpec,
    spec: Arc<ChainSpec>,
    alpha: f64,
    beta: f64,
) -> ConstructionInfo {
    ConstructionInfo {
        name,
        agents: split.graph().nodes(),
        dim: spec.dim(),
        block_len: Some(spec.block_len()),
        raw_block_len: Some(spec.block_len()),
        block_count: Some(spec.block_count()),
        alpha,
        beta,
        c: split.c().to_vec(),
        sigma: Some(split.sigma()),
        c_sigma: split.c_sigma().to_vec(),
        minimizer: Some(spec.b().iter().map(|b| b / beta).collect()),
        chain: Some(spec),
        notes: Vec::new(),
    }
}

/// Block length and count of the experiment instance.
pub const EXPERIMENT_BLOCK_LEN: usize = 2;
pub const EXPERIMENT_BLOCK_COUNT: usize = 72;
pub const EXPERIMENT_SIGMA: usize = 29;

/// The benchmark instance on a path of `n` agents: `T = 2`, `t = 72`,
/// `C = {first node}`, `σ = 29`, `f_i(x) = (16/3) h_i(√(12a) x)`.
pub fn experiment_instance(n: usize) -> Result<HardInstance, InstanceError> {
    if n < 2 {
        return Err(InstanceError::Invalid("experiment needs at least two agents".into()));
    }
    let graph = Graph::path(n)?;
    let split = NetworkSplitSpec::new(graph.clone(), vec![0], EXPERIMENT_SIGMA)?;
    let spec = Arc::new(ChainSpec::new(EXPERIMENT_BLOCK_LEN, EXPERIMENT_BLOCK_COUNT)?);
    let alpha = 16.0 / 3.0;
    let beta = (12.0 * PL_CONST_A).sqrt();
    let set = scaled_h_set(&split, spec.clone(), alpha, beta)?;
    let mixing = laplacian_mixing(&graph)?;
    Ok(HardInstance {
        set: Box::new(set),
        info: split_info("hard-decentralized", &split, spec, alpha, beta),
        network: Some(NetworkInfo { graph, mixing, gap_bracket: None }),
    })
}

/// Tolerance used when targeting the spectral gap of the network.
pub const DFO_GAP_TOL: f64 = 1e-10;

/// Decentralized instance for the communication lower bound with a network of
/// spectral gap `γ`.
///
/// With `m` the bracket index of `γ` (see [`crate::topology::mixing_for_gap`]):
/// for `m ≥ 3`, `n = m` on a reweighted path, `C` the first `⌈n/32⌉` nodes,
/// `σ = ⌈15n/16⌉ − 1`, `T = 2⌊κ/(194a)⌋`, `β = √(3LT/(97Δ))`; for `m = 2`,
/// `n = 3` on a weighted triangle, `C = {first node}`, `σ = 1`,
/// `T = 2⌊κ/(78a)⌋`, `β = √(LT/(13Δ))`. Both use `α = nΔ/(3T)` and
/// `t = 2⌊log_{8/7}(2Δ/(3ε))⌋`.
pub fn dfo_hard(l: f64, mu: f64, gamma: f64, delta: f64, eps: f64) -> Result<HardInstance, InstanceError> {
    for (name, v) in [("L", l), ("mu", mu), ("Delta", delta), ("eps", eps)] {
        positive(name, v)?;
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(InstanceError::Invalid(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    if !(eps < 0.01 * delta) {
        return Err(InstanceError::Infeasible(format!(
            "requires eps < 0.01 * Delta, got eps = {eps}, Delta = {delta}"
        )));
    }
    let m = crate::topology::path_length_for_gap(gamma);
    let kappa = l / mu;
    let (factor, label) = if m >= 3 { (194.0, "194") } else { (78.0, "78") };
    if !(l >= factor * PL_CONST_A * mu) {
        return Err(InstanceError::Infeasible(format!(
            "requires L >= {label} a mu = {}, got L = {l}",
            factor * PL_CONST_A * mu
        )));
    }
    let gap = mixing_for_gap(gamma, DFO_GAP_TOL)?;
    let n = gap.graph.nodes();
    let t_blk = 2 * (kappa / (factor * PL_CONST_A)).floor() as usize;
    let t_cnt = block_count(2.0 * delta / (3.0 * eps))?;
    let (c, sigma, beta) = if m >= 3 {
        let c: Vec<usize> = (0..n.div_ceil(32)).collect();
        let sigma = (15 * n).div_ceil(16) - 1;
        (c, sigma, (3.0 * l * t_blk as f64 / (97.0 * delta)).sqrt())
    } else {
        (vec![0], 1, (l * t_blk as f64 / (13.0 * delta)).sqrt())
    };
    let alpha = n as f64 * delta / (3.0 * t_blk as f64);
    let split = NetworkSplitSpec::new(gap.graph.clone(), c, sigma)?;
    let spec = Arc::new(ChainSpec::new(t_blk, t_cnt)?);
    let set = scaled_h_set(&split, spec.clone(), alpha, beta)?;
    let mut info = split_info("dfo-hard", &split, spec, alpha, beta);
    info.notes.push(format!("gap bracket m = {m}, weight parameter l = {}", gap.l));
    Ok(HardInstance {
        set: Box::new(set),
        info,
        network: Some(NetworkInfo { graph: gap.graph, mixing: gap.mixing, gap_bracket: Some((gap.m, gap.l)) }),
    })
}
