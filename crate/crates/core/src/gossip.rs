//! Chebyshev-accelerated gossip.
//!
//! `Y^{k+1} = (1 + η_y) W Y^k − η_y Y^{k−1}` with `Y^{−1} = Y^0`, run for
//! exactly `K` multiplications. Each multiplication is one communication
//! round on the meter.

use thiserror::Error;

use crate::numkit::DenseMatrix;
use crate::objectives::OracleMeter;
use crate::topology::MixingMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GossipError {
    #[error("input has {rows} rows but the mixing matrix has {nodes} nodes")]
    Dimension { rows: usize, nodes: usize },
    #[error("invalid gossip parameter: {0}")]
    Invalid(String),
}

/// Round count, momentum and contraction factor for a given `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GossipConfig {
    pub k: usize,
    pub eta_y: f64,
    /// `‖Y^K − 1ȳ⁰‖ ≤ rho · ‖Y^0 − 1ȳ⁰‖`.
    pub rho: f64,
}

impl GossipConfig {
    /// Uses the measured `λ2` of `w`, clamped to `[0, 1]`.
    pub fn new(w: &MixingMatrix, k: usize) -> Self {
        Self::from_lambda2(w.lambda2(), k)
    }

    pub fn from_lambda2(lambda2: f64, k: usize) -> Self {
        let l2 = lambda2.clamp(0.0, 1.0);
        let eta_y = 1.0 / (1.0 + (1.0 - l2 * l2).sqrt());
        let rate = 1.0 - (1.0 - std::f64::consts::FRAC_1_SQRT_2) * (1.0 - l2).sqrt();
        Self { k, eta_y, rho: 14f64.sqrt() * rate.powi(k as i32) }
    }
}

/// `K = ⌈√2 (4 + ln n) / ((√2 − 1) √γ)⌉`.
pub fn default_round_count(n: usize, gamma: f64) -> Result<usize, GossipError> {
    if n == 0 {
        return Err(GossipError::Invalid("agent count must be positive".into()));
    }
    // Measured gaps of exact averaging can exceed 1 by rounding.
    if !(gamma > 0.0 && gamma <= 1.0 + 1e-12) {
        return Err(GossipError::Invalid(format!("gap {gamma} outside (0, 1]")));
    }
    let gamma = gamma.min(1.0);
    let s2 = std::f64::consts::SQRT_2;
    let k = s2 * (4.0 + (n as f64).ln()) / ((s2 - 1.0) * gamma.sqrt());
    Ok(k.ceil() as usize)
}

/// Runs `cfg.k` accelerated gossip rounds on `y0`, charging `k` communication
/// rounds. `K = 0` returns `y0` unchanged.
pub fn acc_gossip(
    y0: &DenseMatrix,
    w: &MixingMatrix,
    cfg: &GossipConfig,
    meter: &mut OracleMeter,
) -> Result<DenseMatrix, GossipError> {
    let n = w.nodes();
    if y0.rows() != n {
        return Err(GossipError::Dimension { rows: y0.rows(), nodes: n });
    }
    let a = 1.0 + cfg.eta_y;
    let b = cfg.eta_y;
    let mut prev = y0.clone();
    let mut cur = y0.clone();
    let mut next = DenseMatrix::zeros(n, y0.cols());
    for _ in 0..cfg.k {
        for (i, row) in w.sparse_rows().iter().enumerate() {
            let dst = next.row_mut(i);
            dst.iter_mut().zip(prev.row(i)).for_each(|(o, p)| *o = -b * p);
            for &(j, wij) in row {
                let c = a * wij;
                dst.iter_mut().zip(cur.row(j)).for_each(|(o, v)| *o += c * v);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        meter.record_comm_round();
    }
    Ok(cur)
}
