//! The chain functions `q_{T,t}`, its split `q1 + q2`, the `ψ` sum `r`, and
//! `g_{T,t}(x) = q(b − x) + r(x)`.

use super::psi::{psi_grad_unchecked, psi_unchecked};
use super::InstanceError;

/// Ratio between consecutive blocks of `b`.
pub const CHAIN_RATIO: f64 = 0.875;

/// The PL constant of `g_{T,t}` is `1/(a T)` with this `a`.
pub const PL_CONST_A: f64 = 19708.0;

/// Which quadratic chain to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainPart {
    /// `q_{T,t}`.
    Full,
    /// Pairs `(y[2k], y[2k+1])`.
    Q1,
    /// The cross-block links plus pairs `(y[2k−1], y[2k])` inside blocks.
    Q2,
}

/// One squared term `(coef · y[left] − y[right])²`; `left = None` is the
/// virtual zero coordinate in front of the vector.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    left: Option<usize>,
    coef: f64,
    right: usize,
}

/// Block length `T`, block count `t`, and the target vector `b` with
/// `b[kT + τ] = (7/8)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    t_blk: usize,
    t_cnt: usize,
    b: Vec<f64>,
    full: Vec<Term>,
    q1: Vec<Term>,
    q2: Vec<Term>,
}

impl ChainSpec {
    pub fn new(t_blk: usize, t_cnt: usize) -> Result<Self, InstanceError> {
        if t_blk == 0 || t_cnt == 0 {
            return Err(InstanceError::Invalid(format!("chain needs T >= 1 and t >= 1, got T = {t_blk}, t = {t_cnt}")));
        }
        // Built by repeated multiplication so that 0.875 * b[iT − 1] reproduces
        // b[iT] bit for bit; the zero-chain property depends on it.
        let mut b = Vec::with_capacity(t_blk * t_cnt);
        let mut level = 1.0f64;
        for k in 0..t_cnt {
            if k > 0 {
                level *= CHAIN_RATIO;
            }
            b.extend(std::iter::repeat_n(level, t_blk));
        }
        let mut full = Vec::new();
        let mut q1 = Vec::new();
        let mut q2 = Vec::new();
        for i in 0..t_cnt {
            let start = i * t_blk;
            let cross = Term { left: start.checked_sub(1), coef: CHAIN_RATIO, right: start };
            full.push(cross);
            q2.push(cross);
            for j in 1..t_blk {
                let term = Term { left: Some(start + j - 1), coef: 1.0, right: start + j };
                full.push(term);
                // Within a block, pairs starting at an even 0-based index go to
                // q1 and the rest to q2 (T even keeps blocks aligned).
                if (start + j - 1).is_multiple_of(2) {
                    q1.push(term);
                } else {
                    q2.push(term);
                }
            }
        }
        Ok(Self { t_blk, t_cnt, b, full, q1, q2 })
    }

    pub fn block_len(&self) -> usize {
        self.t_blk
    }

    pub fn block_count(&self) -> usize {
        self.t_cnt
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// The split `q = q1 + q2` is only defined for even `T`.
    pub fn supports_split(&self) -> bool {
        self.t_blk.is_multiple_of(2)
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<(), InstanceError> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(InstanceError::Dimension { expected: self.dim(), got: x.len() })
        }
    }

    fn terms(&self, part: ChainPart) -> Result<&[Term], InstanceError> {
        match part {
            ChainPart::Full => Ok(&self.full),
            _ if !self.supports_split() => Err(InstanceError::Invalid(format!(
                "the q1/q2 split needs an even block length, got T = {}",
                self.t_blk
            ))),
            ChainPart::Q1 => Ok(&self.q1),
            ChainPart::Q2 => Ok(&self.q2),
        }
    }

    /// `q(b − x)` for the chosen part, without allocating `b − x`.
    pub(crate) fn q_shifted_value(&self, part: ChainPart, x: &[f64]) -> f64 {
        let terms = self.terms(part).unwrap_or(&[]);
        let y = |k: usize| self.b[k] - x[k];
        0.5 * terms
            .iter()
            .map(|t| {
                let r = t.left.map_or(0.0, |l| t.coef * y(l)) - y(t.right);
                r * r
            })
            .sum::<f64>()
    }

    /// Adds `w · ∇_x q(b − x)` into `out`.
    pub(crate) fn q_shifted_grad_add(&self, part: ChainPart, x: &[f64], w: f64, out: &mut [f64]) {
        let terms = self.terms(part).unwrap_or(&[]);
        let y = |k: usize| self.b[k] - x[k];
        for t in terms {
            let r = t.left.map_or(0.0, |l| t.coef * y(l)) - y(t.right);
            // d/dx = −d/dy.
            if let Some(l) = t.left {
                out[l] -= w * t.coef * r;
            }
            out[t.right] += w * r;
        }
    }

    /// `r(x) = Σ ψ_{b_i}(b_i − x_i)`.
    pub(crate) fn r_value_unchecked(&self, x: &[f64]) -> f64 {
        self.b.iter().zip(x).map(|(&bi, &xi)| psi_unchecked(bi, bi - xi)).sum()
    }

    /// Adds `w · ∇r(x)` into `out`.
    pub(crate) fn r_grad_add(&self, x: &[f64], w: f64, out: &mut [f64]) {
        for ((o, &bi), &xi) in out.iter_mut().zip(&self.b).zip(x) {
            *o -= w * psi_grad_unchecked(bi, bi - xi);
        }
    }

    /// `q_part(y)` evaluated at an arbitrary argument `y`.
    pub fn q_value(&self, part: ChainPart, y: &[f64]) -> Result<f64, InstanceError> {
        self.check_dim(y)?;
        self.terms(part)?;
        let x: Vec<f64> = self.b.iter().zip(y).map(|(b, y)| b - y).collect();
        Ok(self.q_shifted_value(part, &x))
    }

    /// `∇q_part(y)`.
    pub fn q_grad(&self, part: ChainPart, y: &[f64]) -> Result<Vec<f64>, InstanceError> {
        self.check_dim(y)?;
        self.terms(part)?;
        let x: Vec<f64> = self.b.iter().zip(y).map(|(b, y)| b - y).collect();
        let mut out = vec![0.0; self.dim()];
        // ∇_y q(y) = −∇_x q(b − x).
        self.q_shifted_grad_add(part, &x, -1.0, &mut out);
        Ok(out)
    }

    pub fn r_value(&self, x: &[f64]) -> Result<f64, InstanceError> {
        self.check_dim(x)?;
        Ok(self.r_value_unchecked(x))
    }

    pub fn r_grad(&self, x: &[f64]) -> Result<Vec<f64>, InstanceError> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.dim()];
        self.r_grad_add(x, 1.0, &mut out);
        Ok(out)
    }

    pub fn g_value(&self, x: &[f64]) -> Result<f64, InstanceError> {
        self.check_dim(x)?;
        Ok(self.q_shifted_value(ChainPart::Full, x) + self.r_value_unchecked(x))
    }

    pub fn g_grad(&self, x: &[f64]) -> Result<Vec<f64>, InstanceError> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.dim()];
        self.q_shifted_grad_add(ChainPart::Full, x, 1.0, &mut out);
        self.r_grad_add(x, 1.0, &mut out);
        Ok(out)
    }
}
