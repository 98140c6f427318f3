use std::ops::Range;
use std::sync::Arc;

use super::{Dataset, RegressionError};
use crate::numkit::{symmetric_eigenvalues, DenseMatrix, DEFAULT_EIGEN_TOL};
use crate::objectives::{Constants, LocalObjectiveSet, OptimalValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// `(a_jᵀx − b_j)²`.
    Square,
    /// `log(1 + exp(−b_j a_jᵀx))` with `b_j ∈ {−1, +1}`.
    Logistic,
}

/// Above this dimension, constants come from trace bounds instead of dense
/// eigensolves.
pub const DENSE_EIGEN_LIMIT: usize = 400;

/// `log(1 + exp(−z))` without overflow.
fn log1p_exp_neg(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// `1 / (1 + exp(z))` without overflow.
fn sigmoid_neg(z: f64) -> f64 {
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

#[derive(Debug, Clone)]
pub struct PartitionedSet {
    data: Arc<Dataset>,
    loss: Loss,
    blocks: Vec<Range<usize>>,
    prefactor: f64,
    constants: Constants,
}

impl PartitionedSet {
    pub fn block(&self, agent: usize) -> Range<usize> {
        self.blocks[agent].clone()
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn loss(&self) -> Loss {
        self.loss
    }

    /// `(1/m) Σ ℓ_j(x)`, evaluated sample by sample.
    pub fn empirical_risk(&self, x: &[f64]) -> f64 {
        let m = self.data.samples();
        (0..m).map(|j| self.sample_loss(j, x)).sum::<f64>() / m as f64
    }

    fn sample_loss(&self, j: usize, x: &[f64]) -> f64 {
        let z = self.data.dot(j, x);
        let b = self.data.label(j);
        match self.loss {
            Loss::Square => (z - b).powi(2),
            Loss::Logistic => log1p_exp_neg(b * z),
        }
    }

    /// Derivative of `ℓ_j` with respect to `a_jᵀx`.
    fn sample_slope(&self, j: usize, x: &[f64]) -> f64 {
        let z = self.data.dot(j, x);
        let b = self.data.label(j);
        match self.loss {
            Loss::Square => 2.0 * (z - b),
            Loss::Logistic => -b * sigmoid_neg(b * z),
        }
    }
}

impl LocalObjectiveSet for PartitionedSet {
    fn agents(&self) -> usize {
        self.blocks.len()
    }

    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn value(&self, agent: usize, x: &[f64]) -> f64 {
        self.prefactor * self.block(agent).map(|j| self.sample_loss(j, x)).sum::<f64>()
    }

    fn gradient(&self, agent: usize, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for j in self.block(agent) {
            let s = self.prefactor * self.sample_slope(j, x);
            for &(k, v) in self.data.row(j) {
                out[k] += s * v;
            }
        }
    }

    fn constants(&self) -> &Constants {
        &self.constants
    }
}

/// Splits `data` into `n` contiguous blocks of `⌈m/n⌉` samples (the tail may
/// be shorter or empty) with prefactor `n/m`.
///
/// Declared constants: smoothness `sqrt((1/n) Σ λmax(H_i)²)` where `H_i`
/// bounds the Hessian of `f_i` (`2 Σ a aᵀ` or `¼ Σ a aᵀ`, times `n/m`); for the
/// square loss the PL constant is the smallest positive eigenvalue of
/// `(2/m) AᵀA`. Above [`DENSE_EIGEN_LIMIT`] features, `λmax` is replaced by the
/// trace and no PL constant is declared. `f*` is left unknown.
pub fn partitioned_regression_set(data: Dataset, n: usize, loss: Loss) -> Result<PartitionedSet, RegressionError> {
    let m = data.samples();
    if n == 0 || n > m {
        return Err(RegressionError::Invalid(format!("need 1 <= n <= m agents, got n = {n}, m = {m}")));
    }
    if data.dim() == 0 {
        return Err(RegressionError::Invalid("dataset has no features".into()));
    }
    if loss == Loss::Logistic && data.labels().iter().any(|&b| b != 1.0 && b != -1.0) {
        return Err(RegressionError::Invalid("logistic loss needs labels in {-1, +1}".into()));
    }
    let size = m.div_ceil(n);
    let blocks: Vec<Range<usize>> = (0..n).map(|i| (i * size).min(m)..((i + 1) * size).min(m)).collect();
    let prefactor = n as f64 / m as f64;
    let curvature = match loss {
        Loss::Square => 2.0,
        Loss::Logistic => 0.25,
    };
    let d = data.dim();
    let (smoothness, pl) = if d <= DENSE_EIGEN_LIMIT {
        let gram = |range: Range<usize>| {
            let mut h = DenseMatrix::zeros(d, d);
            for j in range {
                let row = data.row(j);
                for &(a, va) in row {
                    for &(b, vb) in row {
                        h.set(a, b, h.get(a, b) + va * vb);
                    }
                }
            }
            h
        };
        let mut acc = 0.0;
        for r in &blocks {
            let lmax = symmetric_eigenvalues(&gram(r.clone()), DEFAULT_EIGEN_TOL)
                .map_err(|e| RegressionError::Invalid(e.to_string()))?[0];
            acc += (prefactor * curvature * lmax).powi(2);
        }
        let smooth = (acc / n as f64).sqrt();
        let pl = if loss == Loss::Square {
            let ev = symmetric_eigenvalues(&gram(0..m), DEFAULT_EIGEN_TOL)
                .map_err(|e| RegressionError::Invalid(e.to_string()))?;
            let top = ev[0];
            ev.iter().rev().find(|&&v| v > 1e-10 * top).map(|v| 2.0 * v / m as f64)
        } else {
            None
        };
        (smooth, pl)
    } else {
        let mut acc = 0.0;
        for r in &blocks {
            let tr: f64 = r.clone().flat_map(|j| data.row(j).iter().map(|(_, v)| v * v)).sum();
            acc += (prefactor * curvature * tr).powi(2);
        }
        ((acc / n as f64).sqrt(), None)
    };
    let constants = Constants { smoothness: Some(smoothness), pl, f_star: OptimalValue::Unknown, length_scale: 1.0 };
    Ok(PartitionedSet { data: Arc::new(data), loss, blocks, prefactor, constants })
}

#[cfg(test)]
mod tests {
    use super::super::{parse_libsvm, synth_regression};
    use super::*;
    use crate::numkit::RandomStream;
    use crate::objectives::{check_gradients, mean_value};

    #[test]
    fn logistic_at_zero_is_log_two() {
        let ds = synth_regression(12, 3, 0.0, 1, Loss::Logistic).unwrap();
        let set = partitioned_regression_set(ds, 4, Loss::Logistic).unwrap();
        assert!((mean_value(&set, &[0.0; 3]) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn square_single_sample() {
        let ds = parse_libsvm("1 1:1", None).unwrap();
        let set = partitioned_regression_set(ds, 1, Loss::Square).unwrap();
        assert_eq!(mean_value(&set, &[0.0]), 1.0);
    }

    #[test]
    fn partition_identity() {
        let ds = synth_regression(23, 4, 0.3, 2, Loss::Square).unwrap();
        let set = partitioned_regression_set(ds, 5, Loss::Square).unwrap();
        assert_eq!(set.block(4), 20..23);
        let mut rng = RandomStream::new(3);
        for _ in 0..50 {
            let x = rng.uniform_box(4, 2.0);
            let a = mean_value(&set, &x);
            let b = set.empirical_risk(&x);
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn ragged_partition_may_leave_empty_agents() {
        let ds = synth_regression(5, 2, 0.0, 2, Loss::Square).unwrap();
        let set = partitioned_regression_set(ds, 4, Loss::Square).unwrap();
        assert_eq!(set.block(3), 5..5);
        assert_eq!(set.value(3, &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn rejects_bad_partitions() {
        let ds = synth_regression(3, 2, 0.0, 2, Loss::Square).unwrap();
        assert!(partitioned_regression_set(ds.clone(), 4, Loss::Square).is_err());
        assert!(partitioned_regression_set(ds, 2, Loss::Logistic).is_err());
    }

    #[test]
    fn zero_noise_square_vanishes_at_truth() {
        let ds = synth_regression(10, 30, 0.0, 4, Loss::Square).unwrap();
        let xt = ds.x_true.clone().unwrap();
        let set = partitioned_regression_set(ds, 2, Loss::Square).unwrap();
        assert!(mean_value(&set, &xt) < 1e-24);
        // d > m: rank-deficient, still a positive PL constant.
        assert!(set.constants().pl.unwrap() > 0.0);
    }

    #[test]
    fn gradients_match_differences() {
        let mut rng = RandomStream::new(5);
        for loss in [Loss::Square, Loss::Logistic] {
            let ds = synth_regression(40, 6, 0.1, 6, loss).unwrap();
            let set = partitioned_regression_set(ds, 4, loss).unwrap();
            let c = check_gradients(&set, 20, 1e-6, None, &mut rng);
            assert!(c.passed, "{loss:?}: {c:?}");
        }
    }

    #[test]
    fn logistic_is_stable_for_large_margins() {
        assert!((log1p_exp_neg(800.0)).abs() < 1e-300);
        assert!((log1p_exp_neg(-800.0) - 800.0).abs() < 1e-9);
        assert_eq!(sigmoid_neg(-800.0), 1.0);
        assert!(sigmoid_neg(800.0) >= 0.0);
    }
}
