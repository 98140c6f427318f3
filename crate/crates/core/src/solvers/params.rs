use super::SolverError;
use crate::gossip::default_round_count;

/// Step size, iteration budget, gossip rounds, restart probability and
/// expected minibatch size. The per-agent sampling probability is `1/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub eta: f64,
    pub iters: usize,
    pub k: usize,
    pub p: f64,
    pub b: usize,
    pub seed: u64,
}

impl SolverParams {
    /// Checks `η > 0`, `p ∈ (0, 1]` and `b ∈ [1, n]`.
    pub fn validate(&self, n: usize) -> Result<(), SolverError> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(SolverError::Invalid(format!("step size must be positive, got {}", self.eta)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(SolverError::Invalid(format!("p must lie in (0, 1], got {}", self.p)));
        }
        if self.b < 1 || self.b > n {
            return Err(SolverError::Invalid(format!("b must lie in [1, {n}], got {}", self.b)));
        }
        Ok(())
    }
}

/// Default parameters together with any clamping that was applied.
#[derive(Debug, Clone, PartialEq)]
pub struct DroneDefaults {
    pub params: SolverParams,
    pub kappa: f64,
    pub notes: Vec<String>,
}

/// `p = 1/(min(√n, κ) + 1)`, `b = ⌈(1 − p)/p⌉`, `η = min(1/(20L), p/(2μ))`,
/// `K` from the default round count and `T = ⌈ln(Φ⁰/ε)/(μη)⌉`.
pub fn drone_default_params(
    n: usize,
    smoothness: f64,
    mu: f64,
    gamma: f64,
    phi0: f64,
    eps: f64,
) -> Result<DroneDefaults, SolverError> {
    for (name, v) in [("L", smoothness), ("mu", mu), ("Phi0", phi0), ("eps", eps)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(SolverError::Invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if n == 0 {
        return Err(SolverError::Invalid("need at least one agent".into()));
    }
    let nf = n as f64;
    let kappa = smoothness / mu;
    let m = nf.sqrt().min(kappa);
    let mut notes = Vec::new();

    let p_lo = 1.0 / (nf + 1.0);
    let p_hi = if n == 1 { 1.0 } else { 0.5 };
    let raw_p = 1.0 / (m + 1.0);
    let p = raw_p.clamp(p_lo, p_hi);
    if p != raw_p {
        notes.push(format!("p clamped from {raw_p} to {p}"));
    }
    // (1 − p)/p equals m exactly; computing it through p would round up spuriously.
    let ratio = if p == raw_p { m } else { (1.0 - p) / p };
    let b_lo = (ratio - 1e-12 * ratio.max(1.0)).ceil().max(1.0) as usize;
    let b = b_lo.min(n);
    if b != b_lo {
        notes.push(format!("b clamped from {b_lo} to {b}"));
    }

    let eta = (1.0 / (20.0 * smoothness)).min(p / (2.0 * mu));
    let k = default_round_count(n, gamma)?;
    let iters = if phi0 > eps { ((phi0 / eps).ln() / (mu * eta)).ceil() as usize } else { 0 };
    Ok(DroneDefaults { params: SolverParams { eta, iters, k, p, b, seed: 0 }, kappa, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_network() {
        let d = drone_default_params(4, 10.0, 1.0, 1.0, 1.0, 1e-3).unwrap();
        assert!((d.params.p - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.params.b, 2);
        assert!(d.notes.is_empty());
    }

    #[test]
    fn large_network() {
        let d = drone_default_params(10_000, 10.0, 1.0, 0.5, 1.0, 1e-3).unwrap();
        assert!((d.params.p - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(d.params.b, 10);
    }

    #[test]
    fn step_size_is_the_smaller_bound() {
        for (l, mu, n) in [(10.0, 1.0, 4), (100.0, 1.0, 64), (1.5, 1.0, 9), (1e6, 3.0, 32)] {
            let d = drone_default_params(n, l, mu, 0.1, 1.0, 1e-6).unwrap();
            let expected = (1.0 / (20.0 * l)).min(d.params.p / (2.0 * mu));
            assert_eq!(d.params.eta, expected);
        }
    }

    #[test]
    fn kappa_below_one_is_clamped() {
        let d = drone_default_params(16, 0.5, 1.0, 1.0, 1.0, 1e-3).unwrap();
        assert_eq!(d.params.p, 0.5);
        assert_eq!(d.params.b, 1);
        assert_eq!(d.notes.len(), 1);
    }

    #[test]
    fn iteration_count_formula() {
        let d = drone_default_params(4, 10.0, 1.0, 1.0, 2.0, 1e-3).unwrap();
        let eta = d.params.eta;
        assert_eq!(d.params.iters, ((2.0f64 / 1e-3).ln() / eta).ceil() as usize);
        assert_eq!(d.params.k, default_round_count(4, 1.0).unwrap());
        assert_eq!(drone_default_params(4, 10.0, 1.0, 1.0, 1e-4, 1e-3).unwrap().params.iters, 0);
    }

    #[test]
    fn params_land_in_admissible_region() {
        for n in [1usize, 2, 3, 7, 64, 1000] {
            for kappa in [0.3, 1.0, 2.5, 10.0, 1e4] {
                let d = drone_default_params(n, kappa, 1.0, 0.5, 1.0, 0.1).unwrap();
                let p = d.params.p;
                let nf = n as f64;
                assert!(p >= 1.0 / (nf + 1.0) - 1e-15 && p <= 1.0, "n={n} kappa={kappa}");
                assert!(d.params.b >= 1 && d.params.b <= n);
                assert!(d.params.b as f64 >= (1.0 - p) / p - 1e-9);
                d.params.validate(n).unwrap();
            }
        }
    }
}
