//! Seeded random streams.
//!
//! Every stream is a ChaCha8 generator (`rand_chacha::ChaCha8Rng`) seeded
//! with `seed_from_u64`. ChaCha is a counter-based cipher, so a stream is
//! fully described by `(seed, stream id, word position)` and produces the
//! same words on every platform. Conversions from raw words to floats and
//! categories are done here rather than through `rand` helpers so the
//! mapping is pinned as well:
//!
//! * uniform `[0, 1)`: top 53 bits of one `u64` times `2^-53`;
//! * category below `n`: Lemire's multiply-shift with rejection (unbiased);
//! * Bernoulli(p): `uniform() < p`;
//! * Multinomial(b, 1/n): `b` categorical draws, counted.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::NumError;

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent sub-stream of the same seed.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Counts of `trials` uniform draws over `categories` bins.
    pub fn multinomial(&mut self, trials: usize, categories: usize) -> Result<Vec<usize>, NumError> {
        if trials == 0 || categories == 0 {
            return Err(NumError::InvalidArgument(format!(
                "multinomial needs trials >= 1 and categories >= 1, got ({trials}, {categories})"
            )));
        }
        let mut counts = vec![0; categories];
        for _ in 0..trials {
            counts[self.below(categories)] += 1;
        }
        Ok(counts)
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform point in the box `[-half_width, half_width]^dim`.
    pub fn uniform_box(&mut self, dim: usize, half_width: f64) -> Vec<f64> {
        (0..dim).map(|_| half_width * (2.0 * self.uniform() - 1.0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_bit_identical() {
        let mut a = RandomStream::new(42);
        let mut b = RandomStream::new(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_eq!(a.position(), b.position());
        let mut c = RandomStream::with_stream(42, 1);
        let mut d = RandomStream::new(42);
        assert_ne!(c.next_u64(), d.next_u64());
    }

    #[test]
    fn multinomial_single_category_and_zero_trials() {
        let mut rs = RandomStream::new(1);
        assert_eq!(rs.multinomial(4, 1).unwrap(), vec![4]);
        assert!(rs.multinomial(0, 3).is_err());
        assert!(rs.multinomial(2, 0).is_err());
    }

    #[test]
    fn multinomial_two_by_two_frequency() {
        // P(ξ = [2, 0]) = (1/2)^2
        let mut rs = RandomStream::new(7);
        let samples = 100_000;
        let hits = (0..samples).filter(|_| rs.multinomial(2, 2).unwrap() == [2, 0]).count();
        let freq = hits as f64 / samples as f64;
        assert!((freq - 0.25).abs() < 0.01, "{freq}");
    }

    #[test]
    fn multinomial_marginal_mean() {
        let (b, n, draws) = (5usize, 8usize, 20_000usize);
        let mut rs = RandomStream::new(3);
        let mut sums = vec![0.0; n];
        for _ in 0..draws {
            let xi = rs.multinomial(b, n).unwrap();
            assert_eq!(xi.iter().sum::<usize>(), b);
            for (s, c) in sums.iter_mut().zip(&xi) {
                *s += *c as f64;
            }
        }
        let q = 1.0 / n as f64;
        let mean = b as f64 * q;
        let se = (b as f64 * q * (1.0 - q) / draws as f64).sqrt();
        for s in sums {
            assert!((s / draws as f64 - mean).abs() <= 3.0 * se + 1e-12);
        }
    }

    #[test]
    fn bernoulli_extremes() {
        let mut rs = RandomStream::new(9);
        assert!((0..1000).all(|_| rs.bernoulli(1.0)));
        assert!((0..1000).all(|_| !rs.bernoulli(0.0)));
    }

    #[test]
    fn below_stays_in_range() {
        let mut rs = RandomStream::new(5);
        for n in 1..20 {
            for _ in 0..200 {
                assert!(rs.below(n) < n);
            }
        }
    }
}
