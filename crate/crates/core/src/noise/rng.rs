//! Counter-based randomness keyed by space-time coordinates.
//!
//! Every draw is a pure function of `(seed, time, op_id, lane)`, so fault
//! decisions do not depend on the order in which locations are visited.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed for a labelled sub-experiment.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    label.bytes().fold(mix64(master), |h, b| mix64(h ^ b as u64))
}

/// Derives the seed of trial `k` of an experiment.
pub fn trial_seed(experiment_seed: u64, k: u64) -> u64 {
    mix64(experiment_seed ^ mix64(k.wrapping_add(0x5151)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyedRng {
    pub seed: u64,
}

impl KeyedRng {
    pub fn new(seed: u64) -> Self {
        KeyedRng { seed }
    }

    #[inline]
    pub fn key(&self, time: u64, op_id: u64, lane: u64) -> u64 {
        mix64(mix64(mix64(self.seed ^ 0xA076_1D64_78BD_642F) ^ time) ^ op_id.wrapping_mul(0x9E37_79B9).wrapping_add(lane))
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&self, time: u64, op_id: u64, lane: u64) -> f64 {
        (self.key(time, op_id, lane) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli(`p`) decision for one location.
    #[inline]
    pub fn fires(&self, time: u64, op_id: u64, p: f64) -> bool {
        p > 0.0 && (p >= 1.0 || self.uniform(time, op_id, 0) < p)
    }

    /// A stream for drawing the effect of a fault at one location.
    pub fn stream(&self, time: u64, op_id: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.key(time, op_id, 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_pure_functions_of_the_key() {
        let r = KeyedRng::new(9);
        assert_eq!(r.uniform(3, 4, 0), r.uniform(3, 4, 0));
        assert_ne!(r.uniform(3, 4, 0), r.uniform(4, 3, 0));
        assert_ne!(r.uniform(3, 4, 0), KeyedRng::new(10).uniform(3, 4, 0));
    }

    #[test]
    fn uniform_mean_and_range() {
        let r = KeyedRng::new(1);
        let n = 200_000;
        let mut s = 0.0;
        for k in 0..n {
            let u = r.uniform(k, 7, 0);
            assert!((0.0..1.0).contains(&u));
            s += u;
        }
        assert!((s / n as f64 - 0.5).abs() < 5.0 * (1.0 / 12.0f64 / n as f64).sqrt());
    }
}
