//! Seed derivation.
//!
//! Every random quantity is drawn from a stream identified by a 64-bit seed.
//! Child seeds are derived with
//!
//! ```text
//! mix(master, i) = splitmix64(master + (i + 1) * 0x9E37_79B9_7F4A_7C15)   (wrapping)
//! ```
//!
//! so path `i` of a Monte Carlo run uses `mix(master_seed, i)` and never
//! shares state with any other path.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

pub type PathRng = Pcg64Mcg;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Independent randomness sources used while building one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Gaussian increments of the driving Brownian motion.
    Driving,
    /// Uniforms for Brownian-bridge extrema inside a grid step.
    Bridge,
    /// Uniforms for bridge level-crossing corrections.
    Crossing,
    /// The single uniform behind the exponential killing threshold.
    Kill,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Driving => 0x4452_4956,
            Stream::Bridge => 0x4252_4447,
            Stream::Crossing => 0x4352_4f53,
            Stream::Kill => 0x4b49_4c4c,
        }
    }
}

pub fn stream(seed: u64, which: Stream) -> PathRng {
    PathRng::seed_from_u64(mix_seed(seed, which.tag()))
}

/// A uniform on `(0, 1]`, safe to feed into `-ln(u)`.
pub fn open_uniform<R: Rng>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// The uniform variate behind the kill threshold of path `seed`.
///
/// Thresholds for different rates are `-ln(u) / beta` with the same `u`, so
/// they are ordered in `beta` path by path.
pub fn kill_uniform(seed: u64) -> f64 {
    open_uniform(&mut stream(seed, Stream::Kill))
}

pub fn exponential_threshold(seed: u64, rate: f64) -> f64 {
    -kill_uniform(seed).ln() / rate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_is_deterministic_and_spreads() {
        assert_eq!(mix_seed(7, 3), mix_seed(7, 3));
        assert_ne!(mix_seed(7, 3), mix_seed(7, 4));
        assert_ne!(mix_seed(7, 3), mix_seed(8, 3));
    }

    #[test]
    fn streams_differ() {
        let a: u64 = stream(1, Stream::Driving).random();
        let b: u64 = stream(1, Stream::Bridge).random();
        assert_ne!(a, b);
    }

    #[test]
    fn thresholds_ordered_in_rate() {
        for seed in 0..50 {
            assert!(exponential_threshold(seed, 0.5) >= exponential_threshold(seed, 2.0));
        }
    }
}
