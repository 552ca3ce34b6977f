//! Seeded, reproducible sampling helpers. Every randomized check in the
//! crate draws from a ChaCha stream keyed by an explicit seed, so
//! reports are identical run to run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform index in `[0, n)`.
pub fn pick(rng: &mut SeededRng, n: usize) -> usize {
    rng.gen_range(0..n)
}

/// Uniform f64 in `[lo, hi]`.
pub fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..=hi)
}
