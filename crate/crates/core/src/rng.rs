//! Reproducible random streams.
//!
//! Each stochastic sample draws from its own ChaCha8 stream keyed by
//! `(seed, sample_index)`, so results do not depend on how samples are
//! distributed across workers.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::vecops::{norm2, scale};

/// Generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Vector of `n` independent standard normal components.
pub fn gaussian_vector<R: rand_core::RngCore>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Gaussian vector normalized to unit 2-norm.
pub fn unit_gaussian_vector<R: rand_core::RngCore>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v = gaussian_vector(rng, n);
    let nrm = norm2(&v);
    scale(1.0 / nrm, &mut v);
    v
}

/// Uniform draw in `[0, 1)` with 53 random bits.
pub fn uniform01<R: rand_core::RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
