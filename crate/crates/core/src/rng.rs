//! Random streams.
//!
//! Every path is driven by a [`ChaCha8Rng`] seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. Standard Gaussian variates come from
//! the ziggurat sampler `rand_distr::StandardNormal` (rand_distr 0.5), drawn
//! strictly in index order, so a seed pins the path bit for bit.
//!
//! Monte Carlo replicates do not share a generator. Replicate `i` of an
//! experiment with master seed `s` is seeded with [`replicate_seed`]`(s, i)`,
//! the `(i + 1)`-th output of a SplitMix64 generator started at `s`. SplitMix64
//! is splittable by construction, so the per-replicate seeds can be computed
//! independently and in any order before a parallel fan-out.

use rand_chacha::rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

pub use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `index` under `master_seed`.
#[inline]
pub fn replicate_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// The generator behind a path seed.
pub fn path_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}
