//! Seed derivation for independent, reproducible random streams.
//!
//! Every stream seed is built by folding indices into a base seed with the
//! SplitMix64 finalizer (Steele, Lea & Flood constants). The mapping is part
//! of the reproducibility contract: changing it changes every recorded run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream type used by every run.
pub type RunRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
pub fn avalanche(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds one index into a seed.
#[inline]
pub fn mix(seed: u64, index: u64) -> u64 {
    avalanche(seed ^ avalanche(index.wrapping_add(GOLDEN_GAMMA)))
}

/// Folds a sequence of indices into a seed, left to right.
pub fn mix_all(seed: u64, indices: &[u64]) -> u64 {
    indices.iter().fold(seed, |s, &i| mix(s, i))
}

pub fn rng_from_seed(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}
