//! Seed derivation for reproducible parallel streams.
//!
//! A child seed is `derive_seed(base, path)`: the base is passed through
//! SplitMix64 and each path component is folded in as
//! `acc = splitmix64(acc ^ splitmix64(component + 0x632BE59BD9B4E019))`.
//! This mapping is part of the output contract; changing it changes every
//! published experiment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(base), |acc, &c| {
        splitmix64(acc ^ splitmix64(c.wrapping_add(0x632B_E59B_D9B4_E019)))
    })
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
