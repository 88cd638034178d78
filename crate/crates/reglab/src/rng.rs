//! Seed derivation and RNG construction.
//!
//! Per-sample seeds are derived by a splitmix-style avalanche of
//! `(base_seed, index)`, so any parallel schedule sees the same stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; full-avalanche 64-bit mix.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for sample `index` of a run with `base_seed`.
pub fn derive_seed(base_seed: u64, index: u64) -> u64 {
    mix64(base_seed ^ mix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Seed for a named sub-stream (e.g. the sign coin) of one sample.
pub fn derive_stream(seed: u64, stream: u64) -> u64 {
    mix64(seed.wrapping_add(mix64(stream ^ 0xda94_2042_e4dd_58b5)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
