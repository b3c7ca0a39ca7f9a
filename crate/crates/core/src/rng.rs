//! Seeded, portable pseudo-random streams.
//!
//! All randomness in the crate goes through SplitMix64 (64-bit state,
//! golden-ratio increment `0x9E3779B97F4A7C15`, Stafford mix13 finalizer),
//! so every generated model and starting vector is reproducible from its seed.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub type Stream = SplitMix64;

pub fn seeded(seed: u64) -> Stream {
    SplitMix64::seed_from_u64(seed)
}

/// Uniform on `[0, 1)`, matching the semantics of Matlab's `rand`.
pub fn uniform01(rng: &mut Stream) -> f64 {
    rng.random::<f64>()
}

/// Uniform on `[-1, 1)`.
pub fn uniform_pm1(rng: &mut Stream) -> f64 {
    2.0 * rng.random::<f64>() - 1.0
}
