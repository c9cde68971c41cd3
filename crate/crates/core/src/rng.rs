//! Seeded random streams.
//!
//! A run seed expands into independent ChaCha8 streams, one per consumer,
//! so that adding draws to one consumer never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Consumers of randomness derived from a single seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Scheduler = 0,
    ProtocolGeneration = 1,
}

/// Returns the generator for `stream` under `seed`.
pub fn stream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one repetition of a batch cell. Pure in its arguments.
pub fn derive_seed(base: u64, n: usize, repetition: usize) -> u64 {
    mix64(mix64(base ^ mix64(n as u64)) ^ (repetition as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}
