//! Seed derivation and the crate's fixed RNG.
//!
//! All randomness goes through [`Rng`], ChaCha8 seeded from a `u64`. Its
//! output stream is specified independently of platform and word size.
//! Child seeds are derived with the SplitMix64 finalizer so that every
//! `(master, n, replicate)` triple maps to an independent stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `mix64(mix64(mix64(master) ^ a) ^ b)`.
pub fn derive(master: u64, a: u64, b: u64) -> u64 {
    mix64(mix64(mix64(master) ^ a) ^ b)
}
