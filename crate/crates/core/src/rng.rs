//! Seeded random streams.
//!
//! Every random draw goes through ChaCha20 (`rand_chacha::ChaCha20Rng`), a
//! counter-based generator whose output is fixed by its algorithm, so runs
//! reproduce bit for bit on every platform. Independent consumers of one
//! user seed use distinct ChaCha stream ids.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

/// Stream ids for the independent consumers of a run seed.
pub mod streams {
    pub const DROPOUT: u64 = 1;
    pub const SVD_START: u64 = 2;
    pub const POWER_ITERATION: u64 = 3;
    pub const SPLIT: u64 = 4;
    pub const SYNTH: u64 = 5;
    pub const GAUSSIAN: u64 = 6;
}

/// Generator for `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed from `seed` and an index with the SplitMix64 finalizer.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
