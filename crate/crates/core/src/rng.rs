//! Deterministic stream derivation.
//!
//! Every random decision in the crate draws from a [`ChaCha8Rng`] derived
//! from a master seed and a fixed sequence of tags (generation number, slot
//! index, a phase constant). Two runs with the same seed therefore make
//! identical decisions regardless of thread scheduling, and per-individual
//! variation streams are independent of evaluation order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; decorrelates nearby seed/tag values.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and a tag path.
pub fn child_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &tag in tags {
        state = splitmix64(state ^ splitmix64(tag));
    }
    state
}

/// Seeded stream for one derived decision point.
pub fn stream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(master, tags))
}

/// In-place Fisher-Yates shuffle driven by an explicit stream.
///
/// Hand-rolled so the shuffle order is pinned by this crate, not by the
/// internals of a rand release.
pub fn shuffle<T, R: rand::Rng>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
