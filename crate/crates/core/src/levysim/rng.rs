//! Counter-based per-path random streams.
//!
//! Each path gets a ChaCha8 generator keyed by a SplitMix64 expansion of
//! `(seed, path index)`. Streams are decided by arithmetic alone — no
//! shared state, no jump-ahead — so any number of workers can run any
//! subset of paths and the per-path draws never change.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator for path `index` under master `seed`.
pub(crate) fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    // decorrelate the two inputs before expanding to a 256-bit key
    let mut state = splitmix64(&mut { seed }) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
