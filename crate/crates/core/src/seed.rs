//! Seed derivation for reproducible experiments.
//!
//! Sub-experiment seeds are derived from a 64-bit master seed and a path of
//! integer coordinates (for example `[DOMAIN_TAG, i]` or `[SIGNAL_TAG, i, j]`).
//! Each path element is folded in with the SplitMix64 finalizer:
//!
//! ```text
//! s_0     = mix(master)
//! s_{t+1} = mix(s_t ^ mix(path[t] + 0x9E3779B97F4A7C15))
//! ```
//!
//! so any sub-experiment can be regenerated from `(master, path)` alone, with
//! no dependence on the order in which tasks run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Tag for domain realizations.
pub const DOMAIN_TAG: u64 = 1;
/// Tag for signal realizations.
pub const SIGNAL_TAG: u64 = 2;

/// SplitMix64 output function.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for the sub-experiment at `path` under `master`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix(master), |s, &p| mix(s ^ mix(p.wrapping_add(GOLDEN))))
}

/// Generator used for every random draw in the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
