//! Counter-based randomness.
//!
//! Site uniforms are a pure function of `(seed, i, j)`:
//!
//! ```text
//! h = mix64(mix64(seed ^ mix64(i + G)) ^ (j + 2G))      G = 0x9E3779B97F4A7C15
//! u = (h >> 11) * 2^-53                                  u in [0, 1)
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer (a bijection on `u64`).
//! Sequential streams (coins, heat-bath proposals) use ChaCha8 seeded from
//! [`stream_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline(always)]
pub fn site_hash(seed: u64, i: i64, j: i64) -> u64 {
    let a = mix64((i as u64).wrapping_add(GOLDEN));
    mix64(mix64(seed ^ a) ^ (j as u64).wrapping_add(GOLDEN.wrapping_mul(2)))
}

/// 53-bit integer draw; `u = bits53 * 2^-53`.
#[inline(always)]
pub fn site_bits53(seed: u64, i: i64, j: i64) -> u64 {
    site_hash(seed, i, j) >> 11
}

#[inline(always)]
pub fn site_uniform(seed: u64, i: i64, j: i64) -> f64 {
    site_bits53(seed, i, j) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed of replica `index` derived from a base seed; distinct indices give
/// unrelated seeds, and the mapping does not depend on scheduling.
pub fn replica_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(GOLDEN.wrapping_mul(3))))
}

/// Independent named sub-stream of a seed (e.g. "tasep-coins").
pub fn stream_seed(seed: u64, tag: &str) -> u64 {
    tag.bytes()
        .fold(mix64(seed ^ GOLDEN), |acc, b| mix64(acc ^ b as u64))
}

pub fn chacha(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
