//! Deterministic per-task random streams.
//!
//! Every task (one permutation, one simulated curve) gets its own ChaCha
//! stream keyed by `(master seed, domain, index)`, so results never depend
//! on how tasks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domain for random-labelling permutations.
pub const DOMAIN_PERMUTATION: u64 = 0x7065_726d;
/// Stream domain for simulated noise coefficients.
pub const DOMAIN_NOISE: u64 = 0x6e6f_6973;
/// Domain used to derive one sub-seed per simulation replicate.
pub const DOMAIN_REPLICATE: u64 = 0x7265_706c;

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `(master, domain, index)` into a single 64-bit seed.
pub fn derive_seed(master: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(domain)) ^ index)
}

/// Independent stream for task `index` of `domain`.
pub fn child_rng(master: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master ^ splitmix64(domain)));
    rng.set_stream(index);
    rng
}
