//! Seed derivation. Every random stream in the simulator is a ChaCha8 generator
//! keyed by a base seed and a path of integers, so independent components never
//! share a stream and results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod stream {
    pub const CUE_POSITIONS: u64 = 1;
    pub const DUE_POSITIONS: u64 = 2;
    pub const ACTIVITY_COUNT: u64 = 3;
    pub const ACTIVITY_KEYS: u64 = 4;
    pub const ROUNDING: u64 = 5;
    pub const REPLICATION: u64 = 6;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream_rng(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}
