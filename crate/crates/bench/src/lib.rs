//! Fixtures shared by the benchmarks.

use d2d_core::sdr::{live_instance, KnapsackInstance};
use d2d_core::CellConfig;

/// First live instance with exactly `n` items, searching seeds from `seed`.
pub fn instance_with(n: usize, seed: u64) -> KnapsackInstance {
    let cfg = CellConfig::default();
    (seed..)
        .find_map(|s| live_instance(s, n, &cfg).ok().flatten())
        .expect("live instances exist for every size")
}
