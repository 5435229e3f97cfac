//! Random instances for validation and benchmarking.

use rand::seq::index::sample;
use rand::Rng;

use super::instance::{build_instance, KnapsackInstance};
use crate::cell::{generate_scenario, CellConfig};
use crate::economics::{tip_rate, TipMode, TipPolicy};
use crate::error::Result;
use crate::rng::stream_rng;

const LIVE_STREAM: u64 = 101;
const SYNTHETIC_STREAM: u64 = 102;

/// Knapsack for one C-UE of a random scenario, over `n` random equivalent
/// D-UEs, with mode1 tips. `None` when the C-UE has no SINR margin.
pub fn live_instance(seed: u64, n: usize, cfg: &CellConfig) -> Result<Option<KnapsackInstance>> {
    let mut rng = stream_rng(seed, &[LIVE_STREAM]);
    let devices = (2..).find(|k| k * (k - 1) / 2 >= n).unwrap_or(2).max(4);
    let n_cue = rng.random_range(1..=4);
    let scenario = generate_scenario(seed, n_cue, devices, cfg)?;
    let state = scenario.sinr_state();
    let cue = rng.random_range(0..n_cue);
    if state.gamma0_cue[cue] < state.sinr_min_cue {
        return Ok(None);
    }
    let mut items = sample(&mut rng, scenario.n_pairs(), n).into_vec();
    items.sort_unstable();
    let policy = TipPolicy {
        edge_radius_m: rng.random_range(25.0..150.0),
        ..TipPolicy::default().with_mode(TipMode::Mode1)
    };
    let tips: Vec<f64> = items
        .iter()
        .map(|&i| tip_rate(&policy, scenario.due_cue_distance(i, cue)))
        .collect();
    build_instance(&scenario, &state, cue, &items, &tips, 1.0).map(Some)
}

/// Plain knapsack with weights and values uniform in `[0.05, 1)` and a
/// capacity between a third and two thirds of the total weight.
pub fn synthetic_instance(seed: u64, n: usize) -> KnapsackInstance {
    let mut rng = stream_rng(seed, &[SYNTHETIC_STREAM]);
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let capacity = total * rng.random_range(1.0 / 3.0..2.0 / 3.0);
    KnapsackInstance::knapsack(values, weights, capacity)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn live_instances_are_valid_and_reproducible() {
        let cfg = CellConfig::default();
        let mut found = 0;
        for seed in 0..20 {
            if let Some(inst) = live_instance(seed, 5, &cfg).unwrap() {
                inst.validate().unwrap();
                assert_eq!(inst.len(), 5);
                assert_eq!(Some(inst), live_instance(seed, 5, &cfg).unwrap());
                found += 1;
            }
        }
        assert!(found > 10);
    }

    #[test]
    fn synthetic_capacity_range() {
        for seed in 0..20 {
            let inst = synthetic_instance(seed, 8);
            inst.validate().unwrap();
            let h = inst.total_weight();
            assert!(inst.capacity >= h / 3.0 && inst.capacity <= 2.0 * h / 3.0);
        }
    }
}
