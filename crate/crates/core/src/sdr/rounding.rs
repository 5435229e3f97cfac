//! Randomized rounding of the relaxation followed by capacity repair and
//! greedy extension.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::instance::{within, KnapsackInstance};
use super::sdp::SdpSolution;
use crate::error::{Error, Result};
use crate::rng::{stream, stream_rng};

/// Candidate sets up to this size skip repair when they already fit.
const FAST_PATH_MAX: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoundingOptions {
    /// Weight `ρ` of the relaxation in the sampling covariance `ρY + (1 − ρ)I`.
    pub rounding_mix: f64,
    pub trials: usize,
}

impl Default for RoundingOptions {
    fn default() -> Self {
        Self {
            rounding_mix: 0.5,
            trials: 100,
        }
    }
}

impl RoundingOptions {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rounding_mix) {
            return Err(Error::Config(format!(
                "rounding_mix must lie in [0, 1], got {}",
                self.rounding_mix
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("at least one rounding trial is required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdrSolution {
    /// Relaxation matrix, row-major, dimension `n + 1` (index 0 is `y₀`).
    pub y_matrix: Vec<Vec<f64>>,
    /// Upper bound on any feasible selection's objective.
    pub objective_bound: f64,
    /// Item indices of the selected D-UEs, ascending.
    pub selected: Vec<usize>,
    pub selected_objective: f64,
    /// Best fast-path objective (small candidate sets accepted as drawn).
    pub cluster1_objective: Option<f64>,
    /// Best objective after repair and greedy extension.
    pub cluster2_objective: f64,
    /// No feasible non-empty selection was found for a non-empty pool.
    pub epsilon: bool,
}

impl SdrSolution {
    /// Solution for an instance with nothing to select.
    pub fn trivial(n: usize) -> Self {
        Self {
            y_matrix: Vec::new(),
            objective_bound: 0.0,
            selected: Vec::new(),
            selected_objective: 0.0,
            cluster1_objective: None,
            cluster2_objective: 0.0,
            epsilon: n > 0,
        }
    }
}

/// Descending value-to-weight ratio, then lighter first, then lower index.
pub fn ratio_cmp(inst: &KnapsackInstance, a: usize, b: usize) -> Ordering {
    let ratio = |i: usize| {
        let w = inst.weights[i];
        if w > 0.0 {
            inst.values[i] / w
        } else {
            f64::INFINITY
        }
    };
    ratio(b)
        .total_cmp(&ratio(a))
        .then(inst.weights[a].total_cmp(&inst.weights[b]))
        .then(a.cmp(&b))
}

fn sort_by_ratio(inst: &KnapsackInstance, set: &mut [usize]) {
    set.sort_by(|&a, &b| ratio_cmp(inst, a, b));
}

/// Drop the worst-ratio pair-SINR violator until none remain. `set` must be
/// in ratio order.
fn drop_due_violators(inst: &KnapsackInstance, set: &mut Vec<usize>) {
    loop {
        let violators = inst.due_violators(set);
        let Some(&worst) = set.iter().rev().find(|i| violators.contains(i)) else {
            return;
        };
        set.retain(|&i| i != worst);
    }
}

/// Capacity repair, pair-SINR repair, then greedy extension in ratio order.
pub fn repair_and_extend(inst: &KnapsackInstance, candidate: &[usize]) -> Vec<usize> {
    let mut set = candidate.to_vec();
    sort_by_ratio(inst, &mut set);
    while !inst.fits(&set) {
        set.pop();
    }
    drop_due_violators(inst, &mut set);

    let mut order: Vec<usize> = (0..inst.len()).filter(|i| !set.contains(i)).collect();
    sort_by_ratio(inst, &mut order);
    let mut load = inst.weight_of(&set);
    for j in order {
        if !within(load + inst.weights[j], inst.capacity) {
            continue;
        }
        set.push(j);
        if inst.due_violators(&set).is_empty() {
            load += inst.weights[j];
        } else {
            set.pop();
        }
    }
    set.sort_unstable();
    set
}

/// Fast path: a small drawn set that fits is kept, minus pair-SINR violators.
pub fn fast_path(inst: &KnapsackInstance, candidate: &[usize]) -> Option<Vec<usize>> {
    if candidate.len() > FAST_PATH_MAX || !inst.fits(candidate) {
        return None;
    }
    let mut set = candidate.to_vec();
    sort_by_ratio(inst, &mut set);
    drop_due_violators(inst, &mut set);
    set.sort_unstable();
    Some(set)
}

/// Items whose sign agrees with the homogenizing coordinate.
pub fn candidate_from_sample(mu: &[f64]) -> Vec<usize> {
    let sign = |x: f64| if x >= 0.0 { 1 } else { -1 };
    let s0 = sign(mu[0]);
    (1..mu.len())
        .filter(|&i| sign(mu[i]) * s0 == 1)
        .map(|i| i - 1)
        .collect()
}

/// Square-root factor of `ρY + (1 − ρ)I`.
fn sampling_factor(y: &DMatrix<f64>, mix: f64) -> DMatrix<f64> {
    let d = y.nrows();
    let cov = y * mix + DMatrix::<f64>::identity(d, d) * (1.0 - mix);
    let eig = SymmetricEigen::new(cov);
    let mut q = eig.eigenvectors;
    for (c, &l) in eig.eigenvalues.iter().enumerate() {
        q.column_mut(c).scale_mut(l.max(0.0).sqrt());
    }
    q
}

/// Round the relaxation `sdp` of `inst` into a feasible selection.
///
/// Trial `t` draws from its own stream keyed by `(seed, t)`; the best
/// objective wins and ties keep the earliest trial, so the result matches a
/// sequential run whatever order trials are evaluated in.
pub fn round_and_repair(
    inst: &KnapsackInstance,
    sdp: &SdpSolution,
    opts: &RoundingOptions,
    seed: u64,
) -> Result<SdrSolution> {
    opts.validate()?;
    let n = inst.len();
    if sdp.y.nrows() != n + 1 {
        return Err(Error::Domain(format!(
            "relaxation has dimension {} for {} items",
            sdp.y.nrows(),
            n
        )));
    }
    let factor = sampling_factor(&sdp.y, opts.rounding_mix);

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut cluster1: Option<f64> = None;
    let mut cluster2 = f64::NEG_INFINITY;
    for trial in 0..opts.trials {
        let mut rng = stream_rng(seed, &[stream::ROUNDING, trial as u64]);
        let g = DVector::<f64>::from_fn(n + 1, |_, _| StandardNormal.sample(&mut rng));
        let mu = &factor * g;
        let candidate = candidate_from_sample(mu.as_slice());

        let mut outcomes = Vec::with_capacity(2);
        if let Some(set) = fast_path(inst, &candidate) {
            let v = inst.value_of(&set);
            cluster1 = Some(cluster1.map_or(v, |c: f64| c.max(v)));
            outcomes.push((v, set));
        }
        let set = repair_and_extend(inst, &candidate);
        let v = inst.value_of(&set);
        cluster2 = cluster2.max(v);
        outcomes.push((v, set));

        for (v, set) in outcomes {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, set));
            }
        }
    }
    let (selected_objective, selected) = best.unwrap_or((0.0, Vec::new()));

    Ok(SdrSolution {
        y_matrix: sdp
            .y
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect(),
        objective_bound: sdp.bound,
        epsilon: n > 0 && selected.is_empty(),
        selected,
        selected_objective,
        cluster1_objective: cluster1,
        cluster2_objective: cluster2.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdr::{solve_sdp, SdpOptions};

    fn sdp_for(inst: &KnapsackInstance) -> SdpSolution {
        solve_sdp(inst, &SdpOptions::default()).unwrap()
    }

    #[test]
    fn nothing_fits() {
        let inst = KnapsackInstance::knapsack(vec![1.0, 2.0], vec![5.0, 6.0], 1.0);
        let sol = round_and_repair(&inst, &sdp_for(&inst), &RoundingOptions::default(), 3).unwrap();
        assert!(sol.selected.is_empty());
        assert!(sol.epsilon);
        assert_eq!(sol.selected_objective, 0.0);
    }

    #[test]
    fn singleton_selected_for_both_sign_outcomes() {
        let inst = KnapsackInstance::knapsack(vec![2.0], vec![1.0], 1.0);
        // Both rounding outcomes lead back to the single item.
        assert_eq!(repair_and_extend(&inst, &[]), vec![0]);
        assert_eq!(repair_and_extend(&inst, &[0]), vec![0]);
        for seed in 0..20 {
            let opts = RoundingOptions { trials: 1, ..RoundingOptions::default() };
            let sol = round_and_repair(&inst, &sdp_for(&inst), &opts, seed).unwrap();
            assert_eq!(sol.selected, vec![0]);
            assert!(!sol.epsilon);
            assert_eq!(sol.selected_objective, 2.0);
        }
    }

    #[test]
    fn repair_drops_worst_ratio_first() {
        // Ratios: 3, 1, 2. Capacity 3 forces dropping item 1 first.
        let inst = KnapsackInstance::knapsack(vec![3.0, 2.0, 2.0], vec![1.0, 2.0, 1.0], 3.0);
        assert_eq!(repair_and_extend(&inst, &[0, 1, 2]), vec![0, 2]);
    }

    #[test]
    fn ratio_ties_prefer_lighter_then_lower_index() {
        let inst = KnapsackInstance::knapsack(vec![2.0, 1.0, 1.0], vec![2.0, 1.0, 1.0], 10.0);
        let mut set = vec![0, 2, 1];
        sort_by_ratio(&inst, &mut set);
        assert_eq!(set, vec![1, 2, 0]);
    }

    #[test]
    fn pair_violators_are_removed() {
        let mut inst = KnapsackInstance::knapsack(vec![3.0, 1.0], vec![1.0, 1.0], 10.0);
        inst.due_gamma0 = vec![10.0, 10.0];
        inst.sinr_min_due = 8.0;
        inst.due_loss[1][0] = 5.0;
        assert_eq!(repair_and_extend(&inst, &[0, 1]), vec![0]);
        assert_eq!(fast_path(&inst, &[0, 1]), Some(vec![0]));
        assert_eq!(fast_path(&inst, &[0, 1, 0, 1]), None);
    }

    #[test]
    fn negated_sample_gives_same_candidate() {
        let mu = [0.3, -1.2, 0.5, 2.0, -0.1];
        let neg: Vec<f64> = mu.iter().map(|x| -x).collect();
        assert_eq!(candidate_from_sample(&mu), vec![1, 2]);
        assert_eq!(candidate_from_sample(&mu), candidate_from_sample(&neg));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let inst = KnapsackInstance::knapsack(
            vec![3.0, 1.0, 2.0, 2.5, 0.7, 1.9],
            vec![4.0, 1.0, 3.0, 2.0, 0.5, 2.2],
            5.0,
        );
        let sdp = sdp_for(&inst);
        let opts = RoundingOptions::default();
        let a = round_and_repair(&inst, &sdp, &opts, 17).unwrap();
        let b = round_and_repair(&inst, &sdp, &opts, 17).unwrap();
        assert_eq!(a, b);
        assert!(inst.is_feasible(&a.selected));
        assert!(a.selected_objective <= a.objective_bound + 1e-6);
    }

    #[test]
    fn rejects_bad_options() {
        let inst = KnapsackInstance::knapsack(vec![1.0], vec![1.0], 1.0);
        let sdp = sdp_for(&inst);
        let bad = RoundingOptions { rounding_mix: 1.5, trials: 1 };
        assert!(round_and_repair(&inst, &sdp, &bad, 0).is_err());
        let bad = RoundingOptions { rounding_mix: 0.5, trials: 0 };
        assert!(round_and_repair(&inst, &sdp, &bad, 0).is_err());
    }
}
