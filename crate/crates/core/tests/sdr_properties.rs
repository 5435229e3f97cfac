use d2d_core::sdr::{
    self, brute_force_oracle, brute_force_with, candidate_from_sample, OracleMode,
};
use d2d_core::{KnapsackInstance, RoundingOptions, SdpOptions};
use proptest::prelude::*;

fn knapsack() -> impl Strategy<Value = KnapsackInstance> {
    (2usize..=9)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.05f64..1.0, n),
                prop::collection::vec(0.05f64..1.0, n),
                0.1f64..0.9,
            )
        })
        .prop_map(|(values, weights, frac)| {
            let capacity = frac * weights.iter().sum::<f64>();
            KnapsackInstance::knapsack(values, weights, capacity)
        })
}

/// Knapsack plus pair losses; roughly half the pairs clash.
fn constrained() -> impl Strategy<Value = KnapsackInstance> {
    knapsack().prop_flat_map(|inst| {
        let n = inst.len();
        prop::collection::vec(prop::collection::vec(0.0f64..2.0, n), n).prop_map(move |loss| {
            let mut inst = inst.clone();
            inst.due_gamma0 = vec![2.0; n];
            inst.sinr_min_due = 1.0;
            inst.due_loss = loss;
            for (i, row) in inst.due_loss.iter_mut().enumerate() {
                row[i] = 0.0;
            }
            inst
        })
    })
}

fn opts(trials: usize) -> RoundingOptions {
    RoundingOptions {
        rounding_mix: 0.5,
        trials,
    }
}

fn feasible(inst: &KnapsackInstance, set: &[usize]) -> bool {
    let weight: f64 = set.iter().map(|&i| inst.weights[i]).sum();
    weight <= inst.capacity * (1.0 + 1e-9)
        && set.iter().all(|&i| {
            let loss: f64 = set.iter().filter(|&&j| j != i).map(|&j| inst.due_loss[i][j]).sum();
            inst.due_gamma0[i] - loss >= inst.sinr_min_due * (1.0 - 1e-9)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_dominates_both_optima(inst in constrained(), seed in any::<u64>()) {
        let (sol, _) = sdr::solve(&inst, &SdpOptions::default(), &opts(20), seed).unwrap();
        let full = brute_force_oracle(&inst).unwrap();
        let relaxed = brute_force_with(&inst, OracleMode::CapacityOnly).unwrap();
        prop_assert!(sol.objective_bound >= relaxed.value - 1e-6);
        prop_assert!(relaxed.value >= full.value);
        prop_assert!(sol.selected_objective <= full.value + 1e-9);
    }

    #[test]
    fn selections_are_feasible(inst in constrained(), seed in any::<u64>()) {
        let (sol, _) = sdr::solve(&inst, &SdpOptions::default(), &opts(20), seed).unwrap();
        prop_assert_eq!(sol.epsilon, sol.selected.is_empty());
        prop_assert!(feasible(&inst, &sol.selected));
        prop_assert!(sol.selected.windows(2).all(|w| w[0] < w[1]));
        prop_assert!((inst.value_of(&sol.selected) - sol.selected_objective).abs() < 1e-12);
    }

    #[test]
    fn fixed_seed_is_reproducible(inst in knapsack(), seed in any::<u64>()) {
        let a = sdr::solve(&inst, &SdpOptions::default(), &opts(15), seed).unwrap();
        let b = sdr::solve(&inst, &SdpOptions::default(), &opts(15), seed).unwrap();
        prop_assert_eq!(a.0, b.0);
    }

    #[test]
    fn candidates_ignore_global_sign(
        mu in prop::collection::vec(
            (1e-6f64..10.0, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m }),
            1..12,
        )
    ) {
        let negated: Vec<f64> = mu.iter().map(|x| -x).collect();
        prop_assert_eq!(candidate_from_sample(&mu), candidate_from_sample(&negated));
    }

    #[test]
    fn cut_holds_at_capacity_optimum(inst in knapsack()) {
        let h = inst.total_weight();
        prop_assume!(2.0 * inst.capacity <= h);
        let opt = brute_force_with(&inst, OracleMode::CapacityOnly).unwrap();
        let signed: f64 = (0..inst.len())
            .map(|i| if opt.selected.contains(&i) { inst.weights[i] } else { -inst.weights[i] })
            .sum();
        prop_assert!(signed >= 2.0 * (inst.capacity - inst.max_weight()) - h - 1e-9);
    }
}
