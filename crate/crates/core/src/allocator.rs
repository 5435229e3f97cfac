//! Slot-by-slot allocation: C-UEs in descending initial SINR each take a
//! knapsack-optimal set from the remaining active D-UEs.

use std::collections::BTreeSet;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cell::{CellScenario, SinrState};
use crate::economics::{fairness_ratio, payment, tip_rate, TipPolicy};
use crate::error::{Error, Result};
use crate::ledger::{Ledger, TxEvent, DEFAULT_INITIAL_BALANCE};
use crate::rng::{derive_seed, stream, stream_rng};
use crate::sdr::{self, at_least, build_instance, within, RoundingOptions, SdpOptions, FEASIBILITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeGrid {
    pub horizon_s: f64,
    pub slot_s: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            horizon_s: 20.0,
            slot_s: 1.0,
        }
    }
}

impl TimeGrid {
    pub fn new(horizon_s: f64, slot_s: f64) -> Result<Self> {
        let grid = Self { horizon_s, slot_s };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slot_s > 0.0 && self.slot_s.is_finite()) {
            return Err(Error::Config(format!("slot_s must be positive, got {}", self.slot_s)));
        }
        if self.s_max() < 1 {
            return Err(Error::Config(format!(
                "horizon {} s holds no whole slot of {} s",
                self.horizon_s, self.slot_s
            )));
        }
        Ok(())
    }

    /// Number of whole slots in the horizon.
    pub fn s_max(&self) -> usize {
        let n = self.horizon_s / self.slot_s;
        if n.is_finite() && n >= 0.0 {
            // Absorb representation error such as 0.3 / 0.1 = 2.9999999999999996.
            (n + 1e-9).floor() as usize
        } else {
            0
        }
    }
}

/// Gaussian number of active D-UEs per slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivityModel {
    pub mu: f64,
    pub sigma: f64,
}

impl ActivityModel {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) || !mu.is_finite() {
            return Err(Error::Config(format!(
                "activity needs finite mu and sigma >= 0, got {mu}, {sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    /// Everyone active in every slot.
    pub fn all(pool: usize) -> Self {
        Self {
            mu: pool as f64,
            sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverParams {
    pub sdp: SdpOptions,
    pub rounding: RoundingOptions,
    /// Recheck selections against the exact SINRs and drop violators.
    pub audit: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            sdp: SdpOptions::default(),
            rounding: RoundingOptions::default(),
            audit: true,
        }
    }
}

/// Active subset of `d_prime` in slot `ts`.
///
/// The count is drawn from `(seed, ts)` alone and members are the pairs with
/// the smallest per-pair random keys, so a larger pool or another tip mode
/// sees the same draws.
pub fn sample_active_set(model: &ActivityModel, d_prime: &[usize], ts: usize, seed: u64) -> Vec<usize> {
    let mut rng = stream_rng(seed, &[stream::ACTIVITY_COUNT, ts as u64]);
    let z: f64 = StandardNormal.sample(&mut rng);
    let draw = (model.mu + model.sigma * z).round();
    let count = if draw.is_nan() {
        0
    } else {
        draw.clamp(0.0, d_prime.len() as f64) as usize
    };
    let mut keyed: Vec<(u64, usize)> = d_prime
        .iter()
        .map(|&d| (derive_seed(seed, &[stream::ACTIVITY_KEYS, ts as u64, d as u64]), d))
        .collect();
    keyed.sort_unstable();
    let mut active: Vec<usize> = keyed.into_iter().take(count).map(|(_, d)| d).collect();
    active.sort_unstable();
    active
}

pub fn throughput(sinr_linear: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * (1.0 + sinr_linear.max(0.0)).log2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub cue: usize,
    /// Assigned D-UEs, ascending.
    pub dues: Vec<usize>,
    pub tips: Vec<f64>,
    pub revenue: f64,
    /// Exact SINR of the C-UE with the assigned D-UEs.
    pub sinr_cue: f64,
    /// Exact SINR of each assigned D-UE.
    pub sinr_due: Vec<f64>,
    pub epsilon: bool,
    /// D-UEs the linearized selection picked but the exact audit removed.
    pub audit_removed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsAllocation {
    pub ts: usize,
    pub active: Vec<usize>,
    /// One entry per admitted C-UE in processing order.
    pub assignments: Vec<Assignment>,
    pub revenue: f64,
    pub cue_throughput: f64,
    pub due_throughput: f64,
}

impl TsAllocation {
    pub fn served(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignments.iter().flat_map(|a| a.dues.iter().copied())
    }
}

/// Interference power each member of `set` puts on receivers whose exact SINR
/// is below threshold.
fn audit_violations(
    scenario: &CellScenario,
    state: &SinrState,
    cue: usize,
    co: &[usize],
    set: &[usize],
) -> Option<usize> {
    let cue_bad = scenario.sinr_cue(cue, set, co) < state.sinr_min_cue * (1.0 - FEASIBILITY_TOL);
    let bad_dues: Vec<usize> = set
        .iter()
        .copied()
        .filter(|&i| scenario.sinr_due(i, Some(cue), set) < state.sinr_min_due * (1.0 - FEASIBILITY_TOL))
        .collect();
    if !cue_bad && bad_dues.is_empty() {
        return None;
    }
    let p = scenario.due_power_mw();
    let mut worst = None;
    let mut worst_power = f64::NEG_INFINITY;
    for &j in set {
        let mut power = if cue_bad { p * scenario.gains.due_bs(j) } else { 0.0 };
        power += bad_dues
            .iter()
            .filter(|&&i| i != j)
            .map(|&i| p * scenario.gains.due_due(j, i))
            .sum::<f64>();
        if power > worst_power {
            worst_power = power;
            worst = Some(j);
        }
    }
    worst
}

/// Allocate slot `ts` among `active` D-UEs.
#[allow(clippy::too_many_arguments)]
pub fn allocate_ts(
    scenario: &CellScenario,
    state: &SinrState,
    active: &[usize],
    ts: usize,
    tau: f64,
    policy: &TipPolicy,
    params: &SolverParams,
    seed: u64,
) -> Result<TsAllocation> {
    let mut pool: BTreeSet<usize> = active.iter().copied().collect();
    let bandwidth = scenario.config.rb_bandwidth_hz();
    let mut assignments = Vec::with_capacity(scenario.n_admitted());
    let (mut revenue, mut cue_tp, mut due_tp) = (0.0, 0.0, 0.0);

    for cue in state.cue_order() {
        let co = scenario.co_channel_of(cue);
        let capacity = state.gamma0_cue[cue] - state.sinr_min_cue;
        let candidates: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|&i| {
                within(state.cue_loss[cue][i], capacity)
                    && at_least(state.gamma0_due[cue][i], state.sinr_min_due)
            })
            .collect();

        let mut dues = Vec::new();
        let mut epsilon = !pool.is_empty();
        if !candidates.is_empty() && capacity >= 0.0 {
            let tips: Vec<f64> = candidates
                .iter()
                .map(|&i| tip_rate(policy, scenario.due_cue_distance(i, cue)))
                .collect();
            let wrap = |e: Error| Error::Allocation {
                ts,
                cue,
                source: Box::new(e),
            };
            let inst = build_instance(scenario, state, cue, &candidates, &tips, tau).map_err(wrap)?;
            let sub_seed = derive_seed(seed, &[stream::ROUNDING, cue as u64]);
            let (sol, _) = sdr::solve(&inst, &params.sdp, &params.rounding, sub_seed).map_err(wrap)?;
            dues = sol.selected.iter().map(|&c| inst.items[c]).collect();
            epsilon = sol.epsilon;
        }

        let mut audit_removed = Vec::new();
        if params.audit {
            while let Some(j) = audit_violations(scenario, state, cue, &co, &dues) {
                dues.retain(|&d| d != j);
                audit_removed.push(j);
            }
        }
        dues.sort_unstable();
        if dues.is_empty() && !audit_removed.is_empty() {
            epsilon = true;
        }

        let tips: Vec<f64> = dues
            .iter()
            .map(|&i| tip_rate(policy, scenario.due_cue_distance(i, cue)))
            .collect();
        let value = tips
            .iter()
            .map(|&b| payment(tau, b))
            .sum::<Result<f64>>()?;
        let sinr_cue = scenario.sinr_cue(cue, &dues, &co);
        let sinr_due: Vec<f64> = dues
            .iter()
            .map(|&i| scenario.sinr_due(i, Some(cue), &dues))
            .collect();
        revenue += value;
        cue_tp += throughput(sinr_cue, bandwidth);
        due_tp += sinr_due.iter().map(|&s| throughput(s, bandwidth)).sum::<f64>();
        for d in &dues {
            pool.remove(d);
        }
        assignments.push(Assignment {
            cue,
            dues,
            tips,
            revenue: value,
            sinr_cue,
            sinr_due,
            epsilon,
            audit_removed,
        });
    }

    Ok(TsAllocation {
        ts,
        active: active.to_vec(),
        assignments,
        revenue,
        cue_throughput: cue_tp,
        due_throughput: due_tp,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationTrace {
    pub slots: Vec<TsAllocation>,
    /// Revenue earned by each C-UE over the horizon.
    pub revenue_per_cue: Vec<f64>,
    pub total_revenue: f64,
    /// D-UEs served in at least one slot.
    pub served: BTreeSet<usize>,
    pub n_pairs: usize,
    pub ledger: Ledger,
}

impl AllocationTrace {
    /// Per-slot share of all D-UEs holding a reused resource, averaged over
    /// the horizon; zero when the cell has none.
    pub fn fairness(&self) -> f64 {
        if self.n_pairs == 0 {
            return 0.0;
        }
        mean(self.slots.iter().map(|s| {
            fairness_ratio(s.served().count(), self.n_pairs).expect("served is a subset of the pool")
        }))
    }

    pub fn mean_cue_throughput(&self) -> f64 {
        mean(self.slots.iter().map(|s| s.cue_throughput))
    }

    pub fn mean_due_throughput(&self) -> f64 {
        mean(self.slots.iter().map(|s| s.due_throughput))
    }
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len();
    if n == 0 {
        0.0
    } else {
        xs.sum::<f64>() / n as f64
    }
}

/// Run every slot of `grid`, booking each reuse in a fresh ledger.
pub fn run_horizon(
    scenario: &CellScenario,
    grid: &TimeGrid,
    model: &ActivityModel,
    policy: &TipPolicy,
    params: &SolverParams,
    seed: u64,
) -> Result<AllocationTrace> {
    let ledger = Ledger::new(grid.slot_s, DEFAULT_INITIAL_BALANCE)?;
    run_horizon_with_ledger(scenario, grid, model, policy, params, seed, ledger)
}

/// As [`run_horizon`], booking into `ledger` (which fixes the D-UE balances).
pub fn run_horizon_with_ledger(
    scenario: &CellScenario,
    grid: &TimeGrid,
    model: &ActivityModel,
    policy: &TipPolicy,
    params: &SolverParams,
    seed: u64,
    mut ledger: Ledger,
) -> Result<AllocationTrace> {
    grid.validate()?;
    policy.validate()?;
    let state = scenario.sinr_state();
    let d_prime: Vec<usize> = (0..scenario.n_pairs()).collect();
    let mut slots = Vec::with_capacity(grid.s_max());
    let mut revenue_per_cue = vec![0.0; scenario.n_cue()];
    let mut served = BTreeSet::new();

    for ts in 0..grid.s_max() {
        let active = sample_active_set(model, &d_prime, ts, seed);
        let alloc = allocate_ts(scenario, &state, &active, ts, grid.slot_s, policy, params, seed)?;
        let t = ts as u64;
        for a in &alloc.assignments {
            revenue_per_cue[a.cue] += a.revenue;
            for (&due, &tip) in a.dues.iter().zip(&a.tips) {
                served.insert(due);
                let id = ledger.open_transaction(due, a.cue, tip, t)?;
                ledger.advance(id, TxEvent::Approve)?;
                ledger.advance(id, TxEvent::Activate(t))?;
                ledger.advance(id, TxEvent::End(t + 1))?;
                ledger.clear(id)?;
            }
        }
        ledger.top_up_pass()?;
        ledger.package_block(t)?;
        slots.push(alloc);
    }

    let total_revenue = slots.iter().map(|s| s.revenue).fold(0.0, |acc, r| acc + r);
    Ok(AllocationTrace {
        slots,
        revenue_per_cue,
        total_revenue,
        served,
        n_pairs: scenario.n_pairs(),
        ledger,
    })
}
