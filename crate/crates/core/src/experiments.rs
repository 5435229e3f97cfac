//! Revenue, capacity and fairness sweeps, and a single traced run. Each writes
//! a CSV whose first line is `#schema=<name>.v1`.

use serde::Serialize;

use crate::allocator::{
    run_horizon_with_ledger, throughput, ActivityModel, AllocationTrace,
};
use crate::cell::{generate_scenario, CellConfig, CellScenario};
use crate::config::ExperimentConfig;
use crate::economics::TipMode;
use crate::error::Result;
use crate::ledger::{encode_binary, Ledger};
use crate::rng::{derive_seed, stream};

pub const REVENUE_SCHEMA: &str = "revenue.v1";
pub const CAPACITY_SCHEMA: &str = "capacity.v1";
pub const FAIRNESS_SCHEMA: &str = "fairness.v1";
pub const TRACE_SCHEMA: &str = "trace.v1";

/// Seed of replication `r`. Scenarios with different UE counts share it, so
/// larger scenarios extend smaller ones.
pub fn replication_seed(seed: u64, r: usize) -> u64 {
    derive_seed(seed, &[stream::REPLICATION, r as u64])
}

pub fn to_csv<R: Serialize>(schema: &str, rows: &[R]) -> Result<String> {
    let mut out = format!("#schema={schema}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(out).expect("csv output is UTF-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevenueRow {
    /// `due_count` or `edge_radius`.
    pub sweep: &'static str,
    pub mode: TipMode,
    pub due_devices: usize,
    pub due_pairs: usize,
    pub edge_radius_m: f64,
    pub revenue_mean: f64,
    pub revenue_min: f64,
    pub revenue_max: f64,
}

fn horizon(
    cfg: &ExperimentConfig,
    scenario: &CellScenario,
    policy: &crate::economics::TipPolicy,
    model: &ActivityModel,
    seed: u64,
) -> Result<AllocationTrace> {
    let ledger = Ledger::new(cfg.grid.slot_s, cfg.ledger.initial_balance)?;
    run_horizon_with_ledger(scenario, &cfg.grid, model, policy, &cfg.solver, seed, ledger)
}

fn summarize(xs: &[f64]) -> (f64, f64, f64) {
    let mean = xs.iter().sum::<f64>() / xs.len().max(1) as f64;
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        (mean, min, max)
    }
}

/// Total C-UE revenue against D-UE count per tip mode, then against the edge
/// radius in mode1.
pub fn revenue_rows(cfg: &ExperimentConfig) -> Result<Vec<RevenueRow>> {
    cfg.validate()?;
    let sweep = &cfg.revenue;
    let mut rows = Vec::new();
    let point = |rows: &mut Vec<RevenueRow>, label, mode, k: usize, radius: f64| -> Result<()> {
        let policy = cfg.policy.with_mode(mode);
        let policy = crate::economics::TipPolicy {
            edge_radius_m: radius,
            ..policy
        };
        let mut revenue = Vec::with_capacity(sweep.replications);
        let mut pairs = 0;
        for r in 0..sweep.replications {
            let seed = replication_seed(cfg.seed, r);
            let s = generate_scenario(seed, sweep.n_cue, k, &cfg.scenario)?;
            pairs = s.n_pairs();
            let model = cfg.activity.model(pairs);
            revenue.push(horizon(cfg, &s, &policy, &model, seed)?.total_revenue);
        }
        let (mean, min, max) = summarize(&revenue);
        rows.push(RevenueRow {
            sweep: label,
            mode,
            due_devices: k,
            due_pairs: pairs,
            edge_radius_m: radius,
            revenue_mean: mean,
            revenue_min: min,
            revenue_max: max,
        });
        Ok(())
    };
    for &mode in &sweep.modes {
        for &k in &sweep.due_counts {
            point(&mut rows, "due_count", mode, k, cfg.policy.edge_radius_m)?;
        }
    }
    if let Some(&k) = sweep.due_counts.iter().max() {
        for &radius in &sweep.edge_radii_m {
            point(&mut rows, "edge_radius", TipMode::Mode1, k, radius)?;
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityRow {
    /// `cue_count` (SCMA against OMA) or `active_due`.
    pub sweep: &'static str,
    /// `scma`, `oma`, or the SCMA setting of the D-UE sweep.
    pub access: &'static str,
    pub n_cue: usize,
    pub admitted: usize,
    pub active_due: usize,
    pub cue_throughput_bps: f64,
    pub due_throughput_bps: f64,
    pub total_throughput_bps: f64,
}

/// OMA keeps one user per resource block.
pub fn oma_config(scma: &CellConfig) -> CellConfig {
    CellConfig {
        scma_m: 2,
        scma_mc: 1,
        ..scma.clone()
    }
}

/// Aggregate uplink throughput of the admitted C-UEs without D2D reuse.
pub fn cue_throughput(s: &CellScenario) -> f64 {
    let bw = s.config.rb_bandwidth_hz();
    (0..s.n_admitted())
        .map(|k| throughput(s.sinr_cue(k, &[], &s.co_channel_of(k)), bw))
        .sum()
}

pub fn capacity_rows(cfg: &ExperimentConfig) -> Result<Vec<CapacityRow>> {
    cfg.validate()?;
    let sweep = &cfg.capacity;
    let reps = sweep.replications;
    let mut rows = Vec::new();
    let oma = oma_config(&cfg.scenario);
    for (access, cell) in [("scma", &cfg.scenario), ("oma", &oma)] {
        for &n in &sweep.cue_counts {
            let mut admitted = 0;
            let mut tp = 0.0;
            for r in 0..reps {
                let s = generate_scenario(replication_seed(cfg.seed, r), n, 0, cell)?;
                admitted = s.n_admitted();
                tp += cue_throughput(&s);
            }
            let tp = tp / reps as f64;
            rows.push(CapacityRow {
                sweep: "cue_count",
                access,
                n_cue: n,
                admitted,
                active_due: 0,
                cue_throughput_bps: tp,
                due_throughput_bps: 0.0,
                total_throughput_bps: tp,
            });
        }
    }
    for &active in &sweep.active_counts {
        let (mut cue_tp, mut due_tp) = (0.0, 0.0);
        let mut admitted = 0;
        for r in 0..reps {
            let seed = replication_seed(cfg.seed, r);
            let s = generate_scenario(seed, sweep.n_cue, sweep.due_devices, &cfg.scenario)?;
            admitted = s.n_admitted();
            let model = ActivityModel::new(active as f64, 0.0)?;
            let trace = horizon(cfg, &s, &cfg.policy, &model, seed)?;
            cue_tp += trace.mean_cue_throughput();
            due_tp += trace.mean_due_throughput();
        }
        let (cue_tp, due_tp) = (cue_tp / reps as f64, due_tp / reps as f64);
        rows.push(CapacityRow {
            sweep: "active_due",
            access: "scma",
            n_cue: sweep.n_cue,
            admitted,
            active_due: active,
            cue_throughput_bps: cue_tp,
            due_throughput_bps: due_tp,
            total_throughput_bps: cue_tp + due_tp,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairnessRow {
    pub mode: TipMode,
    pub n_cue: usize,
    pub due_devices: usize,
    pub due_pairs: usize,
    pub fairness_mean: f64,
    pub fairness_min: f64,
    pub fairness_max: f64,
}

pub fn fairness_rows(cfg: &ExperimentConfig) -> Result<Vec<FairnessRow>> {
    cfg.validate()?;
    let sweep = &cfg.fairness;
    let mut rows = Vec::new();
    for &mode in &sweep.modes {
        let policy = cfg.policy.with_mode(mode);
        for &k in &sweep.due_counts {
            let mut ratios = Vec::with_capacity(sweep.replications);
            let mut pairs = 0;
            for r in 0..sweep.replications {
                let seed = replication_seed(cfg.seed, r);
                let s = generate_scenario(seed, sweep.n_cue, k, &cfg.scenario)?;
                pairs = s.n_pairs();
                if pairs == 0 {
                    continue;
                }
                let model = cfg.activity.model(pairs);
                ratios.push(horizon(cfg, &s, &policy, &model, seed)?.fairness());
            }
            let (mean, min, max) = summarize(&ratios);
            rows.push(FairnessRow {
                mode,
                n_cue: sweep.n_cue,
                due_devices: k,
                due_pairs: pairs,
                fairness_mean: mean,
                fairness_min: min,
                fairness_max: max,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub ts: usize,
    pub cue: usize,
    /// D-UE ids separated by `;`.
    pub dues: String,
    pub revenue: f64,
    pub sinr_cue_db: f64,
    pub epsilon: bool,
    pub audit_removed: usize,
}

/// One traced run; returns the trace CSV and the binary chain file.
pub fn simulate(cfg: &ExperimentConfig) -> Result<(String, Vec<u8>)> {
    cfg.validate()?;
    let sim = &cfg.simulate;
    let s = generate_scenario(cfg.seed, sim.n_cue, sim.due_devices, &cfg.scenario)?;
    let model = cfg.activity.model(s.n_pairs());
    let trace = horizon(cfg, &s, &cfg.policy, &model, cfg.seed)?;
    let mut rows = Vec::new();
    for slot in &trace.slots {
        for a in &slot.assignments {
            rows.push(TraceRow {
                ts: slot.ts,
                cue: a.cue,
                dues: a
                    .dues
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                revenue: a.revenue,
                sinr_cue_db: crate::cell::linear_to_db(a.sinr_cue),
                epsilon: a.epsilon,
                audit_removed: a.audit_removed.len(),
            });
        }
    }
    Ok((to_csv(TRACE_SCHEMA, &rows)?, encode_binary(trace.ledger.chain())))
}
