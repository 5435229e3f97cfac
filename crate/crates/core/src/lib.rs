//! Single-cell D2D resource sharing over SCMA uplinks.
//!
//! D2D pairs reuse the uplink resources of cellular users (C-UEs) and pay for
//! each reuse. Per time slot the allocator sweeps the C-UEs in descending
//! initial SINR and, for each, solves a knapsack over the remaining active
//! D2D pairs with a semidefinite relaxation followed by randomized rounding.
//! Every reuse becomes a transaction in a hash-chained ledger.

pub mod allocator;
pub mod cell;
pub mod config;
pub mod economics;
pub mod error;
pub mod experiments;
pub mod ledger;
pub mod rng;
pub mod scma;
pub mod sdr;

pub use allocator::{
    allocate_ts, run_horizon, sample_active_set, throughput, ActivityModel, AllocationTrace,
    Assignment, SolverParams, TimeGrid, TsAllocation,
};
pub use cell::{channel_gain, generate_scenario, CellConfig, CellScenario, LinkKind, SinrState};
pub use config::ExperimentConfig;
pub use economics::{fairness_ratio, payment, tip_rate, PaymentRecord, TipMode, TipPolicy};
pub use error::{Error, Result};
pub use ledger::{verify_chain, Block, ChainReport, Ledger, Transaction, TxEvent, TxState};
pub use scma::{admission_capacity, codebook_count, overload_factor, ScmaConfig};
pub use sdr::{
    brute_force_oracle, build_instance, round_and_repair, solve_sdp, KnapsackInstance,
    RoundingOptions, SdpOptions, SdpSolution, SdrSolution,
};
