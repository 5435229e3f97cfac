//! Per-C-UE knapsack: semidefinite relaxation, randomized rounding, and an
//! exhaustive oracle.

pub mod dump;
mod generate;
mod instance;
mod oracle;
mod rounding;
mod sdp;

pub use instance::{build_instance, KnapsackInstance, FEASIBILITY_TOL};
pub(crate) use instance::{at_least, within};
pub use generate::{live_instance, synthetic_instance};
pub use oracle::{brute_force_oracle, brute_force_with, OracleMode, OracleSolution, ORACLE_MAX_ITEMS};
pub use rounding::{
    candidate_from_sample, fast_path, ratio_cmp, repair_and_extend, round_and_repair,
    RoundingOptions, SdrSolution,
};
pub use sdp::{solve_sdp, SdpOptions, SdpSolution};

use crate::error::Result;

/// Relaxation plus rounding. Instances with no items or no capacity skip the
/// relaxation and return an empty selection.
pub fn solve(
    inst: &KnapsackInstance,
    sdp_opts: &SdpOptions,
    rounding: &RoundingOptions,
    seed: u64,
) -> Result<(SdrSolution, Option<SdpSolution>)> {
    inst.validate()?;
    if inst.is_empty() || inst.capacity < 0.0 {
        return Ok((SdrSolution::trivial(inst.len()), None));
    }
    let sdp = solve_sdp(inst, sdp_opts)?;
    let sol = round_and_repair(inst, &sdp, rounding, seed)?;
    Ok((sol, Some(sdp)))
}
