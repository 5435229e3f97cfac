//! Exhaustive search over all subsets, for validating the relaxation and the
//! rounding on small instances.

use serde::{Deserialize, Serialize};

use super::instance::KnapsackInstance;
use crate::error::{Error, Result};

pub const ORACLE_MAX_ITEMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMode {
    /// Capacity and every pair-SINR constraint.
    #[default]
    Full,
    /// Capacity only.
    CapacityOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    /// Item indices, ascending.
    pub selected: Vec<usize>,
    pub value: f64,
}

/// Best feasible subset; among equal values the lexicographically smallest
/// ascending index list wins.
pub fn brute_force_oracle(inst: &KnapsackInstance) -> Result<OracleSolution> {
    brute_force_with(inst, OracleMode::Full)
}

pub fn brute_force_with(inst: &KnapsackInstance, mode: OracleMode) -> Result<OracleSolution> {
    let n = inst.len();
    if n > ORACLE_MAX_ITEMS {
        return Err(Error::Size {
            n,
            max: ORACLE_MAX_ITEMS,
        });
    }
    let mut best = OracleSolution {
        selected: Vec::new(),
        value: 0.0,
    };
    for mask in 1u32..(1u32 << n) {
        let set: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let ok = match mode {
            OracleMode::Full => inst.is_feasible(&set),
            OracleMode::CapacityOnly => inst.fits(&set),
        };
        if !ok {
            continue;
        }
        let value = inst.value_of(&set);
        if value > best.value || (value == best.value && set < best.selected) {
            best = OracleSolution {
                selected: set,
                value,
            };
        }
    }
    Ok(best)
}
