use serde::{Deserialize, Serialize};

use crate::cell::{CellScenario, SinrState};
use crate::error::{Error, Result};

/// Relative slack on every feasibility comparison, shared by the solver and
/// the auditors so that summation order never flips a verdict.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Per-(C-UE, slot) knapsack: pick D-UEs maximizing revenue while the C-UE's
/// linearized SINR loss stays within its margin and every picked D-UE keeps
/// its own linearized SINR above threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    /// D-UE id behind each item.
    pub items: Vec<usize>,
    /// Revenue `τ (1 + β_i)` of each item.
    pub values: Vec<f64>,
    /// C-UE SINR loss caused by each item alone (linear).
    pub weights: Vec<f64>,
    /// `γ₀ − SINR_min` of the C-UE (linear); negative means nothing fits.
    pub capacity: f64,
    /// SINR of each item's receiver sharing the resource with no other pair.
    pub due_gamma0: Vec<f64>,
    /// `due_loss[i][j]`: SINR loss of item `i` caused by item `j`.
    pub due_loss: Vec<Vec<f64>>,
    pub sinr_min_due: f64,
}

impl KnapsackInstance {
    pub fn empty(capacity: f64, sinr_min_due: f64) -> Self {
        Self {
            items: Vec::new(),
            values: Vec::new(),
            weights: Vec::new(),
            capacity,
            due_gamma0: Vec::new(),
            due_loss: Vec::new(),
            sinr_min_due,
        }
    }

    /// Instance without pair-to-pair constraints (every D-UE far above threshold).
    pub fn knapsack(values: Vec<f64>, weights: Vec<f64>, capacity: f64) -> Self {
        let n = values.len();
        Self {
            items: (0..n).collect(),
            values,
            weights,
            capacity,
            due_gamma0: vec![1.0; n],
            due_loss: vec![vec![0.0; n]; n],
            sinr_min_due: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.weights.len() != n
            || self.items.len() != n
            || self.due_gamma0.len() != n
            || self.due_loss.len() != n
            || self.due_loss.iter().any(|row| row.len() != n)
        {
            return Err(Error::Format("instance vectors disagree in length".into()));
        }
        if self.values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Format("item values must be positive and finite".into()));
        }
        if self.weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::Format("item weights must be non-negative and finite".into()));
        }
        if !self.capacity.is_finite() {
            return Err(Error::Format("capacity must be finite".into()));
        }
        if self
            .due_loss
            .iter()
            .flatten()
            .any(|&l| !(l >= 0.0 && l.is_finite()))
        {
            return Err(Error::Format("pair losses must be non-negative and finite".into()));
        }
        Ok(())
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Sum of values of `set` (item indices).
    pub fn value_of(&self, set: &[usize]) -> f64 {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.iter().map(|&i| self.values[i]).fold(0.0, |acc, v| acc + v)
    }

    pub fn weight_of(&self, set: &[usize]) -> f64 {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.iter().map(|&i| self.weights[i]).sum()
    }

    pub fn fits(&self, set: &[usize]) -> bool {
        within(self.weight_of(set), self.capacity)
    }

    /// Linearized SINR of item `i` with `set` sharing the resource.
    pub fn due_sinr(&self, i: usize, set: &[usize]) -> f64 {
        let mut others: Vec<usize> = set.iter().copied().filter(|&j| j != i).collect();
        others.sort_unstable();
        self.due_gamma0[i] - others.iter().map(|&j| self.due_loss[i][j]).sum::<f64>()
    }

    /// Members of `set` whose linearized SINR falls below threshold.
    pub fn due_violators(&self, set: &[usize]) -> Vec<usize> {
        set.iter()
            .copied()
            .filter(|&i| !at_least(self.due_sinr(i, set), self.sinr_min_due))
            .collect()
    }

    pub fn is_feasible(&self, set: &[usize]) -> bool {
        self.fits(set) && self.due_violators(set).is_empty()
    }
}

pub(crate) fn within(total: f64, capacity: f64) -> bool {
    total <= capacity + FEASIBILITY_TOL * capacity.abs().max(1e-300)
}

pub(crate) fn at_least(value: f64, threshold: f64) -> bool {
    value >= threshold - FEASIBILITY_TOL * threshold.abs()
}

/// Knapsack for C-UE `cue` over `candidates` (D-UE ids). `tips[c]` is the tip
/// rate of `candidates[c]`, `tau` the slot length.
pub fn build_instance(
    scenario: &CellScenario,
    state: &SinrState,
    cue: usize,
    candidates: &[usize],
    tips: &[f64],
    tau: f64,
) -> Result<KnapsackInstance> {
    if tips.len() != candidates.len() {
        return Err(Error::Domain("one tip rate per candidate required".into()));
    }
    let capacity = state.gamma0_cue[cue] - state.sinr_min_cue;
    let values = tips
        .iter()
        .map(|&beta| crate::economics::payment(tau, beta))
        .collect::<Result<Vec<_>>>()?;
    let weights = candidates.iter().map(|&i| state.cue_loss[cue][i]).collect();
    let due_gamma0 = candidates.iter().map(|&i| state.gamma0_due[cue][i]).collect();
    let due_loss = candidates
        .iter()
        .map(|&i| {
            candidates
                .iter()
                .map(|&j| scenario.due_loss(state, cue, i, j))
                .collect()
        })
        .collect();
    Ok(KnapsackInstance {
        items: candidates.to_vec(),
        values,
        weights,
        capacity,
        due_gamma0,
        due_loss,
        sinr_min_due: state.sinr_min_due,
    })
}
