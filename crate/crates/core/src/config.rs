//! Experiment configuration, read from TOML. Every key is optional and
//! unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::allocator::{ActivityModel, SolverParams, TimeGrid};
use crate::cell::CellConfig;
use crate::economics::{TipMode, TipPolicy};
use crate::error::{Error, Result};
use crate::ledger::DEFAULT_INITIAL_BALANCE;

/// Per-slot active count as fractions of the equivalent D-UE pool, so one
/// setting serves a whole D-UE sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActivityConfig {
    pub mu_fraction: f64,
    pub sigma_fraction: f64,
}

impl Default for ActivityConfig {
    fn default() -> Self {
        Self {
            mu_fraction: 0.5,
            sigma_fraction: 0.1,
        }
    }
}

impl ActivityConfig {
    pub fn model(&self, pool: usize) -> ActivityModel {
        ActivityModel {
            mu: self.mu_fraction * pool as f64,
            sigma: self.sigma_fraction * pool as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LedgerConfig {
    pub initial_balance: f64,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        Self {
            initial_balance: DEFAULT_INITIAL_BALANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RevenueSweep {
    pub n_cue: usize,
    /// D2D device counts; each yields K(K-1)/2 equivalent D-UEs.
    pub due_counts: Vec<usize>,
    pub modes: Vec<TipMode>,
    /// Edge radii for the mode1 sweep, run at the largest D-UE count.
    pub edge_radii_m: Vec<f64>,
    pub replications: usize,
}

impl Default for RevenueSweep {
    fn default() -> Self {
        Self {
            n_cue: 10,
            due_counts: vec![0, 2, 4, 6, 8, 10],
            modes: TipMode::ALL.to_vec(),
            edge_radii_m: vec![50.0, 100.0, 150.0],
            replications: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacitySweep {
    /// C-UE counts for the SCMA versus OMA comparison.
    pub cue_counts: Vec<usize>,
    /// C-UE count for the active D-UE sweep.
    pub n_cue: usize,
    /// D2D device count for the active D-UE sweep.
    pub due_devices: usize,
    /// Active equivalent D-UEs per slot.
    pub active_counts: Vec<usize>,
    pub replications: usize,
}

impl Default for CapacitySweep {
    fn default() -> Self {
        Self {
            cue_counts: vec![0, 10, 20, 30, 40, 45, 50, 60],
            n_cue: 30,
            due_devices: 12,
            active_counts: vec![0, 10, 20, 30, 40, 50, 60],
            replications: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FairnessSweep {
    pub n_cue: usize,
    pub due_counts: Vec<usize>,
    pub modes: Vec<TipMode>,
    pub replications: usize,
}

impl Default for FairnessSweep {
    fn default() -> Self {
        Self {
            n_cue: 30,
            due_counts: vec![4, 6, 8, 10, 12],
            modes: TipMode::ALL.to_vec(),
            replications: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub n_cue: usize,
    pub due_devices: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            n_cue: 10,
            due_devices: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub scenario: CellConfig,
    pub grid: TimeGrid,
    pub activity: ActivityConfig,
    pub policy: TipPolicy,
    pub solver: SolverParams,
    pub ledger: LedgerConfig,
    pub revenue: RevenueSweep,
    pub capacity: CapacitySweep,
    pub fairness: FairnessSweep,
    pub simulate: SimulateConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            scenario: CellConfig::default(),
            grid: TimeGrid::default(),
            activity: ActivityConfig::default(),
            policy: TipPolicy::default(),
            solver: SolverParams::default(),
            ledger: LedgerConfig::default(),
            revenue: RevenueSweep::default(),
            capacity: CapacitySweep::default(),
            fairness: FairnessSweep::default(),
            simulate: SimulateConfig::default(),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(config_err)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.grid.validate()?;
        self.policy.validate()?;
        self.solver.rounding.validate()?;
        if !(self.solver.sdp.tolerance > 0.0) || self.solver.sdp.max_iter == 0 {
            return Err(Error::Config("solver.sdp needs tolerance > 0 and max_iter >= 1".into()));
        }
        let a = &self.activity;
        if !(a.mu_fraction >= 0.0 && a.mu_fraction.is_finite())
            || !(a.sigma_fraction >= 0.0 && a.sigma_fraction.is_finite())
        {
            return Err(Error::Config("activity fractions must be finite and >= 0".into()));
        }
        if !(self.ledger.initial_balance >= 0.0 && self.ledger.initial_balance.is_finite()) {
            return Err(Error::Config("ledger.initial_balance must be finite and >= 0".into()));
        }
        if self.revenue.replications == 0
            || self.capacity.replications == 0
            || self.fairness.replications == 0
        {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if self.revenue.edge_radii_m.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::Config("edge radii must be positive".into()));
        }
        Ok(())
    }
}
