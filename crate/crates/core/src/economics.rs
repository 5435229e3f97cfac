//! Reuse payments and tip policies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distances below this are floored when tips scale inversely with distance.
const MODE2_DISTANCE_FLOOR_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TipMode {
    /// Uniform tip rate.
    Mode0,
    /// Edge pairs pay `distance / edge_radius`, centre pairs pay 1.
    Mode1,
    /// Tip inversely proportional to distance.
    Mode2,
}

impl TipMode {
    pub const ALL: [TipMode; 3] = [TipMode::Mode0, TipMode::Mode1, TipMode::Mode2];

    pub fn as_str(self) -> &'static str {
        match self {
            TipMode::Mode0 => "mode0",
            TipMode::Mode1 => "mode1",
            TipMode::Mode2 => "mode2",
        }
    }
}

impl std::fmt::Display for TipMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TipPolicy {
    pub mode: TipMode,
    pub base_rate: f64,
    pub edge_radius_m: f64,
    pub mode2_scale: f64,
}

impl Default for TipPolicy {
    fn default() -> Self {
        Self {
            mode: TipMode::Mode1,
            base_rate: 1.0,
            edge_radius_m: 50.0,
            mode2_scale: 1.0,
        }
    }
}

impl TipPolicy {
    pub fn with_mode(self, mode: TipMode) -> Self {
        Self { mode, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_rate >= 0.0) {
            return Err(Error::Config(format!("base_rate must be >= 0, got {}", self.base_rate)));
        }
        if !(self.edge_radius_m > 0.0) {
            return Err(Error::Config(format!(
                "edge_radius_m must be > 0, got {}",
                self.edge_radius_m
            )));
        }
        if !(self.mode2_scale > 0.0) {
            return Err(Error::Config(format!(
                "mode2_scale must be > 0, got {}",
                self.mode2_scale
            )));
        }
        Ok(())
    }
}

/// Tip rate `β` a pair at `distance_m` from the reused C-UE pays.
pub fn tip_rate(policy: &TipPolicy, distance_m: f64) -> f64 {
    match policy.mode {
        TipMode::Mode0 => policy.base_rate,
        TipMode::Mode1 => {
            if distance_m <= policy.edge_radius_m {
                1.0
            } else {
                distance_m / policy.edge_radius_m
            }
        }
        TipMode::Mode2 => {
            policy.mode2_scale * policy.edge_radius_m / distance_m.max(MODE2_DISTANCE_FLOOR_M)
        }
    }
}

/// Amount owed for `duration_s` of reuse at tip rate `beta`: `T (1 + β)`.
pub fn payment(duration_s: f64, beta: f64) -> Result<f64> {
    if !(duration_s >= 0.0) || !(beta >= 0.0) {
        return Err(Error::Domain(format!(
            "payment needs non-negative duration and tip, got {duration_s}, {beta}"
        )));
    }
    Ok(duration_s * (1.0 + beta))
}

/// Share of D-UEs that obtained resources.
pub fn fairness_ratio(active_due: usize, all_due: usize) -> Result<f64> {
    if all_due == 0 {
        return Err(Error::Domain("fairness ratio over zero D-UEs".into()));
    }
    if active_due > all_due {
        return Err(Error::Domain(format!(
            "{active_due} active D-UEs out of {all_due}"
        )));
    }
    Ok(active_due as f64 / all_due as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaymentRecord {
    pub due_id: usize,
    pub cue_id: usize,
    pub duration_s: f64,
    pub tip_rate: f64,
    pub amount: f64,
}

impl PaymentRecord {
    pub fn new(due_id: usize, cue_id: usize, duration_s: f64, tip_rate: f64) -> Result<Self> {
        Ok(Self {
            due_id,
            cue_id,
            duration_s,
            tip_rate,
            amount: payment(duration_s, tip_rate)?,
        })
    }
}
