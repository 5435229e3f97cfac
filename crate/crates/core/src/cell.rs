//! Single-cell geometry, channel gains and SINR.
//!
//! The base station sits at the origin. C-UEs and D2D devices are dropped
//! uniformly in the disc; every unordered pair of D2D devices forms one
//! equivalent D-UE located at the midpoint of its two devices. There is no
//! fading, so gains are a deterministic function of positions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, stream_rng};
use crate::scma::{assign_codebooks, CodebookAssignment, ScmaConfig};

use rand::Rng;

/// Path-loss distances below this are clamped.
pub const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkKind {
    /// UE to base station.
    Cellular,
    /// UE to UE.
    D2d,
}

/// Path loss in dB at `distance_m` (clamped to [`MIN_DISTANCE_M`]).
///
/// Cellular: `128.1 + 37.6 log10(d_km)`. D2D: `148 + 40 log10(d_km)`.
pub fn path_loss_db(distance_m: f64, link: LinkKind) -> f64 {
    let d_km = distance_m.max(MIN_DISTANCE_M) / 1000.0;
    match link {
        LinkKind::Cellular => 128.1 + 37.6 * d_km.log10(),
        LinkKind::D2d => 148.0 + 40.0 * d_km.log10(),
    }
}

/// Linear channel gain `10^(-PL/10)`.
pub fn channel_gain(distance_m: f64, link: LinkKind) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::Domain(format!(
            "channel gain needs a positive distance, got {distance_m}"
        )));
    }
    Ok(gain_clamped(distance_m, link))
}

fn gain_clamped(distance_m: f64, link: LinkKind) -> f64 {
    db_to_linear(-path_loss_db(distance_m, link))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellConfig {
    pub radius_m: f64,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub cue_power_dbm: f64,
    pub due_power_dbm: f64,
    pub cue_max_power_dbm: f64,
    pub due_max_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub sinr_min_cue_db: f64,
    pub sinr_min_due_db: f64,
    /// Transmitter-receiver distance inside every D2D pair.
    pub d2d_link_m: f64,
    /// Power fraction of a co-channel C-UE that survives SCMA multi-user
    /// detection at the base station.
    pub co_channel_residual_db: f64,
    pub scma_m: u32,
    pub scma_mc: u32,
    pub n_rb: u32,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self {
            radius_m: 250.0,
            carrier_hz: 2e9,
            bandwidth_hz: 20e6,
            cue_power_dbm: 20.0,
            due_power_dbm: 17.0,
            cue_max_power_dbm: 23.0,
            due_max_power_dbm: 23.0,
            noise_psd_dbm_hz: -174.0,
            sinr_min_cue_db: 10.0,
            sinr_min_due_db: 10.0,
            d2d_link_m: 20.0,
            co_channel_residual_db: -30.0,
            scma_m: 4,
            scma_mc: 2,
            n_rb: 30,
        }
    }
}

impl CellConfig {
    pub fn scma(&self) -> ScmaConfig {
        ScmaConfig {
            m: self.scma_m,
            mc: self.scma_mc,
            n_rb: self.n_rb,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("radius_m", self.radius_m),
            ("carrier_hz", self.carrier_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("d2d_link_m", self.d2d_link_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.cue_power_dbm > self.cue_max_power_dbm {
            return Err(Error::Config(format!(
                "C-UE power {} dBm exceeds its maximum {} dBm",
                self.cue_power_dbm, self.cue_max_power_dbm
            )));
        }
        if self.due_power_dbm > self.due_max_power_dbm {
            return Err(Error::Config(format!(
                "D-UE power {} dBm exceeds its maximum {} dBm",
                self.due_power_dbm, self.due_max_power_dbm
            )));
        }
        if self.co_channel_residual_db > 0.0 {
            return Err(Error::Config("co_channel_residual_db must be <= 0".into()));
        }
        self.scma()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn rb_bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz / self.n_rb as f64
    }

    /// Thermal noise over one resource block, in mW.
    pub fn noise_mw(&self) -> f64 {
        db_to_linear(self.noise_psd_dbm_hz + linear_to_db(self.rb_bandwidth_hz()))
    }

    pub fn sinr_min_cue(&self) -> f64 {
        db_to_linear(self.sinr_min_cue_db)
    }

    pub fn sinr_min_due(&self) -> f64 {
        db_to_linear(self.sinr_min_due_db)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UeKind {
    Cue,
    DuePair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UePlacement {
    pub id: usize,
    pub kind: UeKind,
    pub position: [f64; 2],
    pub tx_power_dbm: f64,
    pub sinr_min_db: f64,
}

impl UePlacement {
    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        distance(self.position, p)
    }
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Dense symmetric gain matrix over `{BS} ∪ C-UEs ∪ D-UEs`. Node 0 is the
/// base station, then C-UEs, then equivalent D-UEs. Self entries are 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainMatrix {
    n_cue: usize,
    dim: usize,
    gains: Vec<f64>,
}

impl GainMatrix {
    fn build(bs: [f64; 2], cues: &[UePlacement], dues: &[UePlacement]) -> Self {
        let nodes: Vec<[f64; 2]> = std::iter::once(bs)
            .chain(cues.iter().map(|u| u.position))
            .chain(dues.iter().map(|u| u.position))
            .collect();
        let dim = nodes.len();
        let mut gains = vec![1.0; dim * dim];
        for a in 0..dim {
            for b in (a + 1)..dim {
                let link = if a == 0 { LinkKind::Cellular } else { LinkKind::D2d };
                let g = gain_clamped(distance(nodes[a], nodes[b]), link);
                gains[a * dim + b] = g;
                gains[b * dim + a] = g;
            }
        }
        Self {
            n_cue: cues.len(),
            dim,
            gains,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.gains[a * self.dim + b]
    }

    fn cue_node(&self, k: usize) -> usize {
        1 + k
    }

    fn due_node(&self, i: usize) -> usize {
        1 + self.n_cue + i
    }

    pub fn cue_bs(&self, k: usize) -> f64 {
        self.get(0, self.cue_node(k))
    }

    pub fn due_bs(&self, i: usize) -> f64 {
        self.get(0, self.due_node(i))
    }

    pub fn cue_due(&self, k: usize, i: usize) -> f64 {
        self.get(self.cue_node(k), self.due_node(i))
    }

    pub fn due_due(&self, i: usize, j: usize) -> f64 {
        self.get(self.due_node(i), self.due_node(j))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellScenario {
    pub config: CellConfig,
    pub cues: Vec<UePlacement>,
    /// Individual D2D device positions.
    pub devices: Vec<[f64; 2]>,
    /// Equivalent D-UEs, one per unordered device pair.
    pub dues: Vec<UePlacement>,
    /// Constituent devices of each equivalent D-UE.
    pub pair_devices: Vec<(usize, usize)>,
    pub gains: GainMatrix,
    /// Codebooks of the admitted C-UEs, which are the first `codebooks.len()`.
    pub codebooks: CodebookAssignment,
    pair_link_gain: f64,
    cue_power_mw: f64,
    due_power_mw: f64,
    noise_mw: f64,
    co_channel_residual: f64,
}

fn uniform_in_disc<R: Rng>(rng: &mut R, radius: f64) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    [r * theta.cos(), r * theta.sin()]
}

/// Drop `n_cue` C-UEs and `k_due` D2D devices in the cell.
///
/// Positions come from independent per-population streams, so a scenario with
/// more UEs extends (rather than reshuffles) one with fewer. Pairs are listed
/// by their larger device index first, which keeps that prefix property for
/// the equivalent D-UEs too. C-UEs beyond the SCMA admission capacity are
/// placed but receive no codebook.
pub fn generate_scenario(
    seed: u64,
    n_cue: usize,
    k_due: usize,
    config: &CellConfig,
) -> Result<CellScenario> {
    config.validate()?;
    let mut cue_rng = stream_rng(seed, &[stream::CUE_POSITIONS]);
    let mut due_rng = stream_rng(seed, &[stream::DUE_POSITIONS]);

    let cues: Vec<UePlacement> = (0..n_cue)
        .map(|id| UePlacement {
            id,
            kind: UeKind::Cue,
            position: uniform_in_disc(&mut cue_rng, config.radius_m),
            tx_power_dbm: config.cue_power_dbm,
            sinr_min_db: config.sinr_min_cue_db,
        })
        .collect();
    let devices: Vec<[f64; 2]> = (0..k_due)
        .map(|_| uniform_in_disc(&mut due_rng, config.radius_m))
        .collect();

    let mut pair_devices = Vec::with_capacity(k_due * k_due.saturating_sub(1) / 2);
    for b in 1..k_due {
        for a in 0..b {
            pair_devices.push((a, b));
        }
    }
    let dues: Vec<UePlacement> = pair_devices
        .iter()
        .enumerate()
        .map(|(id, &(a, b))| UePlacement {
            id,
            kind: UeKind::DuePair,
            position: [
                0.5 * (devices[a][0] + devices[b][0]),
                0.5 * (devices[a][1] + devices[b][1]),
            ],
            tx_power_dbm: config.due_power_dbm,
            sinr_min_db: config.sinr_min_due_db,
        })
        .collect();

    let scma = config.scma();
    let admitted = n_cue.min(scma.admission_capacity());
    let codebooks = assign_codebooks(admitted, &scma)?;
    let gains = GainMatrix::build([0.0, 0.0], &cues, &dues);

    Ok(CellScenario {
        config: config.clone(),
        cues,
        devices,
        dues,
        pair_devices,
        gains,
        codebooks,
        pair_link_gain: gain_clamped(config.d2d_link_m, LinkKind::D2d),
        cue_power_mw: db_to_linear(config.cue_power_dbm),
        due_power_mw: db_to_linear(config.due_power_dbm),
        noise_mw: config.noise_mw(),
        co_channel_residual: db_to_linear(config.co_channel_residual_db),
    })
}

impl CellScenario {
    pub fn n_cue(&self) -> usize {
        self.cues.len()
    }

    pub fn n_admitted(&self) -> usize {
        self.codebooks.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.dues.len()
    }

    pub fn noise_mw(&self) -> f64 {
        self.noise_mw
    }

    pub fn cue_power_mw(&self) -> f64 {
        self.cue_power_mw
    }

    pub fn due_power_mw(&self) -> f64 {
        self.due_power_mw
    }

    pub fn pair_link_gain(&self) -> f64 {
        self.pair_link_gain
    }

    /// Distance from equivalent D-UE `i` to C-UE `k`.
    pub fn due_cue_distance(&self, i: usize, k: usize) -> f64 {
        self.dues[i].distance_to(self.cues[k].position)
    }

    /// Admitted C-UEs sharing `k`'s resource block with an overlapping support.
    pub fn co_channel_of(&self, k: usize) -> Vec<usize> {
        if k < self.codebooks.len() {
            self.codebooks.co_channel_of(k)
        } else {
            Vec::new()
        }
    }

    /// Uplink SINR of C-UE `k` at the base station with the given D-UEs
    /// reusing its resource and the given co-channel C-UEs (linear).
    pub fn sinr_cue(&self, k: usize, active_due: &[usize], co_channel: &[usize]) -> f64 {
        let signal = self.cue_power_mw * self.gains.cue_bs(k);
        let due_interference: f64 = active_due
            .iter()
            .map(|&i| self.due_power_mw * self.gains.due_bs(i))
            .sum();
        let cue_interference: f64 = co_channel
            .iter()
            .map(|&l| self.co_channel_residual * self.cue_power_mw * self.gains.cue_bs(l))
            .sum();
        signal / (due_interference + cue_interference + self.noise_mw)
    }

    /// SINR at the receiver of pair `i` while reusing `serving_cue`'s
    /// resource alongside `other_due` (linear). `None` means no C-UE
    /// interference.
    pub fn sinr_due(&self, i: usize, serving_cue: Option<usize>, other_due: &[usize]) -> f64 {
        let signal = self.due_power_mw * self.pair_link_gain;
        let cue_interference =
            serving_cue.map_or(0.0, |k| self.cue_power_mw * self.gains.cue_due(k, i));
        let due_interference: f64 = other_due
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| self.due_power_mw * self.gains.due_due(j, i))
            .sum();
        signal / (cue_interference + due_interference + self.noise_mw)
    }

    /// Initial SINRs and single-interferer SINR losses for every admitted
    /// C-UE and every D-UE. Positions are fixed within a slot, so this holds
    /// for every slot of the horizon.
    pub fn sinr_state(&self) -> SinrState {
        let n = self.n_admitted();
        let p = self.n_pairs();
        let co: Vec<Vec<usize>> = (0..n).map(|k| self.co_channel_of(k)).collect();
        let gamma0_cue: Vec<f64> = (0..n).map(|k| self.sinr_cue(k, &[], &co[k])).collect();
        let cue_loss: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                (0..p)
                    .map(|i| (gamma0_cue[k] - self.sinr_cue(k, &[i], &co[k])).max(0.0))
                    .collect()
            })
            .collect();
        let gamma0_due: Vec<Vec<f64>> = (0..n)
            .map(|k| (0..p).map(|i| self.sinr_due(i, Some(k), &[])).collect())
            .collect();
        SinrState {
            gamma0_cue,
            cue_loss,
            gamma0_due,
            sinr_min_cue: self.config.sinr_min_cue(),
            sinr_min_due: self.config.sinr_min_due(),
        }
    }

    /// SINR loss of pair `i`, reusing C-UE `k`, caused by pair `j` joining.
    pub fn due_loss(&self, state: &SinrState, k: usize, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        (state.gamma0_due[k][i] - self.sinr_due(i, Some(k), &[j])).max(0.0)
    }
}

/// Linearized SINR bookkeeping: initial values and per-interferer losses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrState {
    /// `γ₀` of each admitted C-UE (co-channel C-UEs included, no D-UEs).
    pub gamma0_cue: Vec<f64>,
    /// `[k][i]`: drop of C-UE `k`'s SINR when D-UE `i` alone reuses it.
    pub cue_loss: Vec<Vec<f64>>,
    /// `[k][i]`: SINR of D-UE `i` when it alone reuses C-UE `k`.
    pub gamma0_due: Vec<Vec<f64>>,
    pub sinr_min_cue: f64,
    pub sinr_min_due: f64,
}

impl SinrState {
    /// Admitted C-UEs in descending initial SINR, ties by index.
    pub fn cue_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.gamma0_cue.len()).collect();
        order.sort_by(|&a, &b| {
            self.gamma0_cue[b]
                .total_cmp(&self.gamma0_cue[a])
                .then(a.cmp(&b))
        });
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    #[test]
    fn path_loss_reference_points() {
        assert!((path_loss_db(1000.0, LinkKind::Cellular) - 128.1).abs() < 1e-12);
        assert!((path_loss_db(1000.0, LinkKind::D2d) - 148.0).abs() < 1e-12);
        let g = channel_gain(1000.0, LinkKind::Cellular).unwrap();
        assert!(approx(g, 10f64.powf(-12.81), 1e-12));
        let g = channel_gain(1000.0, LinkKind::D2d).unwrap();
        assert!(approx(g, 10f64.powf(-14.8), 1e-12));
    }

    #[test]
    fn gain_domain_errors() {
        assert!(channel_gain(0.0, LinkKind::Cellular).is_err());
        assert!(channel_gain(-3.0, LinkKind::D2d).is_err());
        assert!(channel_gain(f64::NAN, LinkKind::D2d).is_err());
        // Sub-metre distances clamp.
        assert_eq!(
            channel_gain(0.25, LinkKind::D2d).unwrap(),
            channel_gain(1.0, LinkKind::D2d).unwrap()
        );
    }

    #[test]
    fn pair_counts() {
        let cfg = CellConfig::default();
        assert_eq!(generate_scenario(1, 3, 2, &cfg).unwrap().n_pairs(), 1);
        assert_eq!(generate_scenario(1, 3, 0, &cfg).unwrap().n_pairs(), 0);
        assert_eq!(generate_scenario(1, 3, 1, &cfg).unwrap().n_pairs(), 0);
        assert_eq!(generate_scenario(1, 3, 10, &cfg).unwrap().n_pairs(), 45);
        let empty = generate_scenario(1, 0, 0, &cfg).unwrap();
        assert_eq!(empty.n_cue(), 0);
        assert!(empty.sinr_state().gamma0_cue.is_empty());
    }

    #[test]
    fn scenario_is_deterministic_and_nested() {
        let cfg = CellConfig::default();
        let a = generate_scenario(42, 5, 4, &cfg).unwrap();
        let b = generate_scenario(42, 5, 4, &cfg).unwrap();
        assert_eq!(a, b);
        let c = generate_scenario(43, 5, 4, &cfg).unwrap();
        assert_ne!(a.cues, c.cues);

        let bigger = generate_scenario(42, 8, 6, &cfg).unwrap();
        assert_eq!(&bigger.cues[..5], &a.cues[..]);
        assert_eq!(&bigger.dues[..a.n_pairs()], &a.dues[..]);
    }

    #[test]
    fn pairs_sit_at_midpoints_inside_the_cell() {
        let cfg = CellConfig::default();
        let s = generate_scenario(9, 20, 12, &cfg).unwrap();
        for u in s.cues.iter().chain(s.dues.iter()) {
            assert!(u.distance_to([0.0, 0.0]) <= cfg.radius_m);
        }
        for (due, &(a, b)) in s.dues.iter().zip(&s.pair_devices) {
            assert!(a < b);
            let mid = [
                0.5 * (s.devices[a][0] + s.devices[b][0]),
                0.5 * (s.devices[a][1] + s.devices[b][1]),
            ];
            assert_eq!(due.position, mid);
        }
    }

    #[test]
    fn admission_caps_codebooks() {
        let cfg = CellConfig {
            n_rb: 2,
            ..CellConfig::default()
        };
        let s = generate_scenario(1, 10, 0, &cfg).unwrap();
        assert_eq!(s.n_cue(), 10);
        assert_eq!(s.n_admitted(), 3);
    }

    /// One C-UE at 100 m and one D-UE pair at 200 m from the base station.
    fn fixed_geometry() -> CellScenario {
        let cfg = CellConfig::default();
        let mut s = generate_scenario(0, 1, 2, &cfg).unwrap();
        s.cues[0].position = [100.0, 0.0];
        s.devices = vec![[-200.0, 10.0], [-200.0, -10.0]];
        s.dues[0].position = [-200.0, 0.0];
        s.gains = GainMatrix::build([0.0, 0.0], &s.cues, &s.dues);
        s
    }

    #[test]
    fn sinr_hand_evaluation() {
        let s = fixed_geometry();
        let cfg = &s.config;
        // Noise: -174 dBm/Hz over 20 MHz / 30 RBs.
        let noise = 10f64.powf((-174.0 + 10.0 * (20e6f64 / 30.0).log10()) / 10.0);
        assert!(approx(s.noise_mw(), noise, 1e-12));

        // C-UE: 100 mW through 128.1 + 37.6 log10(0.1) dB.
        let pl_cue = 128.1 - 37.6;
        let signal = 100.0 * 10f64.powf(-pl_cue / 10.0);
        // D-UE: 10^1.7 mW through 128.1 + 37.6 log10(0.2) dB.
        let pl_due = 128.1 + 37.6 * 0.2f64.log10();
        let interference = 10f64.powf(1.7) * 10f64.powf(-pl_due / 10.0);
        assert!(approx(s.sinr_cue(0, &[], &[]), signal / noise, 1e-12));
        assert!(approx(
            s.sinr_cue(0, &[0], &[]),
            signal / (interference + noise),
            1e-12
        ));
        assert!(s.sinr_cue(0, &[0], &[]) < s.sinr_cue(0, &[], &[]));

        // D-UE: 20 m pair link; C-UE interferer 300 m away on the D2D law.
        let pl_link = 148.0 + 40.0 * 0.02f64.log10();
        let pl_cross = 148.0 + 40.0 * 0.3f64.log10();
        let d_signal = 10f64.powf(1.7) * 10f64.powf(-pl_link / 10.0);
        let d_int = 100.0 * 10f64.powf(-pl_cross / 10.0);
        assert!(approx(
            s.sinr_due(0, Some(0), &[]),
            d_signal / (d_int + noise),
            1e-12
        ));
        assert!(approx(s.sinr_due(0, None, &[]), d_signal / noise, 1e-12));
        assert_eq!(cfg.d2d_link_m, 20.0);
    }

    #[test]
    fn linearized_state_reproduces_single_interferer_sinr() {
        let cfg = CellConfig::default();
        let s = generate_scenario(5, 6, 6, &cfg).unwrap();
        let st = s.sinr_state();
        for k in 0..s.n_admitted() {
            assert_eq!(st.gamma0_cue[k], s.sinr_cue(k, &[], &s.co_channel_of(k)));
            for i in 0..s.n_pairs() {
                let direct = s.sinr_cue(k, &[i], &s.co_channel_of(k));
                assert!((st.gamma0_cue[k] - st.cue_loss[k][i] - direct).abs() <= 1e-12 * st.gamma0_cue[k]);
                assert!(st.cue_loss[k][i] >= 0.0);
                for j in 0..s.n_pairs() {
                    assert!(s.due_loss(&st, k, i, j) >= 0.0);
                }
            }
        }
        let none = generate_scenario(5, 6, 0, &cfg).unwrap().sinr_state();
        assert!(none.cue_loss.iter().all(|row| row.is_empty()));
    }

    #[test]
    fn cue_order_is_descending() {
        let s = generate_scenario(11, 12, 0, &CellConfig::default()).unwrap();
        let st = s.sinr_state();
        let order = st.cue_order();
        for w in order.windows(2) {
            assert!(st.gamma0_cue[w[0]] >= st.gamma0_cue[w[1]]);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = CellConfig::default();
        cfg.cue_power_dbm = 30.0;
        assert!(cfg.validate().is_err());
        let mut cfg = CellConfig::default();
        cfg.radius_m = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = CellConfig::default();
        cfg.scma_mc = 4;
        assert!(cfg.validate().is_err());
    }

    proptest! {
        #[test]
        fn gain_bounded_and_decreasing(d1 in 1.0f64..5000.0, delta in 0.01f64..1000.0) {
            for link in [LinkKind::Cellular, LinkKind::D2d] {
                let g1 = channel_gain(d1, link).unwrap();
                let g2 = channel_gain(d1 + delta, link).unwrap();
                prop_assert!(g1 > 0.0 && g1 <= 1.0);
                prop_assert!(g1 > g2);
            }
        }

        #[test]
        fn interference_only_lowers_sinr(seed in 0u64..500) {
            let s = generate_scenario(seed, 3, 5, &CellConfig::default()).unwrap();
            let base = s.sinr_cue(0, &[], &[]);
            let closed = s.cue_power_mw() * s.gains.cue_bs(0) / s.noise_mw();
            prop_assert!(approx(base, closed, 1e-12));
            let one = s.sinr_cue(0, &[0], &[]);
            let two = s.sinr_cue(0, &[0, 1], &[]);
            prop_assert!(base > one && one > two);
            let d0 = s.sinr_due(0, Some(1), &[]);
            let d1 = s.sinr_due(0, Some(1), &[2]);
            let d2 = s.sinr_due(0, Some(1), &[2, 3]);
            prop_assert!(d0 > d1 && d1 > d2);
            prop_assert!(s.sinr_due(0, None, &[]) > d0);
        }
    }
}
