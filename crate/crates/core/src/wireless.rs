//! Geometry, channel, and achievable-rate primitives.
//!
//! Everything here is a pure function of the topology and of explicit
//! per-SCBS service counts; association-aware wrappers live in
//! [`crate::network`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// `a + b·log10(d_km)` path-loss law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossCoeffs {
    pub intercept_db: f64,
    pub slope_db: f64,
}

impl PathLossCoeffs {
    pub const D2D_LOS: PathLossCoeffs = PathLossCoeffs {
        intercept_db: 103.8,
        slope_db: 20.9,
    };
    pub const D2D_NLOS: PathLossCoeffs = PathLossCoeffs {
        intercept_db: 145.4,
        slope_db: 37.5,
    };

    pub fn eval(&self, distance_m: f64) -> f64 {
        self.intercept_db + self.slope_db * (distance_m / 1000.0).log10()
    }
}

/// Which D2D path-loss branch a link uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum D2dLosRule {
    AlwaysLos,
    AlwaysNlos,
    /// LOS up to and including the given distance in meters, NLOS beyond.
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkKind {
    Cellular,
    D2dLos,
    D2dNlos,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub los: PathLossCoeffs,
    pub nlos: PathLossCoeffs,
    pub cellular: PathLossCoeffs,
    pub d2d_rule: D2dLosRule,
}

impl Default for ChannelModel {
    fn default() -> Self {
        ChannelModel {
            los: PathLossCoeffs::D2D_LOS,
            nlos: PathLossCoeffs::D2D_NLOS,
            cellular: PathLossCoeffs::D2D_NLOS,
            d2d_rule: D2dLosRule::AlwaysNlos,
        }
    }
}

impl ChannelModel {
    /// Path loss in dB. Non-positive distances are rejected; callers that
    /// may see co-located nodes go through [`ChannelModel::channel_gain`].
    pub fn path_loss(&self, distance_m: f64, kind: LinkKind) -> Result<f64> {
        if distance_m.is_nan() || distance_m <= 0.0 {
            return Err(Error::domain(format!(
                "path loss needs a positive distance, got {distance_m} m"
            )));
        }
        let coeffs = match kind {
            LinkKind::Cellular => self.cellular,
            LinkKind::D2dLos => self.los,
            LinkKind::D2dNlos => self.nlos,
        };
        Ok(coeffs.eval(distance_m))
    }

    pub fn d2d_kind(&self, distance_m: f64) -> LinkKind {
        match self.d2d_rule {
            D2dLosRule::AlwaysLos => LinkKind::D2dLos,
            D2dLosRule::AlwaysNlos => LinkKind::D2dNlos,
            D2dLosRule::Threshold(limit) if distance_m <= limit => LinkKind::D2dLos,
            D2dLosRule::Threshold(_) => LinkKind::D2dNlos,
        }
    }

    /// Linear channel gain between two positions, distance clamped at 1 m.
    pub fn channel_gain(&self, tx: &Point, rx: &Point, kind: LinkKind) -> f64 {
        let d = tx.clamped_distance(rx);
        // d >= 1 m so path_loss cannot fail
        let pl = self.path_loss(d, kind).expect("clamped distance is positive");
        db_to_linear(-pl)
    }

    pub fn d2d_gain(&self, tx: &Point, rx: &Point) -> f64 {
        let kind = self.d2d_kind(tx.clamped_distance(rx));
        self.channel_gain(tx, rx, kind)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Deployment geometry and radio constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub scbs_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    pub area_side_m: f64,
    pub scbs_tx_power_dbm: f64,
    pub ue_tx_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_hz: f64,
    pub scbs_radius_m: f64,
    pub d2d_radius_m: f64,
    /// Fraction of the frame given to the cellular slot; the D2D slot gets the rest.
    pub tau0_fraction: f64,
}

impl NetworkTopology {
    pub fn with_positions(scbs: Vec<Point>, ues: Vec<Point>) -> Self {
        NetworkTopology {
            scbs_positions: scbs,
            ue_positions: ues,
            ..Self::default()
        }
    }

    pub fn n_scbs(&self) -> usize {
        self.scbs_positions.len()
    }

    pub fn n_ues(&self) -> usize {
        self.ue_positions.len()
    }

    pub fn tau1_fraction(&self) -> f64 {
        1.0 - self.tau0_fraction
    }

    pub fn scbs_ue_distance(&self, n: usize, m: usize) -> f64 {
        self.scbs_positions[n].distance(&self.ue_positions[m])
    }

    pub fn ue_distance(&self, a: usize, b: usize) -> f64 {
        self.ue_positions[a].distance(&self.ue_positions[b])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau0_fraction > 0.0 && self.tau0_fraction < 1.0) {
            return Err(Error::config(format!(
                "tau0_fraction must lie in (0, 1), got {}",
                self.tau0_fraction
            )));
        }
        for (name, v) in [
            ("bandwidth_hz", self.bandwidth_hz),
            ("scbs_radius_m", self.scbs_radius_m),
            ("d2d_radius_m", self.d2d_radius_m),
            ("area_side_m", self.area_side_m),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        let side = self.area_side_m;
        let inside = |p: &Point| (0.0..=side).contains(&p.x) && (0.0..=side).contains(&p.y);
        if let Some(p) = self
            .scbs_positions
            .iter()
            .chain(&self.ue_positions)
            .find(|p| !inside(p))
        {
            return Err(Error::config(format!(
                "position ({}, {}) lies outside the {side} m square",
                p.x, p.y
            )));
        }
        Ok(())
    }
}

impl Default for NetworkTopology {
    fn default() -> Self {
        NetworkTopology {
            scbs_positions: Vec::new(),
            ue_positions: Vec::new(),
            area_side_m: 500.0,
            scbs_tx_power_dbm: 23.0,
            ue_tx_power_dbm: 15.0,
            bandwidth_hz: 5e6,
            noise_psd_dbm_hz: -174.0,
            scbs_radius_m: 50.0,
            d2d_radius_m: 20.0,
            tau0_fraction: 0.84,
        }
    }
}

/// Precomputed link gains plus the constants the rate formulas need.
#[derive(Debug, Clone)]
pub struct RadioMap {
    scbs_ue_gain: Vec<Vec<f64>>,
    ue_ue_gain: Vec<Vec<f64>>,
    scbs_power_w: f64,
    ue_power_w: f64,
    bandwidth_hz: f64,
    noise_psd_w_hz: f64,
    scbs_tx_power_dbm: f64,
    cellular_pl_db: Vec<Vec<f64>>,
    pub power_split: bool,
}

impl RadioMap {
    pub fn new(topology: &NetworkTopology, channel: &ChannelModel) -> Self {
        let scbs = &topology.scbs_positions;
        let ues = &topology.ue_positions;
        let cellular_pl_db: Vec<Vec<f64>> = scbs
            .iter()
            .map(|s| {
                ues.iter()
                    .map(|u| {
                        channel
                            .path_loss(s.clamped_distance(u), LinkKind::Cellular)
                            .expect("clamped distance is positive")
                    })
                    .collect()
            })
            .collect();
        let scbs_ue_gain = cellular_pl_db
            .iter()
            .map(|row| row.iter().map(|pl| db_to_linear(-pl)).collect())
            .collect();
        let ue_ue_gain = ues
            .iter()
            .map(|a| ues.iter().map(|b| channel.d2d_gain(a, b)).collect())
            .collect();
        RadioMap {
            scbs_ue_gain,
            ue_ue_gain,
            scbs_power_w: dbm_to_watts(topology.scbs_tx_power_dbm),
            ue_power_w: dbm_to_watts(topology.ue_tx_power_dbm),
            bandwidth_hz: topology.bandwidth_hz,
            noise_psd_w_hz: dbm_to_watts(topology.noise_psd_dbm_hz),
            scbs_tx_power_dbm: topology.scbs_tx_power_dbm,
            cellular_pl_db,
            power_split: false,
        }
    }

    pub fn with_power_split(mut self, power_split: bool) -> Self {
        self.power_split = power_split;
        self
    }

    pub fn n_scbs(&self) -> usize {
        self.scbs_ue_gain.len()
    }

    pub fn scbs_ue_gain(&self, n: usize, m: usize) -> f64 {
        self.scbs_ue_gain[n][m]
    }

    pub fn ue_ue_gain(&self, i: usize, m: usize) -> f64 {
        self.ue_ue_gain[i][m]
    }

    pub fn set_scbs_power_w(&mut self, watts: f64) {
        self.scbs_power_w = watts;
    }

    pub fn set_ue_power_w(&mut self, watts: f64) {
        self.ue_power_w = watts;
    }

    /// RSSI of SCBS `n` at UE `m`: transmit power minus cellular path loss.
    pub fn rssi_dbm(&self, n: usize, m: usize) -> f64 {
        self.scbs_tx_power_dbm - self.cellular_pl_db[n][m]
    }

    /// Strongest-RSSI SCBS for UE `m`, lowest id on ties.
    pub fn max_rssi_scbs(&self, m: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for n in 0..self.n_scbs() {
            let r = self.rssi_dbm(n, m);
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((n, r));
            }
        }
        best.map(|(n, _)| n)
    }

    fn scbs_tx_power(&self, served: usize) -> f64 {
        if self.power_split && served > 1 {
            self.scbs_power_w / served as f64
        } else {
            self.scbs_power_w
        }
    }

    /// Cellular rate of UE `m` on SCBS `n` given the per-SCBS service
    /// counts `|L_n|`. The sub-band is `B/|L_n|`; noise is integrated over it.
    /// All other SCBSs interfere.
    pub fn cellular_rate(&self, n: usize, m: usize, served: &[usize], time_share: f64) -> f64 {
        self.cellular_rate_inner(n, m, served, time_share, true)
    }

    /// [`RadioMap::cellular_rate`] with the interference sum dropped.
    pub fn cellular_rate_max(&self, n: usize, m: usize, served: &[usize], time_share: f64) -> f64 {
        self.cellular_rate_inner(n, m, served, time_share, false)
    }

    fn cellular_rate_inner(
        &self,
        n: usize,
        m: usize,
        served: &[usize],
        time_share: f64,
        with_interference: bool,
    ) -> f64 {
        let share = served[n].max(1) as f64;
        let sub_band = self.bandwidth_hz / share;
        let signal = self.scbs_tx_power(served[n]) * self.scbs_ue_gain[n][m];
        let interference: f64 = if with_interference {
            (0..self.n_scbs())
                .filter(|&k| k != n)
                .map(|k| self.scbs_tx_power(served[k]) * self.scbs_ue_gain[k][m])
                .sum()
        } else {
            0.0
        };
        let sinr = signal / (self.noise_psd_w_hz * sub_band + interference);
        time_share * sub_band * (1.0 + sinr).log2()
    }

    /// D2D rate from important UE `i` to UE `m` over the full band, with
    /// interference from every other transmitter in `active`.
    pub fn d2d_link_rate(&self, i: usize, m: usize, active: &[usize], time_share: f64) -> f64 {
        let signal = self.ue_power_w * self.ue_ue_gain[i][m];
        let interference: f64 = active
            .iter()
            .filter(|&&k| k != i && k != m)
            .map(|&k| self.ue_power_w * self.ue_ue_gain[k][m])
            .sum();
        let sinr = signal / (self.noise_psd_w_hz * self.bandwidth_hz + interference);
        time_share * self.bandwidth_hz * (1.0 + sinr).log2()
    }

    /// Common broadcast rate of important UE `i` towards all of `members`:
    /// the worst member's link rate.
    pub fn broadcast_rate(
        &self,
        i: usize,
        members: &[usize],
        active: &[usize],
        time_share: f64,
    ) -> Result<f64> {
        members
            .iter()
            .map(|&m| self.d2d_link_rate(i, m, active, time_share))
            .reduce(f64::min)
            .ok_or_else(|| Error::domain(format!("important UE {i} has no D2D members")))
    }
}

/// Two-hop rate: bottleneck of the SCBS→important-UE hop and the broadcast hop.
pub fn end_to_end_rate(first_hop: f64, broadcast: f64) -> f64 {
    first_hop.min(broadcast)
}
