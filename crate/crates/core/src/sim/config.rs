use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::{AffinityParams, SpectralOptions};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::matching::{AnnealSchedule, PtSign};
use crate::social::{BetweennessNorm, SocialModel, SocialParams};
use crate::wireless::{ChannelModel, D2dLosRule, NetworkTopology, PathLossCoeffs};

/// How UEs are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UePlacement {
    /// `ues_per_scbs` UEs uniformly inside each SCBS's coverage disc.
    PerCellDisc,
    /// `n_scbs * ues_per_scbs` UEs uniformly over the square.
    UniformArea,
}

/// Social graph family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SocialKind {
    ErdosRenyi,
    WattsStrogatz,
}

macro_rules! keyword_enum {
    ($ty:ty { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($name => Ok($variant),)+
                    _ => Err(format!("unknown value `{s}`")),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $variant { return f.write_str($name); })+
                unreachable!()
            }
        }
    };
}

keyword_enum!(UePlacement {
    "per-cell-disc" => UePlacement::PerCellDisc,
    "uniform-area" => UePlacement::UniformArea,
});
keyword_enum!(SocialKind {
    "erdos-renyi" => SocialKind::ErdosRenyi,
    "watts-strogatz" => SocialKind::WattsStrogatz,
});
keyword_enum!(BetweennessNorm {
    "squared-order" => BetweennessNorm::SquaredOrder,
    "pair-count" => BetweennessNorm::PairCount,
});

impl FromStr for D2dLosRule {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "always-los" => Ok(D2dLosRule::AlwaysLos),
            "always-nlos" => Ok(D2dLosRule::AlwaysNlos),
            _ => s
                .strip_prefix("threshold:")
                .and_then(|v| v.parse().ok())
                .map(D2dLosRule::Threshold)
                .ok_or_else(|| format!("unknown value `{s}`")),
        }
    }
}

impl fmt::Display for D2dLosRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            D2dLosRule::AlwaysLos => f.write_str("always-los"),
            D2dLosRule::AlwaysNlos => f.write_str("always-nlos"),
            D2dLosRule::Threshold(d) => write!(f, "threshold:{d}"),
        }
    }
}

macro_rules! scenario_config {
    ($($(#[doc = $doc:literal])* $field:ident : $ty:ty = $default:expr;)+) => {
        /// Every knob of a simulation campaign.
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        pub struct ScenarioConfig {
            $($(#[doc = $doc])* pub $field: $ty,)+
        }

        impl Default for ScenarioConfig {
            fn default() -> Self {
                ScenarioConfig { $($field: $default,)+ }
            }
        }

        impl ScenarioConfig {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($field)),+];

            /// Sets one key from its textual value.
            pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
                match key {
                    $(stringify!($field) => {
                        self.$field = value
                            .parse::<$ty>()
                            .map_err(|e| format!("bad value `{value}` for `{key}`: {e}"))?;
                    })+
                    _ => return Err(format!("unknown key `{key}`")),
                }
                Ok(())
            }

            /// Flat `key = value` text, one key per line, every key present.
            pub fn to_text(&self) -> String {
                let mut out = String::new();
                $(out.push_str(&format!("{} = {}\n", stringify!($field), self.$field));)+
                out
            }
        }
    };
}

scenario_config! {
    n_scbs: usize = 8;
    ues_per_scbs: usize = 10;
    /// Side of the square deployment area.
    area_side_m: f64 = 500.0;
    inter_site_min_m: f64 = 40.0;
    ue_placement: UePlacement = UePlacement::PerCellDisc;
    scbs_tx_power_dbm: f64 = 23.0;
    ue_tx_power_dbm: f64 = 15.0;
    bandwidth_hz: f64 = 5e6;
    noise_psd_dbm_hz: f64 = -174.0;
    scbs_radius_m: f64 = 50.0;
    d2d_radius_m: f64 = 20.0;
    tau0_fraction: f64 = 0.84;
    pl_los_intercept_db: f64 = PathLossCoeffs::D2D_LOS.intercept_db;
    pl_los_slope_db: f64 = PathLossCoeffs::D2D_LOS.slope_db;
    pl_nlos_intercept_db: f64 = PathLossCoeffs::D2D_NLOS.intercept_db;
    pl_nlos_slope_db: f64 = PathLossCoeffs::D2D_NLOS.slope_db;
    pl_cellular_intercept_db: f64 = PathLossCoeffs::D2D_NLOS.intercept_db;
    pl_cellular_slope_db: f64 = PathLossCoeffs::D2D_NLOS.slope_db;
    d2d_los_rule: D2dLosRule = D2dLosRule::AlwaysNlos;
    /// Divide SCBS power evenly over the UEs it serves.
    power_split: bool = false;
    social_model: SocialKind = SocialKind::ErdosRenyi;
    social_p: f64 = 0.8;
    social_ws_k: usize = 4;
    social_ws_rewire: f64 = 0.1;
    alpha: f64 = 0.5;
    beta: f64 = 0.5;
    epsilon: f64 = 1.0;
    betweenness_norm: BetweennessNorm = BetweennessNorm::SquaredOrder;
    important_per_scbs: usize = 1;
    cluster_radius_m: f64 = 200.0;
    sigma_d: f64 = 100.0;
    sigma_l: f64 = 1.0;
    omega: f64 = 0.5;
    k_min: usize = 2;
    /// 0 selects `⌈N/2 + 1⌉`.
    k_max: usize = 0;
    kmeans_restarts: usize = 20;
    kmeans_max_iter: usize = 100;
    t_max: usize = 10;
    count_max: usize = 200;
    pt_sign: PtSign = PtSign::Standard;
    allow_moves: bool = true;
    polish: bool = true;
    seed: u64 = 1;
    runs: usize = 20;
}

impl ScenarioConfig {
    /// Parses flat `key = value` text. Blank lines and `#` comments are
    /// ignored; unknown and repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {lineno}: expected `key = value`")))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::config(format!("line {lineno}: duplicate key `{key}`")));
            }
            cfg.set(key, value.trim())
                .map_err(|e| Error::config(format!("line {lineno}: {e}")))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ScenarioConfig::parse(&text).map_err(|e| match e {
            Error::Config(message) => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn n_ues(&self) -> usize {
        self.n_scbs * self.ues_per_scbs
    }

    pub fn channel(&self) -> ChannelModel {
        ChannelModel {
            los: PathLossCoeffs {
                intercept_db: self.pl_los_intercept_db,
                slope_db: self.pl_los_slope_db,
            },
            nlos: PathLossCoeffs {
                intercept_db: self.pl_nlos_intercept_db,
                slope_db: self.pl_nlos_slope_db,
            },
            cellular: PathLossCoeffs {
                intercept_db: self.pl_cellular_intercept_db,
                slope_db: self.pl_cellular_slope_db,
            },
            d2d_rule: self.d2d_los_rule,
        }
    }

    pub fn topology(&self, scbs: Vec<Point>, ues: Vec<Point>) -> NetworkTopology {
        NetworkTopology {
            scbs_positions: scbs,
            ue_positions: ues,
            area_side_m: self.area_side_m,
            scbs_tx_power_dbm: self.scbs_tx_power_dbm,
            ue_tx_power_dbm: self.ue_tx_power_dbm,
            bandwidth_hz: self.bandwidth_hz,
            noise_psd_dbm_hz: self.noise_psd_dbm_hz,
            scbs_radius_m: self.scbs_radius_m,
            d2d_radius_m: self.d2d_radius_m,
            tau0_fraction: self.tau0_fraction,
        }
    }

    pub fn social_model(&self) -> SocialModel {
        match self.social_model {
            SocialKind::ErdosRenyi => SocialModel::ErdosRenyi { p: self.social_p },
            SocialKind::WattsStrogatz => SocialModel::WattsStrogatz {
                k: self.social_ws_k,
                rewire: self.social_ws_rewire,
            },
        }
    }

    pub fn social_params(&self) -> SocialParams {
        SocialParams {
            alpha: self.alpha,
            beta: self.beta,
            epsilon: self.epsilon,
            betweenness_norm: self.betweenness_norm,
        }
    }

    pub fn affinity(&self) -> AffinityParams {
        AffinityParams {
            neighborhood_radius_m: self.cluster_radius_m,
            sigma_d: self.sigma_d,
            sigma_l: self.sigma_l,
            omega: self.omega,
        }
    }

    pub fn spectral_options(&self) -> SpectralOptions {
        let mut opts = SpectralOptions::for_network(self.n_scbs);
        opts.k_min = self.k_min;
        if self.k_max > 0 {
            opts.k_max = self.k_max;
        }
        opts.k_max = opts.k_max.max(opts.k_min);
        opts.restarts = self.kmeans_restarts;
        opts.max_iter = self.kmeans_max_iter;
        opts
    }

    pub fn schedule(&self) -> AnnealSchedule {
        AnnealSchedule {
            count_max: self.count_max,
            t_max: self.t_max,
            pt_sign: self.pt_sign,
            allow_moves: self.allow_moves,
            polish: self.polish,
        }
    }

    /// Checks every parameter without building a scenario.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("area_side_m", self.area_side_m),
            ("bandwidth_hz", self.bandwidth_hz),
            ("scbs_radius_m", self.scbs_radius_m),
            ("d2d_radius_m", self.d2d_radius_m),
            ("epsilon", self.epsilon),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("`{key}` must be positive and finite, got {v}")));
            }
        }
        if self.inter_site_min_m.is_nan() || self.inter_site_min_m < 0.0 {
            return Err(Error::config("`inter_site_min_m` must be non-negative"));
        }
        if !(self.tau0_fraction > 0.0 && self.tau0_fraction < 1.0) {
            return Err(Error::config(format!(
                "`tau0_fraction` must lie in (0, 1), got {}",
                self.tau0_fraction
            )));
        }
        if self.n_scbs == 0 || self.ues_per_scbs == 0 {
            return Err(Error::config("`n_scbs` and `ues_per_scbs` must be at least 1"));
        }
        if self.runs == 0 {
            return Err(Error::config("`runs` must be at least 1"));
        }
        if self.alpha < 0.0 || self.beta < 0.0 || self.alpha + self.beta > 1.0 + 1e-12 {
            return Err(Error::config("need alpha, beta >= 0 and alpha + beta <= 1"));
        }
        if self.k_min == 0 || (self.k_max != 0 && self.k_max < self.k_min) {
            return Err(Error::config("need 1 <= k_min <= k_max"));
        }
        if self.kmeans_restarts == 0 || self.kmeans_max_iter == 0 {
            return Err(Error::config("k-means restarts and iterations must be at least 1"));
        }
        if self.important_per_scbs == 0 {
            return Err(Error::config("`important_per_scbs` must be at least 1"));
        }
        self.social_model().validate()?;
        if let SocialModel::WattsStrogatz { k, .. } = self.social_model() {
            if k >= self.n_ues() {
                return Err(Error::config("`social_ws_k` must be below the number of UEs"));
            }
        }
        self.affinity().validate()?;
        Ok(())
    }
}
