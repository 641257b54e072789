use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analytic::{default_mcs_for_subchannels, ScenarioConfig};
use crate::error::{config_err, Error, Result};
use crate::propagation::{BlerTable, PathlossModel, ShadowingModel};
use crate::simulator::SimParams;

/// A value that may be written either as a scalar or as an array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            Self::One(v) => vec![v],
            Self::Many(v) => v,
        }
    }
}

/// On-disk layout of a manifest. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    beta: Option<OneOrMany<f64>>,
    tx_power_dbm: Option<OneOrMany<f64>>,
    lambda_hz: Option<OneOrMany<u32>>,
    subchannels: Option<OneOrMany<u32>>,
    seeds: Option<OneOrMany<u64>>,

    sigma_db: Option<f64>,
    pathloss_intercept_db: Option<f64>,
    pathloss_slope_db: Option<f64>,
    sensing_threshold_dbm: Option<f64>,
    noise_power_dbm: Option<f64>,
    packet_size_bytes: Option<u32>,
    delta_db: Option<f64>,
    bler_table: Option<PathBuf>,
    floor_common_at_candidates: Option<bool>,

    distance_step_m: Option<f64>,
    out_dir: Option<PathBuf>,

    #[serde(default)]
    simulation: SimParams,
}

/// Identifies one point of the scenario matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioKey {
    pub beta: f64,
    pub tx_power_dbm: f64,
    pub lambda_hz: u32,
    pub subchannels: u32,
}

impl ScenarioKey {
    /// File-name stem, e.g. `pt20_beta0.1_lambda10_s4`.
    pub fn stem(&self) -> String {
        format!("pt{}_beta{}_lambda{}_s{}", self.tx_power_dbm, self.beta, self.lambda_hz, self.subchannels)
    }
}

/// Channel and model settings shared by every scenario of a manifest.
#[derive(Debug, Clone, Default)]
pub struct ChannelOverrides {
    pub sigma_db: Option<f64>,
    pub pathloss_intercept_db: Option<f64>,
    pub pathloss_slope_db: Option<f64>,
    pub sensing_threshold_dbm: Option<f64>,
    pub noise_power_dbm: Option<f64>,
    pub packet_size_bytes: Option<u32>,
    pub delta_db: Option<f64>,
    pub bler_table: Option<PathBuf>,
    pub floor_common_at_candidates: Option<bool>,
}

/// A fully resolved run description.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub scenarios: Vec<ScenarioKey>,
    pub seeds: Vec<u64>,
    pub overrides: ChannelOverrides,
    pub sim: SimParams,
    /// Spacing of the analytic curve grid, meters. The grid runs from 0 to
    /// `sim.max_distance_m`.
    pub distance_step_m: f64,
    pub out_dir: PathBuf,
}

impl Default for RunManifest {
    /// The six highway scenarios at 10 Hz on 4 sub-channels, three seeds.
    fn default() -> Self {
        Self::from_matrix(&[0.1, 0.2, 0.3], &[20.0, 23.0], &[10], &[4])
    }
}

impl RunManifest {
    pub const DEFAULT_DISTANCE_STEP_M: f64 = 10.0;
    pub const DEFAULT_SEEDS: [u64; 3] = [1, 2, 3];

    /// Cartesian product in the order λ, S, P_t, β (β varies fastest).
    pub fn from_matrix(betas: &[f64], powers: &[f64], lambdas: &[u32], subchannels: &[u32]) -> Self {
        let mut scenarios = Vec::new();
        for &lambda_hz in lambdas {
            for &s in subchannels {
                for &p in powers {
                    for &beta in betas {
                        scenarios.push(ScenarioKey { beta, tx_power_dbm: p, lambda_hz, subchannels: s });
                    }
                }
            }
        }
        Self {
            scenarios,
            seeds: Self::DEFAULT_SEEDS.to_vec(),
            overrides: ChannelOverrides::default(),
            sim: SimParams::default(),
            distance_step_m: Self::DEFAULT_DISTANCE_STEP_M,
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ManifestFile = toml::from_str(text)?;
        let list = |v: Option<OneOrMany<f64>>, d: &[f64]| v.map(OneOrMany::into_vec).unwrap_or_else(|| d.to_vec());
        let ulist = |v: Option<OneOrMany<u32>>, d: &[u32]| v.map(OneOrMany::into_vec).unwrap_or_else(|| d.to_vec());
        let mut m = Self::from_matrix(
            &list(file.beta, &[0.1, 0.2, 0.3]),
            &list(file.tx_power_dbm, &[20.0, 23.0]),
            &ulist(file.lambda_hz, &[10]),
            &ulist(file.subchannels, &[4]),
        );
        if let Some(seeds) = file.seeds {
            m.seeds = seeds.into_vec();
        }
        m.overrides = ChannelOverrides {
            sigma_db: file.sigma_db,
            pathloss_intercept_db: file.pathloss_intercept_db,
            pathloss_slope_db: file.pathloss_slope_db,
            sensing_threshold_dbm: file.sensing_threshold_dbm,
            noise_power_dbm: file.noise_power_dbm,
            packet_size_bytes: file.packet_size_bytes,
            delta_db: file.delta_db,
            bler_table: file.bler_table,
            floor_common_at_candidates: file.floor_common_at_candidates,
        };
        m.sim = file.simulation;
        if let Some(step) = file.distance_step_m {
            m.distance_step_m = step;
        }
        if let Some(dir) = file.out_dir {
            m.out_dir = dir;
        }
        m.validate()?;
        Ok(m)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut m = Self::from_toml_str(&text)?;
        // relative BLER paths are relative to the manifest
        if let (Some(bler), Some(dir)) = (&m.overrides.bler_table, path.parent()) {
            if bler.is_relative() {
                m.overrides.bler_table = Some(dir.join(bler));
            }
        }
        Ok(m)
    }

    /// Checks run-level settings. Scenario-level problems are reported per
    /// scenario when the scenario is resolved.
    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        if !(self.distance_step_m.is_finite() && self.distance_step_m > 0.0) {
            return Err(config_err("distance step must be positive"));
        }
        if self.distance_step_m > self.sim.max_distance_m {
            return Err(config_err("distance step exceeds the maximum distance"));
        }
        Ok(())
    }

    /// Seeds for a simulation run; an empty list is a usage error.
    pub fn sim_seeds(&self) -> Result<&[u64]> {
        if self.seeds.is_empty() {
            return Err(Error::Usage("simulation runs need at least one seed".into()));
        }
        Ok(&self.seeds)
    }

    /// Analytic evaluation grid: `0, step, 2·step, ..` up to the maximum distance.
    pub fn distance_grid(&self) -> Vec<f64> {
        let n = (self.sim.max_distance_m / self.distance_step_m + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * self.distance_step_m).collect()
    }

    /// Builds the full configuration of one scenario.
    pub fn resolve(&self, key: &ScenarioKey) -> Result<ScenarioConfig> {
        let o = &self.overrides;
        let mut cfg = ScenarioConfig::new(key.beta, key.tx_power_dbm, key.lambda_hz, key.subchannels)?;
        if let Some(s) = o.sigma_db {
            cfg.shadowing = ShadowingModel::new(s)?;
        }
        if o.pathloss_intercept_db.is_some() || o.pathloss_slope_db.is_some() {
            let d = PathlossModel::default();
            cfg.pathloss = PathlossModel::new(
                o.pathloss_intercept_db.unwrap_or(d.reference_loss_db),
                o.pathloss_slope_db.unwrap_or(d.exponent_coeff),
                d.min_distance_m,
            )?;
        }
        if let Some(t) = o.sensing_threshold_dbm {
            cfg.radio.sensing_threshold_dbm = t;
        }
        if let Some(n) = o.noise_power_dbm {
            cfg.radio.noise_power_dbm = n;
        }
        if let Some(b) = o.packet_size_bytes {
            cfg.packet_size_bytes = b;
        }
        if let Some(d) = o.delta_db {
            cfg.delta_db = d;
        }
        if let Some(path) = &o.bler_table {
            cfg.bler = BlerTable::from_csv_path(path, default_mcs_for_subchannels(key.subchannels))?;
        }
        if let Some(f) = o.floor_common_at_candidates {
            cfg.floor_common_at_candidates = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
