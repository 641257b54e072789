use crate::error::{config_err, Result};
use crate::propagation::{
    BlerTable, Channel, IntegrationGrid, LinkModel, McsId, PathlossModel, RadioConfig, ShadowingModel,
    SinrDensity,
};
use crate::SUBFRAMES_PER_SECOND;

/// Reselection-counter bounds mandated for each standard transmission rate.
pub fn standard_reselection_bounds(lambda_hz: u32) -> Option<(u32, u32)> {
    match lambda_hz {
        10 => Some((5, 15)),
        20 => Some((10, 30)),
        50 => Some((25, 75)),
        _ => None,
    }
}

/// MCS used for a 190-byte packet in the given number of sub-channels.
pub fn default_mcs_for_subchannels(subchannels: u32) -> Option<McsId> {
    match subchannels {
        2 => Some(7),
        4 => Some(9),
        _ => None,
    }
}

/// Piecewise-linear weighting of the Step-2 collision estimate against the
/// Step-3 one, as a function of CBR. Clamped to the end knots.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCurve {
    knots: Vec<(f64, f64)>,
}

impl AlphaCurve {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(config_err("alpha curve needs at least one knot"));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(config_err("alpha curve CBR knots must be strictly increasing"));
            }
        }
        if knots.iter().any(|&(x, y)| !x.is_finite() || !(0.0..=1.0).contains(&y)) {
            return Err(config_err("alpha curve values must lie in [0, 1]"));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, cbr: f64) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if cbr <= first.0 {
            return first.1;
        }
        if cbr >= last.0 {
            return last.1;
        }
        let i = self.knots.partition_point(|k| k.0 <= cbr) - 1;
        let (x0, y0) = self.knots[i];
        let (x1, y1) = self.knots[i + 1];
        if cbr == x0 {
            return y0;
        }
        y0 + (cbr - x0) * (y1 - y0) / (x1 - x0)
    }
}

impl Default for AlphaCurve {
    /// 0 below CBR 0.2, 1 above 0.7, linear (2·CBR − 0.4) in between.
    fn default() -> Self {
        Self { knots: vec![(0.2, 0.0), (0.7, 1.0)] }
    }
}

/// Every input of one evaluated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    /// Vehicle density, vehicles per meter.
    pub beta: f64,
    /// Packets per second per vehicle.
    pub lambda_hz: u32,
    /// Sub-channels per sub-frame (one packet per sub-channel group).
    pub subchannels: u32,
    pub packet_size_bytes: u32,
    pub radio: RadioConfig,
    pub pathloss: PathlossModel,
    pub shadowing: ShadowingModel,
    pub bler: BlerTable,
    /// Threshold increment used when Step 3 has to readmit resources, dB.
    pub delta_db: f64,
    pub resel_min: u32,
    pub resel_max: u32,
    pub alpha: AlphaCurve,
    pub sinr_density: SinrDensity,
    pub grid: IntegrationGrid,
    /// Never let two vehicles share fewer assignable resources than the
    /// candidate count. Off by default: it inflates the same-resource
    /// probability of distant vehicles above 1/N under heavy load.
    pub floor_common_at_candidates: bool,
}

impl ScenarioConfig {
    pub const DEFAULT_PACKET_SIZE_BYTES: u32 = 190;
    pub const DEFAULT_DELTA_DB: f64 = 0.5;

    /// Highway scenario with standard defaults for everything but the
    /// swept parameters.
    pub fn new(beta: f64, tx_power_dbm: f64, lambda_hz: u32, subchannels: u32) -> Result<Self> {
        let (resel_min, resel_max) = standard_reselection_bounds(lambda_hz)
            .ok_or_else(|| config_err(format!("λ = {lambda_hz} Hz is not a standard rate (10, 20 or 50)")))?;
        let mcs = default_mcs_for_subchannels(subchannels).ok_or_else(|| {
            config_err(format!("no default MCS for {subchannels} sub-channels; set the BLER table explicitly"))
        })?;
        let cfg = Self {
            beta,
            lambda_hz,
            subchannels,
            packet_size_bytes: Self::DEFAULT_PACKET_SIZE_BYTES,
            radio: RadioConfig::with_tx_power(tx_power_dbm)?,
            pathloss: PathlossModel::default(),
            shadowing: ShadowingModel::default(),
            bler: BlerTable::synthetic(mcs)?,
            delta_db: Self::DEFAULT_DELTA_DB,
            resel_min,
            resel_max,
            alpha: AlphaCurve::default(),
            sinr_density: SinrDensity::default(),
            grid: IntegrationGrid::default(),
            floor_common_at_candidates: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(config_err(format!("traffic density β = {} must be > 0", self.beta)));
        }
        let (lo, hi) = standard_reselection_bounds(self.lambda_hz)
            .ok_or_else(|| config_err(format!("λ = {} Hz is not a standard rate (10, 20 or 50)", self.lambda_hz)))?;
        if (self.resel_min, self.resel_max) != (lo, hi) {
            return Err(config_err(format!(
                "reselection counter bounds ({}, {}) do not match the standard ({lo}, {hi}) for λ = {} Hz",
                self.resel_min, self.resel_max, self.lambda_hz
            )));
        }
        if self.subchannels == 0 {
            return Err(config_err("at least one sub-channel per sub-frame is required"));
        }
        if self.packet_size_bytes == 0 {
            return Err(config_err("packet size must be positive"));
        }
        if !(self.delta_db.is_finite() && self.delta_db > 0.0) {
            return Err(config_err("Step-3 threshold increment must be > 0 dB"));
        }
        if !(self.grid.step_db > 0.0 && self.grid.span_sigmas > 0.0) {
            return Err(config_err("integration grid step and span must be positive"));
        }
        self.radio.validate()?;
        self.pathloss.validate()?;
        self.shadowing.validate()?;
        Ok(())
    }

    /// Semi-persistent reservation period in sub-frames (1000 / λ).
    pub fn period_subframes(&self) -> u32 {
        SUBFRAMES_PER_SECOND / self.lambda_hz
    }

    pub fn channel(&self) -> Channel {
        Channel::new(self.radio, self.pathloss, self.shadowing)
    }

    pub fn link_model(&self) -> LinkModel {
        LinkModel::new(self.channel(), self.bler.clone(), self.grid).with_sinr_density(self.sinr_density)
    }
}
