use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Log-distance pathloss `A + B·log10(d)`.
///
/// The shipped default is a single-slope fit of the WINNER+ B1 highway LOS
/// model beyond its breakpoint: the 40 dB/decade slope is taken from that
/// model, while the intercept is an effective value chosen so that the mean
/// sensing range reproduces the channel loads reported for 5.9 GHz highway
/// deployments (about 0.23 at 0.1 veh/m, 20 dBm, 10 Hz, 4 sub-channels).
/// It is an approximation, not the full stochastic B1 geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathlossModel {
    /// Loss at 1 m, dB.
    pub reference_loss_db: f64,
    /// Slope in dB per decade of distance.
    pub exponent_coeff: f64,
    /// Distances below this are clamped, meters.
    pub min_distance_m: f64,
}

impl PathlossModel {
    pub const HIGHWAY_REFERENCE_LOSS_DB: f64 = 3.5;
    pub const HIGHWAY_EXPONENT_COEFF: f64 = 40.0;

    pub fn new(reference_loss_db: f64, exponent_coeff: f64, min_distance_m: f64) -> Result<Self> {
        let model = Self { reference_loss_db, exponent_coeff, min_distance_m };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.reference_loss_db.is_finite() {
            return Err(config_err("pathloss reference loss must be finite"));
        }
        if !(self.exponent_coeff.is_finite() && self.exponent_coeff >= 0.0) {
            return Err(config_err("pathloss exponent coefficient must be finite and >= 0"));
        }
        if !(self.min_distance_m.is_finite() && self.min_distance_m > 0.0) {
            return Err(config_err("pathloss minimum distance must be > 0"));
        }
        Ok(())
    }

    /// Pathloss in dB at `distance_m`; distances below the floor are clamped.
    #[inline]
    pub fn loss_db(&self, distance_m: f64) -> f64 {
        self.reference_loss_db + self.exponent_coeff * distance_m.max(self.min_distance_m).log10()
    }
}

impl Default for PathlossModel {
    fn default() -> Self {
        Self {
            reference_loss_db: Self::HIGHWAY_REFERENCE_LOSS_DB,
            exponent_coeff: Self::HIGHWAY_EXPONENT_COEFF,
            min_distance_m: 1.0,
        }
    }
}

/// Pathloss at `d` meters.
pub fn pathloss(d: f64, model: &PathlossModel) -> f64 {
    model.loss_db(d)
}

/// Zero-mean log-normal shadowing (Gaussian in dB).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowingModel {
    pub sigma_db: f64,
}

impl ShadowingModel {
    pub fn new(sigma_db: f64) -> Result<Self> {
        let model = Self { sigma_db };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_db.is_finite() && self.sigma_db > 0.0) {
            return Err(config_err("shadowing sigma must be > 0 dB"));
        }
        Ok(())
    }
}

impl Default for ShadowingModel {
    fn default() -> Self {
        Self { sigma_db: 3.0 }
    }
}

/// Transmit power, sensing threshold and noise floor, all in dBm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    pub tx_power_dbm: f64,
    pub sensing_threshold_dbm: f64,
    pub noise_power_dbm: f64,
}

impl RadioConfig {
    /// Maximum sidelink UE transmit power.
    pub const MAX_TX_POWER_DBM: f64 = 23.0;
    /// Reference sensitivity of the sidelink receiver.
    pub const DEFAULT_SENSING_THRESHOLD_DBM: f64 = -90.4;
    /// Thermal noise over the ~9 MHz occupied by a 10 MHz channel plus a 9 dB
    /// noise figure: -174 + 10·log10(9e6) + 9 ≈ -95.5, rounded.
    pub const DEFAULT_NOISE_POWER_DBM: f64 = -95.0;

    pub fn new(tx_power_dbm: f64, sensing_threshold_dbm: f64, noise_power_dbm: f64) -> Result<Self> {
        let radio = Self { tx_power_dbm, sensing_threshold_dbm, noise_power_dbm };
        radio.validate()?;
        Ok(radio)
    }

    pub fn with_tx_power(tx_power_dbm: f64) -> Result<Self> {
        Self::new(tx_power_dbm, Self::DEFAULT_SENSING_THRESHOLD_DBM, Self::DEFAULT_NOISE_POWER_DBM)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tx_power_dbm.is_finite() || self.tx_power_dbm > Self::MAX_TX_POWER_DBM {
            return Err(config_err(format!(
                "transmit power {} dBm exceeds the {} dBm sidelink maximum",
                self.tx_power_dbm,
                Self::MAX_TX_POWER_DBM
            )));
        }
        if !self.sensing_threshold_dbm.is_finite() || !self.noise_power_dbm.is_finite() {
            return Err(config_err("sensing threshold and noise power must be finite"));
        }
        Ok(())
    }

    /// Noise power in mW.
    pub fn noise_mw(&self) -> f64 {
        dbm_to_mw(self.noise_power_dbm)
    }
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            tx_power_dbm: 20.0,
            sensing_threshold_dbm: Self::DEFAULT_SENSING_THRESHOLD_DBM,
            noise_power_dbm: Self::DEFAULT_NOISE_POWER_DBM,
        }
    }
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    (dbm * (std::f64::consts::LN_10 / 10.0)).exp()
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}
