use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::SUBFRAMES_PER_SECOND;

/// Run-level settings that are not part of the scenario itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    /// Ring highway circumference, meters.
    pub length_m: f64,
    /// Total simulated time including warmup, seconds.
    pub duration_s: f64,
    pub warmup_s: f64,
    pub bin_width_m: f64,
    /// Receptions farther than this are simulated but not counted.
    pub max_distance_m: f64,
    /// Initial RSRP exclusion threshold for Step 2, dBm.
    pub rsrp_threshold_dbm: f64,
    /// Threshold increment when Step 2 leaves too few resources, dB.
    pub rsrp_step_db: f64,
    /// Busy threshold for CBR measurement; `None` uses the sensing threshold.
    pub cbr_threshold_dbm: Option<f64>,
    /// Trailing window of the CBR measurement, sub-frames.
    pub cbr_window: u32,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            length_m: 2000.0,
            duration_s: 23.0,
            warmup_s: 3.0,
            bin_width_m: 25.0,
            max_distance_m: 1000.0,
            rsrp_threshold_dbm: -110.0,
            rsrp_step_db: 3.0,
            cbr_threshold_dbm: None,
            cbr_window: 100,
        }
    }
}

/// A simulation needs at least this many vehicles to produce useful statistics.
pub const MIN_VEHICLES: usize = 50;

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_m.is_finite() && self.length_m > 0.0) {
            return Err(config_err("ring length must be positive"));
        }
        if !(self.warmup_s >= 0.0 && self.duration_s.is_finite() && self.duration_s > self.warmup_s) {
            return Err(config_err(format!(
                "duration {} s must exceed the warmup of {} s",
                self.duration_s, self.warmup_s
            )));
        }
        if !(self.bin_width_m > 0.0 && self.max_distance_m >= self.bin_width_m) {
            return Err(config_err("bin width must be positive and no larger than the maximum distance"));
        }
        if !(self.rsrp_step_db > 0.0) {
            return Err(config_err("RSRP threshold step must be positive"));
        }
        if self.cbr_window == 0 || self.cbr_window > SUBFRAMES_PER_SECOND {
            return Err(config_err("CBR window must be between 1 and 1000 sub-frames"));
        }
        Ok(())
    }

    pub fn total_subframes(&self) -> u32 {
        (self.duration_s * SUBFRAMES_PER_SECOND as f64).round() as u32
    }

    pub fn warmup_subframes(&self) -> u32 {
        (self.warmup_s * SUBFRAMES_PER_SECOND as f64).round() as u32
    }

    pub fn bin_count(&self) -> usize {
        (self.max_distance_m / self.bin_width_m).ceil() as usize
    }
}
