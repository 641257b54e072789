//! Resource accounting: how many resources each vehicle excludes, and how
//! many of its candidates it expects to share with another vehicle.

use super::config::ScenarioConfig;
use crate::error::{config_err, Error, Result};
use crate::SUBFRAMES_PER_SECOND;

/// Sensing sums stop once the sensing ratio drops below this.
pub const PSR_CUTOFF: f64 = 1e-6;
/// Hard stop for sensing sums, meters. Only reached by pathological configs.
pub const MAX_SENSING_RANGE_M: u32 = 200_000;
/// Step-3 threshold raising gives up beyond this many dB.
pub const MAX_THRESHOLD_RAISE_DB: f64 = 60.0;
/// Share of the selection window that Step 3 must leave available.
pub const CANDIDATE_FRACTION: f64 = 0.2;

/// Per-vehicle resource totals for one selection step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceCounts {
    pub n_total: u32,
    pub n_excluded: f64,
    pub n_assignable: f64,
    pub n_candidate: u32,
    /// Mean reselection counter.
    pub tau: f64,
}

impl ResourceCounts {
    /// Same counts with a step-specific number of excluded resources.
    pub fn with_excluded(&self, n_excluded: f64) -> Self {
        let n = self.n_total as f64;
        let n_excluded = n_excluded.clamp(0.0, n);
        Self { n_excluded, n_assignable: n - n_excluded, ..*self }
    }
}

pub fn delta_hd(lambda_hz: f64) -> Result<f64> {
    if !(1.0..=SUBFRAMES_PER_SECOND as f64).contains(&lambda_hz) {
        return Err(config_err(format!("λ = {lambda_hz} Hz outside [1, 1000]")));
    }
    Ok(lambda_hz / SUBFRAMES_PER_SECOND as f64)
}

/// Totals before any exclusion (`n_excluded` = 0).
pub fn resource_counts(cfg: &ScenarioConfig) -> Result<ResourceCounts> {
    let per_second = SUBFRAMES_PER_SECOND * cfg.subchannels;
    if cfg.lambda_hz == 0 || !per_second.is_multiple_of(cfg.lambda_hz) {
        return Err(config_err(format!(
            "{} sub-channels at {} Hz do not give a whole number of resources per period",
            cfg.subchannels, cfg.lambda_hz
        )));
    }
    let n_total = per_second / cfg.lambda_hz;
    Ok(ResourceCounts {
        n_total,
        n_excluded: 0.0,
        n_assignable: n_total as f64,
        n_candidate: (CANDIDATE_FRACTION * n_total as f64).round() as u32,
        tau: (cfg.resel_min + cfg.resel_max) as f64 / 2.0,
    })
}

/// Largest integer distance that still matters for sensing sums.
pub fn sensing_extent(psr: impl Fn(f64) -> f64) -> u32 {
    let mut d = 0;
    while d < MAX_SENSING_RANGE_M && psr(d as f64) >= PSR_CUTOFF {
        d += 1;
    }
    d
}

/// Expected number of vehicles sensed at density `beta`, as a 1 m Riemann
/// sum of the sensing ratio over both directions.
pub fn s_psr(beta: f64, psr: impl Fn(f64) -> f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..MAX_SENSING_RANGE_M {
        let p = psr(i as f64);
        if p < PSR_CUTOFF {
            break;
        }
        sum += if i == 0 { p } else { 2.0 * p };
    }
    beta * sum
}

/// Expected number of resources excluded by Step 2 when `s_psr` vehicles
/// are sensed out of `n_total` resources.
pub fn n_excluded_step2(s_psr: f64, n_total: f64) -> f64 {
    if s_psr <= 0.0 {
        return 0.0;
    }
    let half = s_psr / 2.0;
    let denom = n_total - half;
    if denom <= 0.0 {
        return n_total;
    }
    let terms = half.round() as u64;
    let mut sum = half;
    for k in 1..=terms {
        let v = 1.0 - k as f64 / denom;
        if v <= 0.0 {
            break;
        }
        sum += v;
    }
    sum.clamp(0.0, n_total)
}

/// Outcome of the Step-3 threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step3Exclusion {
    pub n_excluded: f64,
    /// Number of threshold increments applied.
    pub raises: u32,
}

/// Step-3 exclusion for an arbitrary family of sensing ratios;
/// `psr_raised(extra_db, d)` is the ratio at `d` with the threshold lifted by `extra_db`.
pub fn step3_search(
    beta: f64,
    delta_db: f64,
    n_total: f64,
    psr_raised: impl Fn(f64, f64) -> f64,
) -> Result<Step3Exclusion> {
    if !(delta_db > 0.0) {
        return Err(config_err("Step-3 threshold increment must be > 0 dB"));
    }
    let limit = CANDIDATE_FRACTION.mul_add(-n_total, n_total);
    let mut raises = 0u32;
    loop {
        let extra = raises as f64 * delta_db;
        if extra > MAX_THRESHOLD_RAISE_DB {
            return Err(Error::Model("step-3 threshold search diverged".into()));
        }
        let sensed = s_psr(2.0 * beta, |d| psr_raised(extra, d));
        let n_excluded = n_excluded_step2(sensed, n_total);
        if n_excluded <= limit {
            return Ok(Step3Exclusion { n_excluded, raises });
        }
        raises += 1;
    }
}

pub fn n_excluded_step3(cfg: &ScenarioConfig, n_total: u32) -> Result<(f64, u32)> {
    let ch = cfg.channel();
    let threshold = cfg.radio.sensing_threshold_dbm;
    let r = step3_search(cfg.beta, cfg.delta_db, n_total as f64, |extra, d| {
        ch.psr_at_threshold(d, threshold + extra)
    })?;
    Ok((r.n_excluded, r.raises))
}

/// Zero-lag-normalised overlap of two vehicles' sensing regions when they
/// are `d` meters apart: `Σ_x PSR(|x + d|)·PSR(|x|)` over integer `x`.
/// `extent` bounds the support (see [`sensing_extent`]).
pub fn autocorrelation(d: f64, extent: u32, psr: impl Fn(f64) -> f64) -> f64 {
    let d = d.abs();
    if d > 2.0 * extent as f64 + 1.0 {
        return 0.0;
    }
    let e = extent as i64;
    let mut sum = 0.0;
    for x in -e..=e {
        let a = psr((x as f64).abs());
        if a == 0.0 {
            continue;
        }
        sum += a * psr((x as f64 + d).abs());
    }
    sum
}

/// Expected overlap between the resource sets of two vehicles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonResources {
    pub c_excluded: f64,
    pub c_assignable: f64,
    pub c_candidate: f64,
}

/// Shared resources of two vehicles whose sensing overlap is `r_ratio`
/// (autocorrelation at their separation over the zero-lag value).
/// `joint_sensed` is the expected number of vehicles both sense when co-located.
/// With `floor_at_candidates` the common assignable count is kept at or
/// above the candidate count.
pub fn common_resources(
    counts: &ResourceCounts,
    r_ratio: f64,
    joint_sensed: f64,
    s_psr: f64,
    floor_at_candidates: bool,
) -> CommonResources {
    let n = counts.n_total as f64;
    let n_e = counts.n_excluded;
    let n_a = counts.n_assignable;
    let n_c = counts.n_candidate as f64;
    let c_e = if n_e <= 0.0 || s_psr <= 0.0 || n <= 0.0 {
        0.0
    } else {
        let far = n_e * n_e / n;
        let near = n_e * joint_sensed / s_psr;
        (r_ratio * (near - far) + far).clamp(0.0, n_e)
    };
    let floor = if floor_at_candidates { n_c.min(n_a) } else { 0.0 };
    let c_a = (n - 2.0 * n_e + c_e).clamp(floor, n_a);
    let c_c = if n_a > 0.0 { (c_a * (n_c / n_a).powi(2)).min(n_c) } else { 0.0 };
    CommonResources { c_excluded: c_e, c_assignable: c_a, c_candidate: c_c }
}

/// Probability that a vehicle at `psr_value` sensing ratio has not yet
/// learned of the other's reservation when it reselects.
pub fn p_s(tau: f64, psr_value: f64) -> f64 {
    1.0 - (1.0 - 1.0 / tau) * psr_value
}
