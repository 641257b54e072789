//! Semi-analytical PDR model of sensing-based semi-persistent scheduling.
//!
//! [`AnalyticModel`] precomputes the distance-independent parts of a
//! scenario (sensed-vehicle counts, exclusion estimates, CBR and the
//! per-distance same-resource probabilities) and then evaluates the
//! four loss probabilities at any transmitter-receiver distance.

mod config;
mod model;
mod pdr;
mod resources;

pub use config::{default_mcs_for_subchannels, standard_reselection_bounds, AlphaCurve, ScenarioConfig};
pub use model::{
    delta_col, p_sim, pdr_curve, AnalyticModel, SelectionStep, COLLISION_TERM_CUTOFF, MAX_INTERFERER_RANGE_M,
};
pub use pdr::{combine_interferers, PdrBreakdown};
pub use resources::{
    autocorrelation, common_resources, delta_hd, n_excluded_step2, n_excluded_step3, p_s, resource_counts,
    s_psr, sensing_extent, step3_search, CommonResources, ResourceCounts, Step3Exclusion, CANDIDATE_FRACTION,
    MAX_THRESHOLD_RAISE_DB, PSR_CUTOFF,
};
