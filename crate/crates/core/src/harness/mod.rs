//! Scenario manifests, batch runs and the model-vs-simulator comparison.
//!
//! A [`RunManifest`] is a small TOML file whose scenario keys (`beta`,
//! `tx_power_dbm`, `lambda_hz`, `subchannels`) take a scalar or an array;
//! the scenario matrix is their cartesian product. Outputs are CSV files
//! written atomically under the manifest's output directory, with one
//! file per scenario so a failing scenario never blocks the others.

mod manifest;
mod run;

pub use manifest::{ChannelOverrides, RunManifest, ScenarioKey};
pub use run::{
    analytic_csv, compare_scenario, comparison_csv, curve_mad, mad, run_analytic, run_compare, run_simulate,
    sim_csv, sim_curve, simulate_scenario, sweep, write_atomic, ComparisonReport, CurveMad, CurvePoint, ReportRow,
    RunSummary, ScenarioComparison, ABOVE_RECOMMENDED_CBR, RECOMMENDED_MAX_CBR,
};
