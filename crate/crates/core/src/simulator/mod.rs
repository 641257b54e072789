//! Sub-frame-level simulator of sensing-based semi-persistent scheduling on
//! a ring highway.
//!
//! Vehicles are static and evenly spaced. Each one generates a packet every
//! reservation period, transmits it on its reserved resource and listens to
//! everybody else. Receptions are classified into OK or one of four loss
//! causes and binned by distance.
//!
//! Randomness comes from one ChaCha stream per vehicle (phases, counters,
//! selections) and one for the channel (shadowing and decoding draws), all
//! derived from a single seed, so a run is reproducible bit for bit.

mod params;
mod rx;
mod sensing;
mod sps;
mod stats;
mod world;

pub use params::{SimParams, MIN_VEHICLES};
pub use rx::{classify_rx, sci_decoded, Outcome, RxSample};
pub use sensing::{SciRecord, SensingMemory, SENSING_HISTORY};
pub use sps::{sps_select, Resource, Selection, SpsContext, CANDIDATE_FRACTION};
pub use stats::{BinCounts, EventSink, NullSink, RxEvent, SimStats, TraceWriter};
pub use world::{build_scenario, run, run_with_sink, VehicleState, World};
