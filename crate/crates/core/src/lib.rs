//! Analytical packet delivery model for LTE-V2X (C-V2X) Mode 4 sidelink
//! communications, together with a sub-frame level simulator of the
//! sensing-based Semi-Persistent Scheduling (SPS) MAC used to validate it.
//!
//! The crate is organised in four layers:
//!
//! - [`propagation`]: log-distance pathloss with log-normal shadowing, the
//!   BLER look-up abstraction of the PHY, and the per-link loss
//!   probabilities (sensing, propagation, interference).
//! - [`analytic`]: the PDR-vs-distance model and its four-way error
//!   decomposition (half-duplex, sensing, propagation, collision).
//! - [`simulator`]: a deterministic discrete-event simulator of SPS on a
//!   ring highway producing the same decomposition from sampled events.
//! - [`harness`]: manifests, scenario sweeps, CSV output and the MAD
//!   comparison between the two.

pub mod analytic;
pub mod error;
pub mod harness;
pub mod propagation;
pub mod simulator;

pub use error::{Error, Result};

/// Sub-frames per second on the LTE sidelink (1 ms TTI).
pub const SUBFRAMES_PER_SECOND: u32 = 1000;
