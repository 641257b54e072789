//! Channel abstraction: log-distance pathloss, log-normal shadowing, the
//! BLER look-up PHY model and the link-loss probabilities built on them.
//!
//! All functions here are pure; a [`LinkModel`] can be shared across threads.

mod bler;
mod link;
mod pathloss;
mod quadrature;

pub use bler::{BlerTable, LogisticBler, McsId};
pub use link::{delta_sen, psr, Channel, InterferenceKernel, LinkModel, SinrDensity, DEGENERATE_EPS};
pub use pathloss::{dbm_to_mw, mw_to_dbm, pathloss, PathlossModel, RadioConfig, ShadowingModel};
pub use quadrature::{gaussian_pdf, gaussian_upper_tail, simpson, truncated_expectation, IntegrationGrid};

/// Propagation loss at `d` among packets received above the sensing threshold.
pub fn delta_pro(
    d: f64,
    radio: &RadioConfig,
    pl: &PathlossModel,
    sh: &ShadowingModel,
    bler: &BlerTable,
    grid: &IntegrationGrid,
) -> f64 {
    LinkModel::new(Channel::new(*radio, *pl, *sh), bler.clone(), *grid).delta_pro(d)
}

/// Loss probability caused by one co-resource interferer at `d_ir` from the
/// receiver, for a transmitter at `d_tr`.
pub fn p_int(d_tr: f64, d_ir: f64, link: &LinkModel) -> f64 {
    link.p_int(d_tr, d_ir)
}
