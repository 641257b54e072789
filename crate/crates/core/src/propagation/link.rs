//! Per-link loss probabilities: sensing ratio, sensing loss, propagation
//! loss and the interference-conditional loss used by the collision model.

use serde::{Deserialize, Serialize};

use super::bler::BlerTable;
use super::pathloss::{dbm_to_mw, mw_to_dbm, PathlossModel, RadioConfig, ShadowingModel};
use super::quadrature::{gaussian_pdf, gaussian_upper_tail, simpson, truncated_expectation, IntegrationGrid};

/// Below this residual probability a conditioning event is treated as empty.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// Radio parameters plus the large-scale channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub radio: RadioConfig,
    pub pathloss: PathlossModel,
    pub shadowing: ShadowingModel,
}

impl Channel {
    pub fn new(radio: RadioConfig, pathloss: PathlossModel, shadowing: ShadowingModel) -> Self {
        Self { radio, pathloss, shadowing }
    }

    /// Mean received power at `d` meters, dBm.
    #[inline]
    pub fn mean_rx_dbm(&self, d: f64) -> f64 {
        self.radio.tx_power_dbm - self.pathloss.loss_db(d)
    }

    /// Probability that a packet from `d` meters arrives above `threshold_dbm`.
    #[inline]
    pub fn psr_at_threshold(&self, d: f64, threshold_dbm: f64) -> f64 {
        gaussian_upper_tail(threshold_dbm, self.mean_rx_dbm(d), self.shadowing.sigma_db)
    }

    /// Packet sensing ratio at `d` meters.
    #[inline]
    pub fn psr(&self, d: f64) -> f64 {
        self.psr_at_threshold(d, self.radio.sensing_threshold_dbm)
    }

    /// Probability that the received power falls at or below the sensing threshold.
    #[inline]
    pub fn delta_sen(&self, d: f64) -> f64 {
        1.0 - self.psr(d)
    }
}

pub fn psr(d: f64, radio: &RadioConfig, pl: &PathlossModel, sh: &ShadowingModel) -> f64 {
    Channel::new(*radio, *pl, *sh).psr(d)
}

pub fn delta_sen(d: f64, radio: &RadioConfig, pl: &PathlossModel, sh: &ShadowingModel) -> f64 {
    Channel::new(*radio, *pl, *sh).delta_sen(d)
}

/// How the SINR density behind the interference loss is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SinrDensity {
    /// Numerical convolution of the signal and interference power densities,
    /// with interference added to the noise floor in linear power and the
    /// signal conditioned on being above the sensing threshold.
    #[default]
    Numerical,
    /// Closed-form Gaussian for the dB difference `P_r - P_i` (variance
    /// 2σ²). Ignores the noise floor and the sensing truncation, so it is
    /// only accurate when the link is interference-limited.
    GaussianSir,
}

/// Channel plus PHY abstraction: everything needed to evaluate link losses.
#[derive(Debug, Clone)]
pub struct LinkModel {
    pub channel: Channel,
    pub bler: BlerTable,
    pub grid: IntegrationGrid,
    pub sinr_density: SinrDensity,
}

impl LinkModel {
    pub fn new(channel: Channel, bler: BlerTable, grid: IntegrationGrid) -> Self {
        Self { channel, bler, grid, sinr_density: SinrDensity::default() }
    }

    pub fn with_sinr_density(mut self, mode: SinrDensity) -> Self {
        self.sinr_density = mode;
        self
    }

    fn sigma(&self) -> f64 {
        self.channel.shadowing.sigma_db
    }

    /// True when practically no packet from `d` is received above the sensing threshold.
    pub fn is_sensing_dominated(&self, d: f64) -> bool {
        self.channel.delta_sen(d) >= 1.0 - DEGENERATE_EPS
    }

    /// Loss probability due to low SNR among packets received above the
    /// sensing threshold. Sensing-dominated distances return 0.
    pub fn delta_pro(&self, d: f64) -> f64 {
        if self.is_sensing_dominated(d) {
            return 0.0;
        }
        let radio = &self.channel.radio;
        let mean_snr = self.channel.mean_rx_dbm(d) - radio.noise_power_dbm;
        let min_snr = radio.sensing_threshold_dbm - radio.noise_power_dbm;
        truncated_expectation(mean_snr, self.sigma(), min_snr, &self.grid, |s| self.bler.bler(s))
            .map_or(0.0, |v| v.clamp(0.0, 1.0))
    }

    /// Interference evaluator for a fixed transmitter-receiver distance.
    pub fn interference_kernel(&self, d_tr: f64) -> InterferenceKernel<'_> {
        InterferenceKernel::new(self, d_tr)
    }

    /// Probability that a single co-resource interferer at `d_ir` from the
    /// receiver destroys a packet that would have survived propagation alone.
    pub fn p_int(&self, d_tr: f64, d_ir: f64) -> f64 {
        self.interference_kernel(d_tr).p_int(d_ir)
    }
}

const KERNEL_STEP_DB: f64 = 0.05;
/// Interference this far under the noise floor cannot move the effective floor.
const NEGLIGIBLE_INTERFERENCE_DB: f64 = 60.0;

/// Interference evaluator for one transmitter-receiver distance.
///
/// With `G(X) = E[BL(P_r - X) | P_r > P_SEN]` for an effective noise floor
/// `X = 10·log10(I + N0)`, the loss with one interferer of mean power `m` is
/// the Gaussian smoothing of `G(X(q))` around `m`. Both are tabulated on a
/// common 0.05 dB lattice, so each interferer costs one interpolation.
#[derive(Debug, Clone)]
pub struct InterferenceKernel<'a> {
    link: &'a LinkModel,
    d_tr: f64,
    delta_pro: f64,
    degenerate: bool,
    /// Lowest tabulated mean interference power, dBm.
    m0: f64,
    /// `p_SINR` at mean interference power `m0 + k·step`.
    table: Vec<f64>,
}

impl<'a> InterferenceKernel<'a> {
    fn new(link: &'a LinkModel, d_tr: f64) -> Self {
        let ch = &link.channel;
        let radio = &ch.radio;
        let sigma = link.sigma();
        let mut kernel = Self {
            link,
            d_tr,
            delta_pro: 0.0,
            degenerate: true,
            m0: 0.0,
            table: Vec::new(),
        };
        if link.is_sensing_dominated(d_tr) || link.sinr_density == SinrDensity::GaussianSir {
            kernel.degenerate = link.is_sensing_dominated(d_tr);
            kernel.delta_pro = link.delta_pro(d_tr);
            return kernel;
        }

        let span = link.grid.span_sigmas * sigma;
        let h = KERNEL_STEP_DB;
        let mean_rx = ch.mean_rx_dbm(d_tr);
        let noise_mw = radio.noise_mw();
        let first_knot = link.bler.points().next().map_or(f64::NEG_INFINITY, |p| p.0);
        let hi = mean_rx + span;
        let g = |x: f64| {
            if hi - x < first_knot {
                return 1.0;
            }
            truncated_expectation(mean_rx, sigma, radio.sensing_threshold_dbm, &link.grid, |p| link.bler.bler(p - x))
                .unwrap_or(0.0)
                .clamp(0.0, 1.0)
        };

        // G on the effective-floor lattice, saturating once BLER is 1 everywhere
        let x0 = radio.noise_power_dbm;
        let strongest = ch.mean_rx_dbm(0.0);
        let x_max = mw_to_dbm(dbm_to_mw(strongest + span) + noise_mw);
        let nx = ((x_max - x0) / h).ceil() as usize + 2;
        let mut g_tab = Vec::with_capacity(nx);
        for k in 0..nx {
            let x = x0 + k as f64 * h;
            if g_tab.last() == Some(&1.0) && hi - x < first_knot {
                g_tab.push(1.0);
            } else {
                g_tab.push(g(x));
            }
        }
        let g_at = |x: f64| {
            let pos = ((x - x0) / h).max(0.0);
            let i = pos as usize;
            if i + 1 >= g_tab.len() {
                return g_tab[g_tab.len() - 1];
            }
            let t = pos - i as f64;
            g_tab[i] + t * (g_tab[i + 1] - g_tab[i])
        };

        // smoothing weights over ±span, Simpson-weighted and renormalised
        let half = (span / h).ceil() as usize;
        let half = half + half % 2;
        let mut w: Vec<f64> = (0..=2 * half)
            .map(|j| {
                let coeff = if j == 0 || j == 2 * half { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
                coeff * gaussian_pdf((j as f64 - half as f64) * h, 0.0, sigma)
            })
            .collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);

        let m0 = x0 - NEGLIGIBLE_INTERFERENCE_DB - span;
        let nm = ((strongest - m0) / h).ceil() as usize + 2;
        let q0 = m0 - half as f64 * h;
        let floor: Vec<f64> = (0..nm + 2 * half)
            .map(|j| g_at(mw_to_dbm(dbm_to_mw(q0 + j as f64 * h) + noise_mw)))
            .collect();
        let table = (0..nm)
            .map(|k| floor[k..k + w.len()].iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().clamp(0.0, 1.0))
            .collect();

        kernel.degenerate = false;
        kernel.delta_pro = g_tab[0];
        kernel.m0 = m0;
        kernel.table = table;
        kernel
    }

    pub fn d_tr(&self) -> f64 {
        self.d_tr
    }

    /// Propagation-only loss at this distance, consistent with [`Self::p_sinr`].
    pub fn delta_pro(&self) -> f64 {
        self.delta_pro
    }

    /// Loss probability with one interferer at `d_ir`, including the packets
    /// that propagation alone would already have destroyed.
    pub fn p_sinr(&self, d_ir: f64) -> f64 {
        if self.degenerate {
            return 0.0;
        }
        let link = self.link;
        let ch = &link.channel;
        match link.sinr_density {
            SinrDensity::Numerical => {
                let pos = (ch.mean_rx_dbm(d_ir) - self.m0) / KERNEL_STEP_DB;
                if pos <= 0.0 {
                    return self.delta_pro;
                }
                let i = pos as usize;
                if i + 1 >= self.table.len() {
                    return self.table[self.table.len() - 1];
                }
                let t = pos - i as f64;
                self.table[i] + t * (self.table[i + 1] - self.table[i])
            }
            SinrDensity::GaussianSir => {
                let sigma = link.sigma();
                let mean = ch.pathloss.loss_db(d_ir) - ch.pathloss.loss_db(self.d_tr);
                let s = std::f64::consts::SQRT_2 * sigma;
                let span = link.grid.span_sigmas * s;
                let v = simpson(mean - span, mean + span, link.grid.step_db, |x| {
                    link.bler.bler(x) * gaussian_pdf(x, mean, s)
                });
                v.clamp(0.0, 1.0)
            }
        }
    }

    /// `(p_SINR - δ_PRO) / (1 - δ_PRO)`, clamped to [0, 1].
    pub fn p_int(&self, d_ir: f64) -> f64 {
        if self.degenerate || self.delta_pro >= 1.0 - DEGENERATE_EPS {
            return 0.0;
        }
        ((self.p_sinr(d_ir) - self.delta_pro) / (1.0 - self.delta_pro)).clamp(0.0, 1.0)
    }
}
