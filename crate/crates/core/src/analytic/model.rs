use super::config::ScenarioConfig;
use super::pdr::PdrBreakdown;
use super::resources::{
    autocorrelation, common_resources, delta_hd, n_excluded_step2, n_excluded_step3, p_s, resource_counts, s_psr,
    sensing_extent, CommonResources, ResourceCounts,
};
use crate::error::{config_err, Result};
use crate::propagation::{Channel, LinkModel};

/// Interferer terms below this are dropped once past the receiver.
pub const COLLISION_TERM_CUTOFF: f64 = 1e-9;
/// Interferers are never considered beyond this distance from the receiver.
pub const MAX_INTERFERER_RANGE_M: f64 = 50_000.0;

/// Which selection step an estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStep {
    /// Exclusion of sensed reservations only.
    Exclusion,
    /// Exclusion plus threshold raising to keep 20% of resources available.
    ThresholdRaising,
}

/// One scenario with everything distance-independent precomputed.
///
/// Cheap to query; `Sync`, so distances can be evaluated from several threads.
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    cfg: ScenarioConfig,
    link: LinkModel,
    base: ResourceCounts,
    s_psr: f64,
    n_e_step2: f64,
    n_e_step3: f64,
    step3_raises: u32,
    cbr: f64,
    alpha: f64,
    extent: u32,
    r0: f64,
    /// `p_sim` at interferer index `k` (distance `k/β`), until it settles.
    p_sim_by_index: Vec<f64>,
    p_sim_far: f64,
}

impl AnalyticModel {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let base = resource_counts(cfg)?;
        let link = cfg.link_model();
        let ch = link.channel;
        let psr = |d: f64| ch.psr(d);
        let n = base.n_total as f64;
        let s = s_psr(cfg.beta, psr);
        let n_e_step2 = n_excluded_step2(s, n);
        let (n_e_step3, step3_raises) = n_excluded_step3(cfg, base.n_total)?;
        let cbr = n_e_step2 / n;
        let alpha = cfg.alpha.eval(cbr);
        let extent = sensing_extent(psr);
        let r0 = autocorrelation(0.0, extent, psr);
        let mut model = Self {
            cfg: cfg.clone(),
            link,
            base,
            s_psr: s,
            n_e_step2,
            n_e_step3,
            step3_raises,
            cbr,
            alpha,
            extent,
            r0,
            p_sim_by_index: Vec::new(),
            p_sim_far: 0.0,
        };
        // beyond twice the sensing extent both the overlap and PSR vanish
        let spacing = 1.0 / cfg.beta;
        let last = ((2.0 * extent as f64 + 2.0) / spacing).ceil() as usize;
        model.p_sim_by_index = (0..=last).map(|k| model.p_sim(k as f64 * spacing)).collect();
        model.p_sim_far = model.p_sim(f64::INFINITY);
        Ok(model)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn link(&self) -> &LinkModel {
        &self.link
    }

    pub fn channel(&self) -> &Channel {
        &self.link.channel
    }

    /// Expected number of vehicles sensed by one vehicle.
    pub fn s_psr(&self) -> f64 {
        self.s_psr
    }

    pub fn n_excluded(&self, step: SelectionStep) -> f64 {
        match step {
            SelectionStep::Exclusion => self.n_e_step2,
            SelectionStep::ThresholdRaising => self.n_e_step3,
        }
    }

    pub fn step3_raises(&self) -> u32 {
        self.step3_raises
    }

    pub fn cbr(&self) -> f64 {
        self.cbr
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sensing_extent_m(&self) -> u32 {
        self.extent
    }

    pub fn psr(&self, d: f64) -> f64 {
        self.link.channel.psr(d)
    }

    /// Sensing overlap of two vehicles `d` meters apart.
    pub fn r_psr(&self, d: f64) -> f64 {
        if d == 0.0 {
            return self.r0;
        }
        if !d.is_finite() {
            return 0.0;
        }
        let ch = self.link.channel;
        autocorrelation(d, self.extent, |x| ch.psr(x))
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Resource totals for `step`. Step 2 can never leave fewer than the
    /// candidate share assignable.
    pub fn counts(&self, step: SelectionStep) -> ResourceCounts {
        let n = self.base.n_total as f64;
        match step {
            SelectionStep::Exclusion => {
                self.base.with_excluded(self.n_e_step2.min(n - self.base.n_candidate as f64))
            }
            SelectionStep::ThresholdRaising => self.base.with_excluded(self.n_e_step3),
        }
    }

    fn overlap_ratio(&self, d_ti: f64) -> f64 {
        if self.r0 > 0.0 { (self.r_psr(d_ti) / self.r0).clamp(0.0, 1.0) } else { 0.0 }
    }

    pub fn common_resources(&self, d_ti: f64, step: SelectionStep) -> CommonResources {
        self.common_with_ratio(self.overlap_ratio(d_ti), step)
    }

    fn common_with_ratio(&self, ratio: f64, step: SelectionStep) -> CommonResources {
        common_resources(
            &self.counts(step),
            ratio,
            self.cfg.beta * self.r0,
            self.s_psr,
            self.cfg.floor_common_at_candidates,
        )
    }

    fn p_sim_with_ratio(&self, d_ti: f64, ratio: f64, step: SelectionStep) -> f64 {
        let n_c = self.base.n_candidate as f64;
        if n_c <= 0.0 {
            return 0.0;
        }
        let c = self.common_with_ratio(ratio, step);
        (self.p_s(d_ti) * c.c_candidate / (n_c * n_c)).clamp(0.0, 1.0)
    }

    pub fn p_s(&self, d_ti: f64) -> f64 {
        let psr = if d_ti.is_finite() { self.psr(d_ti) } else { 0.0 };
        p_s(self.base.tau, psr)
    }

    /// Probability of picking the same resource in one selection step.
    pub fn p_sim_step(&self, d_ti: f64, step: SelectionStep) -> f64 {
        self.p_sim_with_ratio(d_ti, self.overlap_ratio(d_ti), step)
    }

    /// Probability that a vehicle `d_ti` meters from the transmitter uses
    /// the same resource at the same time.
    pub fn p_sim(&self, d_ti: f64) -> f64 {
        let ratio = self.overlap_ratio(d_ti);
        let p2 = self.p_sim_with_ratio(d_ti, ratio, SelectionStep::Exclusion);
        let p3 = self.p_sim_with_ratio(d_ti, ratio, SelectionStep::ThresholdRaising);
        self.alpha * p2 + (1.0 - self.alpha) * p3
    }

    fn p_sim_at_index(&self, k: usize) -> f64 {
        self.p_sim_by_index.get(k).copied().unwrap_or(self.p_sim_far)
    }

    fn p_sim_upper_bound(&self) -> f64 {
        self.p_sim_by_index.iter().copied().fold(self.p_sim_far, f64::max)
    }

    pub fn delta_hd(&self) -> f64 {
        // lambda is validated to be a standard rate
        delta_hd(self.cfg.lambda_hz as f64).unwrap_or(1.0)
    }

    /// Collision loss at `d_tr`: interferers sit every `1/β` meters on both
    /// sides of the transmitter, the receiver `d_tr` meters downstream.
    pub fn delta_col(&self, d_tr: f64) -> f64 {
        let kernel = self.link.interference_kernel(d_tr);
        // p_int only falls with distance, so a harmless co-located interferer means no collisions
        if kernel.p_int(0.0) == 0.0 {
            return 0.0;
        }
        let spacing = 1.0 / self.cfg.beta;
        let bound = self.p_sim_upper_bound();
        let mut log_survive = 0.0;
        let mut add = |term: f64| log_survive += (-term.clamp(0.0, 1.0)).ln_1p();

        // upstream of the transmitter: moving away from the receiver
        for k in 1usize.. {
            let d_ir = d_tr + k as f64 * spacing;
            if d_ir > MAX_INTERFERER_RANGE_M + d_tr {
                break;
            }
            let p_int = kernel.p_int(d_ir);
            if bound * p_int < COLLISION_TERM_CUTOFF {
                break;
            }
            add(self.p_sim_at_index(k) * p_int);
        }
        // downstream: first towards the receiver, then away from it
        for k in 1usize.. {
            let x = k as f64 * spacing;
            let d_ir = (x - d_tr).abs();
            if d_ir < 1e-9 {
                continue;
            }
            if x > d_tr + MAX_INTERFERER_RANGE_M {
                break;
            }
            let p_int = kernel.p_int(d_ir);
            if x > d_tr && bound * p_int < COLLISION_TERM_CUTOFF {
                break;
            }
            add(self.p_sim_at_index(k) * p_int);
        }
        -f64::exp_m1(log_survive)
    }

    pub fn breakdown(&self, d: f64) -> PdrBreakdown {
        let ch = &self.link.channel;
        let sensing_dominated = self.link.is_sensing_dominated(d);
        let col = if sensing_dominated { 0.0 } else { self.delta_col(d) };
        let mut b = PdrBreakdown::compose(d, self.delta_hd(), ch.delta_sen(d), self.link.delta_pro(d), col);
        b.sensing_dominated = sensing_dominated;
        b
    }

    /// Breakdown at each distance; distances must be non-negative and sorted.
    pub fn pdr_curve(&self, distances: &[f64]) -> Result<Vec<PdrBreakdown>> {
        check_distances(distances)?;
        Ok(distances.iter().map(|&d| self.breakdown(d)).collect())
    }
}

pub(crate) fn check_distances(distances: &[f64]) -> Result<()> {
    if distances.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(config_err("distances must be finite and non-negative"));
    }
    if distances.windows(2).any(|w| w[1] < w[0]) {
        return Err(config_err("distances must be sorted in increasing order"));
    }
    Ok(())
}

pub fn pdr_curve(cfg: &ScenarioConfig, distances: &[f64]) -> Result<Vec<PdrBreakdown>> {
    check_distances(distances)?;
    AnalyticModel::new(cfg)?.pdr_curve(distances)
}

pub fn p_sim(d_ti: f64, cfg: &ScenarioConfig) -> Result<f64> {
    Ok(AnalyticModel::new(cfg)?.p_sim(d_ti))
}

pub fn delta_col(d_tr: f64, cfg: &ScenarioConfig) -> Result<f64> {
    Ok(AnalyticModel::new(cfg)?.delta_col(d_tr))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(beta: f64, pt: f64, lambda: u32, s: u32) -> AnalyticModel {
        AnalyticModel::new(&ScenarioConfig::new(beta, pt, lambda, s).unwrap()).unwrap()
    }

    #[test]
    fn cbr_matches_reference_scenarios() {
        // reference CBRs for λ = 10 Hz, S = 4
        for (beta, pt, cbr) in [(0.1, 20.0, 0.23), (0.2, 20.0, 0.44), (0.3, 20.0, 0.62), (0.1, 23.0, 0.27), (0.2, 23.0, 0.51), (0.3, 23.0, 0.69)] {
            let m = model(beta, pt, 10, 4);
            assert!((m.cbr() - cbr).abs() < 0.02, "β={beta} P_t={pt}: {}", m.cbr());
        }
    }

    #[test]
    fn p_sim_far_limit() {
        let m = model(0.1, 20.0, 10, 4);
        let c = m.counts(SelectionStep::Exclusion);
        let far = m.common_resources(1e6, SelectionStep::Exclusion);
        assert!((far.c_excluded - c.n_excluded * c.n_excluded / 400.0).abs() < 1e-9);
        assert_eq!(m.p_s(1e6), 1.0);
        let p2 = far.c_candidate / 6400.0;
        let p3 = m.common_resources(1e6, SelectionStep::ThresholdRaising).c_candidate / 6400.0;
        assert!((m.p_sim(1e6) - (m.alpha() * p2 + (1.0 - m.alpha()) * p3)).abs() < 1e-15);
    }

    #[test]
    fn breakdown_is_normalised() {
        let m = model(0.2, 23.0, 10, 4);
        let curve = m.pdr_curve(&[0.0, 50.0, 200.0, 400.0, 700.0, 1000.0]).unwrap();
        for b in &curve {
            assert!((b.pdr + b.loss_sum() - 1.0).abs() < 1e-12);
            assert_eq!(b.hd_norm, 0.01);
        }
        for w in curve.windows(2) {
            assert!(w[1].pdr <= w[0].pdr + 1e-12);
            assert!(w[1].sen_norm >= w[0].sen_norm - 1e-12);
        }
        assert!(m.pdr_curve(&[10.0, 5.0]).is_err());
        assert!(m.pdr_curve(&[-1.0]).is_err());
    }

    #[test]
    fn collisions_peak_in_the_interior() {
        let m = model(0.1, 20.0, 10, 4);
        let ds: Vec<f64> = (0..=100).map(|i| i as f64 * 10.0).collect();
        let col: Vec<f64> = ds.iter().map(|&d| m.breakdown(d).col_norm).collect();
        let (imax, _) = col.iter().enumerate().fold((0, 0.0), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
        assert!(imax > 0 && imax < ds.len() - 1, "peak at {}", ds[imax]);
    }
}
