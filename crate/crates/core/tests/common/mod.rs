//! Sampling and enumeration oracles shared by the integration tests and the
//! acceptance runner. None of them call the model's integration code.

#![allow(dead_code)]

use cv2x_mode4::analytic::ScenarioConfig;
use cv2x_mode4::propagation::{BlerTable, Channel, LinkModel, LogisticBler};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sample mean of a Bernoulli estimate and its standard error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn binomial(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Self { mean: p, se: (p * (1.0 - p) / trials as f64).sqrt(), trials }
    }

    /// Agreement within `k` standard errors. A floor of one event's worth of
    /// probability keeps zero-variance estimates from demanding exactness.
    pub fn agrees(&self, exact: f64, k: f64) -> bool {
        let floor = 1.0 / self.trials as f64;
        (self.mean - exact).abs() <= k * self.se.max(floor)
    }

    pub fn z(&self, exact: f64) -> f64 {
        (self.mean - exact) / self.se.max(1.0 / self.trials as f64)
    }
}

fn rx_dbm(ch: &Channel, d: f64, rng: &mut ChaCha8Rng) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    ch.mean_rx_dbm(d) + ch.shadowing.sigma_db * z
}

fn mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

fn dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Share of packets from `d` received at or below the sensing threshold.
pub fn mc_delta_sen(ch: &Channel, d: f64, draws: u64, rng: &mut ChaCha8Rng) -> Estimate {
    let hits = (0..draws).filter(|_| rx_dbm(ch, d, rng) <= ch.radio.sensing_threshold_dbm).count();
    Estimate::binomial(hits as u64, draws)
}

/// Among packets sensed from `d`, the share lost to a Bernoulli BLER draw.
pub fn mc_delta_pro(link: &LinkModel, d: f64, draws: u64, rng: &mut ChaCha8Rng) -> Estimate {
    let ch = &link.channel;
    let (mut sensed, mut lost) = (0u64, 0u64);
    for _ in 0..draws {
        let p = rx_dbm(ch, d, rng);
        let u: f64 = rng.random();
        if p <= ch.radio.sensing_threshold_dbm {
            continue;
        }
        sensed += 1;
        if u < link.bler.bler(p - ch.radio.noise_power_dbm) {
            lost += 1;
        }
    }
    Estimate::binomial(lost, sensed)
}

/// Among sensed packets that survive propagation alone, the share lost once
/// one interferer at `d_ir` adds its power to the noise.
pub fn mc_p_int(link: &LinkModel, d_tr: f64, d_ir: f64, draws: u64, rng: &mut ChaCha8Rng) -> Estimate {
    let ch = &link.channel;
    let n0 = mw(ch.radio.noise_power_dbm);
    let (mut survive, mut lost) = (0u64, 0u64);
    for _ in 0..draws {
        let p = rx_dbm(ch, d_tr, rng);
        let i = rx_dbm(ch, d_ir, rng);
        let u: f64 = rng.random();
        if p <= ch.radio.sensing_threshold_dbm || u < link.bler.bler(p - ch.radio.noise_power_dbm) {
            continue;
        }
        survive += 1;
        if u < link.bler.bler(p - dbm(mw(i) + n0)) {
            lost += 1;
        }
    }
    Estimate::binomial(lost, survive)
}

/// Randomized but plausible link settings: power, σ and BLER midpoint vary.
pub fn random_link(rng: &mut ChaCha8Rng) -> LinkModel {
    let power = rng.random_range(10.0..23.0);
    let beta = 0.1;
    let s = if rng.random_bool(0.5) { 2 } else { 4 };
    let mut cfg = ScenarioConfig::new(beta, power, 10, s).unwrap();
    cfg.shadowing.sigma_db = rng.random_range(2.0..6.0);
    let s50 = rng.random_range(3.0..9.0);
    let slope = rng.random_range(0.6..2.0);
    cfg.bler = BlerTable::from_logistic(9, LogisticBler { snr50_db: s50, slope_per_db: slope }).unwrap();
    cfg.link_model()
}

/// Two vehicles each draw `n_c` candidates out of their own `n_a`
/// assignable resources (sharing `c_a` of them) and pick one candidate.
/// Exact same-resource probability by exhaustive enumeration.
pub fn toy_same_resource_exact(n: usize, n_a: usize, c_a: usize, n_c: usize) -> f64 {
    assert!(2 * n_a - c_a <= n && c_a <= n_a && n_c <= n_a);
    // A holds 0..n_a, B holds the first c_a of those plus n_a..2n_a-c_a
    let a: Vec<usize> = (0..n_a).collect();
    let b: Vec<usize> = (0..c_a).chain(n_a..2 * n_a - c_a).collect();
    let subsets_a = subsets(&a, n_c);
    let subsets_b = subsets(&b, n_c);
    let mut hits = 0usize;
    for sa in &subsets_a {
        for sb in &subsets_b {
            hits += sa.iter().filter(|r| sb.contains(r)).count();
        }
    }
    let outcomes = subsets_a.len() * subsets_b.len() * n_c * n_c;
    hits as f64 / outcomes as f64
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = subsets(&items[1..], k - 1);
    for s in &mut out {
        s.push(items[0]);
    }
    out.extend(subsets(&items[1..], k));
    out
}

/// Monte-Carlo version of the same process, with fresh random sets per trial.
pub fn toy_same_resource_mc(
    n: usize,
    n_a: usize,
    c_a: usize,
    n_c: usize,
    trials: u64,
    rng: &mut ChaCha8Rng,
) -> Estimate {
    let mut hits = 0u64;
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..trials {
        // random layout of the two assignable lists inside the N resources
        for i in 0..2 * n_a - c_a {
            let j = rng.random_range(i..n);
            perm.swap(i, j);
        }
        let la = &perm[..n_a];
        let lb: Vec<usize> = perm[..c_a].iter().chain(&perm[n_a..2 * n_a - c_a]).copied().collect();
        let ca = la[sample(rng, n_a, n_c).index(rng.random_range(0..n_c))];
        let cb = lb[sample(rng, n_a, n_c).index(rng.random_range(0..n_c))];
        if ca == cb {
            hits += 1;
        }
    }
    Estimate::binomial(hits, trials)
}

/// Two co-located observers each sense every other vehicle on the line
/// independently with its sensing ratio. Returns the expected number of
/// vehicles sensed by one observer and by both, from `trials` samples.
pub fn mc_joint_sensing(
    beta: f64,
    psr: impl Fn(f64) -> f64,
    max_range_m: f64,
    trials: u64,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let positions: Vec<f64> = (1..)
        .map(|j| j as f64 / beta)
        .take_while(|&x| x <= max_range_m)
        .flat_map(|x| [x, x])
        .collect();
    let probs: Vec<f64> = positions.iter().map(|&x| psr(x)).collect();
    let (mut one, mut both) = (0u64, 0u64);
    for _ in 0..trials {
        for &p in &probs {
            let a = rng.random::<f64>() < p;
            let b = rng.random::<f64>() < p;
            one += a as u64;
            both += (a && b) as u64;
        }
    }
    (one as f64 / trials as f64, both as f64 / trials as f64)
}
