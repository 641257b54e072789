//! Sensing-based semi-persistent resource selection.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::sensing::{SensingMemory, SENSING_HISTORY};

/// Fraction of the selection window that must survive exclusion, and the
/// size of the final candidate list relative to the window.
pub const CANDIDATE_FRACTION: f64 = 0.2;

/// A reservation: sub-frame offset within the period and sub-channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Resource {
    pub offset: u32,
    pub subchannel: u16,
}

/// Static inputs of the selection procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpsContext {
    /// Reservation period and selection-window length, sub-frames.
    pub period: u32,
    pub subchannels: u16,
    pub rsrp_threshold_dbm: f64,
    pub rsrp_step_db: f64,
    pub resel_min: u32,
    pub resel_max: u32,
}

impl SpsContext {
    pub fn window_resources(&self) -> usize {
        self.period as usize * self.subchannels as usize
    }

    pub fn candidate_count(&self) -> usize {
        (CANDIDATE_FRACTION * self.window_resources() as f64).round() as usize
    }
}

/// Result of one resource (re)selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub resource: Resource,
    /// Absolute sub-frame of the first transmission on the new resource.
    pub first_tx: u32,
    pub counter: u32,
    /// Final candidate list as (absolute sub-frame, sub-channel).
    pub candidates: Vec<(u32, u16)>,
    /// Resources left after exclusion.
    pub available: usize,
    pub threshold_raises: u32,
    /// First and last sub-frame of the selection window.
    pub window: (u32, u32),
    /// Exclusion of the vehicle's own transmission sub-frames had to be
    /// abandoned to keep enough resources.
    pub own_exclusion_dropped: bool,
}

/// Selects a new resource for a packet generated at `now`.
///
/// `own_tx` lists the vehicle's recent transmission sub-frames; the
/// selection window is `now + 1 ..= now + period`.
pub fn sps_select<R: Rng + ?Sized>(
    own_tx: &[u32],
    sensing: &SensingMemory,
    now: u32,
    ctx: &SpsContext,
    rng: &mut R,
) -> Selection {
    let p = ctx.period;
    let s = ctx.subchannels as usize;
    let n = ctx.window_resources();
    let first = now + 1;
    let index = |y: u32, c: usize| (y - first) as usize * s + c;

    // sub-frames that could not be sensed because the vehicle was transmitting
    let mut own_blocked = vec![false; p as usize];
    for &z in own_tx {
        if z <= now && now - z < SENSING_HISTORY {
            // window sub-frame congruent to z
            let y = first + (z + p - first % p) % p;
            own_blocked[(y - first) as usize] = true;
        }
    }

    // reservations announced to fall inside the window, with their RSRP
    let mut reserved: Vec<(usize, f64)> = Vec::new();
    for (tx, rec) in sensing.reservations(now) {
        let k = (first - rec.last).div_ceil(p).max(1);
        if k > rec.remaining {
            continue;
        }
        let y = rec.last + k * p;
        if y > now + p {
            continue;
        }
        if let Some(rsrp) = sensing.rsrp_dbm(tx, now) {
            reserved.push((index(y, rec.subchannel as usize), rsrp));
        }
    }

    let mut threshold = ctx.rsrp_threshold_dbm;
    let mut raises = 0;
    let mut use_own = true;
    let mut excluded = vec![false; n];
    loop {
        excluded.fill(false);
        if use_own {
            for (i, &b) in own_blocked.iter().enumerate() {
                if b {
                    excluded[i * s..(i + 1) * s].fill(true);
                }
            }
        }
        let mut any_sci = false;
        for &(i, rsrp) in &reserved {
            if rsrp > threshold {
                excluded[i] = true;
                any_sci = true;
            }
        }
        let available = excluded.iter().filter(|&&e| !e).count();
        if available as f64 >= CANDIDATE_FRACTION * n as f64 {
            break;
        }
        if any_sci {
            threshold += ctx.rsrp_step_db;
            raises += 1;
        } else {
            use_own = false;
        }
    }

    let mut available: Vec<(u32, u16)> = (0..n)
        .filter(|&i| !excluded[i])
        .map(|i| (first + (i / s) as u32, (i % s) as u16))
        .collect();
    let n_available = available.len();
    available.shuffle(rng);
    let mut ranked: Vec<(f64, (u32, u16))> =
        available.into_iter().map(|(y, c)| (average_rssi(sensing, y, c as usize, p), (y, c))).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let candidates: Vec<(u32, u16)> = ranked.into_iter().take(ctx.candidate_count()).map(|r| r.1).collect();
    let &(first_tx, subchannel) = candidates.choose(rng).expect("selection window is never empty");
    Selection {
        resource: Resource { offset: first_tx % p, subchannel },
        first_tx,
        counter: rng.random_range(ctx.resel_min..=ctx.resel_max),
        candidates,
        available: n_available,
        threshold_raises: raises,
        window: (first, now + p),
        own_exclusion_dropped: !use_own,
    }
}

/// Mean RSSI of a candidate over the sensed sub-frames one, two, ... periods
/// earlier. Sub-frames the vehicle spent transmitting are skipped; a
/// candidate with only such sub-frames ranks last.
fn average_rssi(sensing: &SensingMemory, y: u32, c: usize, period: u32) -> f64 {
    let mut sum = 0.0;
    let mut n = 0u32;
    let mut blind = false;
    for j in 1..=SENSING_HISTORY / period {
        let Some(t) = y.checked_sub(j * period) else { break };
        let v = sensing.rssi(t, c);
        if v.is_nan() {
            blind = true;
        } else {
            sum += v as f64;
            n += 1;
        }
    }
    match (n, blind) {
        (0, true) => f64::INFINITY,
        (0, false) => 0.0,
        _ => sum / n as f64,
    }
}
