use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::params::{SimParams, MIN_VEHICLES};
use super::rx::{classify_rx, sci_decoded, Outcome, RxSample};
use super::sensing::{SensingMemory, SENSING_HISTORY};
use super::sps::{sps_select, Resource, Selection, SpsContext};
use super::stats::{EventSink, RxEvent, SimStats};
use crate::analytic::ScenarioConfig;
use crate::error::{config_err, Error, Result};
use crate::propagation::dbm_to_mw;

const LN10_OVER_10: f64 = std::f64::consts::LN_10 / 10.0;

/// One vehicle on the ring.
#[derive(Debug, Clone)]
pub struct VehicleState {
    pub id: usize,
    pub position_m: f64,
    /// Packets are generated at sub-frames congruent to this modulo the period.
    pub gen_phase: u32,
    pub reselection_counter: u32,
    pub reserved: Resource,
    pub next_tx: u32,
    /// Own transmissions within the sensing history.
    pub tx_log: VecDeque<u32>,
    pub tx_count: u64,
    pub reselections: u64,
    pub sensing: SensingMemory,
    rng: ChaCha8Rng,
}

impl VehicleState {
    fn own_tx(&self) -> Vec<u32> {
        self.tx_log.iter().copied().collect()
    }
}

/// Complete simulator state.
#[derive(Debug, Clone)]
pub struct World {
    cfg: ScenarioConfig,
    params: SimParams,
    ctx: SpsContext,
    spacing: f64,
    vehicles: Vec<VehicleState>,
    channel_rng: ChaCha8Rng,
    /// Mean received power and ring distance by index offset.
    mean_rx_by_offset: Vec<f64>,
    distance_by_offset: Vec<f64>,
    cbr_threshold_mw: f32,
    now: u32,
    last_selection: Option<(usize, Selection)>,
    // scratch, reused across sub-frames
    tx_ids: Vec<usize>,
    is_tx: Vec<bool>,
    rx_dbm: Vec<f64>,
    rx_mw: Vec<f64>,
    per_subchannel: Vec<f64>,
}

/// Builds the ring, places `round(length·β)` vehicles evenly and gives each
/// a random packet phase, reservation and reselection counter.
pub fn build_scenario(cfg: &ScenarioConfig, params: &SimParams, seed: u64) -> Result<World> {
    cfg.validate()?;
    params.validate()?;
    let n = (params.length_m * cfg.beta).round() as usize;
    if n < MIN_VEHICLES {
        return Err(config_err(format!(
            "{n} vehicles on {} m at β = {} is below the minimum of {MIN_VEHICLES}",
            params.length_m, cfg.beta
        )));
    }
    if cfg.subchannels > u16::MAX as u32 {
        return Err(config_err("too many sub-channels"));
    }
    let spacing = params.length_m / n as f64;
    let period = cfg.period_subframes();
    let ctx = SpsContext {
        period,
        subchannels: cfg.subchannels as u16,
        rsrp_threshold_dbm: params.rsrp_threshold_dbm,
        rsrp_step_db: params.rsrp_step_db,
        resel_min: cfg.resel_min,
        resel_max: cfg.resel_max,
    };
    let ch = cfg.channel();
    let distance_by_offset: Vec<f64> = (0..n).map(|k| k.min(n - k) as f64 * spacing).collect();
    let mean_rx_by_offset = distance_by_offset.iter().map(|&d| ch.mean_rx_dbm(d)).collect();

    let mut channel_rng = ChaCha8Rng::seed_from_u64(seed);
    channel_rng.set_stream(0);
    let vehicles = (0..n)
        .map(|id| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id as u64 + 1);
            let gen_phase = rng.random_range(0..period);
            let next_tx = gen_phase + rng.random_range(1..=period);
            let subchannel = rng.random_range(0..ctx.subchannels);
            let reselection_counter = rng.random_range(cfg.resel_min..=cfg.resel_max);
            VehicleState {
                id,
                position_m: id as f64 * spacing,
                gen_phase,
                reselection_counter,
                reserved: Resource { offset: next_tx % period, subchannel },
                next_tx,
                tx_log: VecDeque::new(),
                tx_count: 0,
                reselections: 0,
                sensing: SensingMemory::new(n, cfg.subchannels as usize, period),
                rng,
            }
        })
        .collect();
    let cbr_threshold = params.cbr_threshold_dbm.unwrap_or(cfg.radio.sensing_threshold_dbm);
    Ok(World {
        cfg: cfg.clone(),
        params: *params,
        ctx,
        spacing,
        vehicles,
        channel_rng,
        mean_rx_by_offset,
        distance_by_offset,
        cbr_threshold_mw: dbm_to_mw(cbr_threshold) as f32,
        now: 0,
        last_selection: None,
        tx_ids: Vec::new(),
        is_tx: vec![false; n],
        rx_dbm: Vec::new(),
        rx_mw: Vec::new(),
        per_subchannel: vec![0.0; cfg.subchannels as usize],
    })
}

impl World {
    pub fn vehicles(&self) -> &[VehicleState] {
        &self.vehicles
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing
    }

    pub fn sps_context(&self) -> &SpsContext {
        &self.ctx
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    /// Sub-frame that the next [`World::step`] will simulate.
    pub fn now(&self) -> u32 {
        self.now
    }

    /// Ring distance between two vehicles.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.distance_by_offset[a.abs_diff(b)]
    }

    /// The most recent resource selection and the vehicle that made it.
    pub fn last_selection(&self) -> Option<&(usize, Selection)> {
        self.last_selection.as_ref()
    }

    /// Overrides a vehicle's reservation, e.g. to set up a test scenario.
    pub fn set_reservation(&mut self, id: usize, next_tx: u32, subchannel: u16, counter: u32) {
        let p = self.ctx.period;
        let v = &mut self.vehicles[id];
        v.next_tx = next_tx;
        v.reserved = Resource { offset: next_tx % p, subchannel };
        v.reselection_counter = counter;
        v.gen_phase = (next_tx + p - 1) % p;
    }

    /// Simulates one sub-frame: transmissions, receptions with sensing
    /// updates, then packet generation and any due reselections.
    pub fn step(&mut self, sink: &mut dyn EventSink) {
        let t = self.now;
        let n = self.vehicles.len();
        let s = self.cfg.subchannels as usize;

        self.tx_ids.clear();
        for v in &self.vehicles {
            if v.next_tx == t {
                self.tx_ids.push(v.id);
            }
        }
        for &i in &self.tx_ids {
            self.is_tx[i] = true;
        }

        let radio = self.cfg.radio;
        let sigma = self.cfg.shadowing.sigma_db;
        let k = self.tx_ids.len();
        self.rx_dbm.resize(k, 0.0);
        self.rx_mw.resize(k, 0.0);
        for r in 0..n {
            if self.is_tx[r] {
                self.vehicles[r].sensing.rssi_row_mut(t).fill(f32::NAN);
                for &w in &self.tx_ids {
                    if w != r {
                        emit(sink, t, w, r, self.distance_by_offset[w.abs_diff(r)], &self.params, Outcome::HalfDuplex);
                    }
                }
                continue;
            }
            self.per_subchannel.fill(0.0);
            for (j, &w) in self.tx_ids.iter().enumerate() {
                let z: f64 = self.channel_rng.sample(StandardNormal);
                let p_dbm = self.mean_rx_by_offset[w.abs_diff(r)] + sigma * z;
                let p_mw = (p_dbm * LN10_OVER_10).exp();
                self.rx_dbm[j] = p_dbm;
                self.rx_mw[j] = p_mw;
                self.per_subchannel[self.vehicles[w].reserved.subchannel as usize] += p_mw;
            }
            let row = self.vehicles[r].sensing.rssi_row_mut(t);
            for (c, cell) in row.iter_mut().enumerate().take(s) {
                *cell = self.per_subchannel[c] as f32;
            }
            for (j, &w) in self.tx_ids.iter().enumerate() {
                let sample = RxSample {
                    rx_transmitting: false,
                    signal_dbm: self.rx_dbm[j],
                    interference_mw: 0.0,
                    uniform: 0.0,
                };
                if sample.signal_dbm <= radio.sensing_threshold_dbm {
                    emit(sink, t, w, r, self.distance_by_offset[w.abs_diff(r)], &self.params, Outcome::Sensing);
                    continue;
                }
                let sub = self.vehicles[w].reserved.subchannel;
                let sample = RxSample {
                    interference_mw: (self.per_subchannel[sub as usize] - self.rx_mw[j]).max(0.0),
                    uniform: self.channel_rng.random::<f64>(),
                    ..sample
                };
                let outcome = classify_rx(&sample, &radio, &self.cfg.bler);
                emit(sink, t, w, r, self.distance_by_offset[w.abs_diff(r)], &self.params, outcome);
                if sci_decoded(&sample, &radio, &self.cfg.bler) {
                    let remaining = self.vehicles[w].reselection_counter.saturating_sub(1);
                    self.vehicles[r].sensing.record_sci(w, t, sub, remaining, self.rx_mw[j]);
                }
            }
        }

        let p = self.ctx.period;
        for &i in &self.tx_ids {
            self.is_tx[i] = false;
            let v = &mut self.vehicles[i];
            v.reselection_counter = v.reselection_counter.saturating_sub(1);
            v.next_tx += p;
            v.tx_count += 1;
            v.tx_log.push_back(t);
            while v.tx_log.front().is_some_and(|&z| t - z >= SENSING_HISTORY) {
                v.tx_log.pop_front();
            }
        }

        let phase = t % p;
        for i in 0..n {
            let v = &self.vehicles[i];
            if v.gen_phase != phase || v.reselection_counter > 0 {
                continue;
            }
            let own = v.own_tx();
            let v = &mut self.vehicles[i];
            let sel = sps_select(&own, &v.sensing, t, &self.ctx, &mut v.rng);
            v.reserved = sel.resource;
            v.next_tx = sel.first_tx;
            v.reselection_counter = sel.counter;
            v.reselections += 1;
            self.last_selection = Some((i, sel));
        }
        self.now += 1;
    }

    /// Fraction of resources in the trailing CBR window sensed above the
    /// busy threshold, averaged over vehicles. Sub-frames a vehicle spent
    /// transmitting are left out of its own average.
    pub fn measure_cbr(&self) -> Result<f64> {
        let window = self.params.cbr_window;
        if self.now < window {
            return Err(Error::NotReady(format!(
                "CBR needs {window} sub-frames of history, only {} simulated",
                self.now
            )));
        }
        let s = self.cfg.subchannels as usize;
        let mut total = 0.0;
        for v in &self.vehicles {
            let mut busy = 0u32;
            let mut seen = 0u32;
            for t in self.now - window..self.now {
                for c in 0..s {
                    let x = v.sensing.rssi(t, c);
                    if x.is_nan() {
                        continue;
                    }
                    seen += 1;
                    if x > self.cbr_threshold_mw {
                        busy += 1;
                    }
                }
            }
            if seen > 0 {
                total += busy as f64 / seen as f64;
            }
        }
        Ok(total / self.vehicles.len() as f64)
    }
}

#[inline]
fn emit(sink: &mut dyn EventSink, t: u32, tx: usize, rx: usize, d: f64, params: &SimParams, outcome: Outcome) {
    if d <= params.max_distance_m && t >= params.warmup_subframes() {
        sink.record(&RxEvent { subframe: t, tx_id: tx, rx_id: rx, distance_m: d, outcome });
    }
}

/// Runs a full simulation and returns its statistics. Events after the
/// warmup also go to `extra`, e.g. a trace writer.
pub fn run_with_sink(
    cfg: &ScenarioConfig,
    params: &SimParams,
    seed: u64,
    extra: &mut dyn EventSink,
) -> Result<SimStats> {
    let mut world = build_scenario(cfg, params, seed)?;
    let mut stats = SimStats::new(params.bin_width_m, params.bin_count());
    let warmup = params.warmup_subframes();
    let end = params.total_subframes();
    let window = params.cbr_window;
    while world.now() < end {
        world.step(&mut (&mut stats, &mut *extra));
        let done = world.now();
        if done > warmup && (done - warmup).is_multiple_of(window) {
            stats.cbr_samples.push(world.measure_cbr()?);
        }
    }
    Ok(stats)
}

pub fn run(cfg: &ScenarioConfig, params: &SimParams, seed: u64) -> Result<SimStats> {
    run_with_sink(cfg, params, seed, &mut super::stats::NullSink)
}
