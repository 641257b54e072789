use std::io::Write;

use super::rx::Outcome;
use crate::error::Result;

/// One classified reception attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxEvent {
    pub subframe: u32,
    pub tx_id: usize,
    pub rx_id: usize,
    pub distance_m: f64,
    pub outcome: Outcome,
}

/// Receives every counted reception attempt.
pub trait EventSink {
    fn record(&mut self, ev: &RxEvent);
}

/// Discards events.
pub struct NullSink;

impl EventSink for NullSink {
    fn record(&mut self, _: &RxEvent) {}
}

impl<A: EventSink, B: EventSink> EventSink for (A, B) {
    fn record(&mut self, ev: &RxEvent) {
        self.0.record(ev);
        self.1.record(ev);
    }
}

impl<S: EventSink + ?Sized> EventSink for &mut S {
    fn record(&mut self, ev: &RxEvent) {
        (**self).record(ev);
    }
}

/// Writes events as `subframe,tx_id,rx_id,distance_m,outcome` rows.
pub struct TraceWriter<W: Write> {
    out: csv::Writer<W>,
    error: Option<csv::Error>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut out = csv::Writer::from_writer(out);
        out.write_record(["subframe", "tx_id", "rx_id", "distance_m", "outcome"])?;
        Ok(Self { out, error: None })
    }

    /// Flushes and reports the first write error, if any.
    pub fn finish(mut self) -> Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e.into());
        }
        self.out.flush()?;
        self.out.into_inner().map_err(|e| e.into_error().into())
    }
}

impl<W: Write> EventSink for TraceWriter<W> {
    fn record(&mut self, ev: &RxEvent) {
        if self.error.is_some() {
            return;
        }
        let row = [
            ev.subframe.to_string(),
            ev.tx_id.to_string(),
            ev.rx_id.to_string(),
            format!("{:.3}", ev.distance_m),
            ev.outcome.label().to_string(),
        ];
        if let Err(e) = self.out.write_record(&row) {
            self.error = Some(e);
        }
    }
}

/// Outcome counts for one distance bin.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BinCounts {
    pub counts: [u64; 5],
    /// Sum of the distances of all counted attempts, for the bin's mean distance.
    pub distance_sum: f64,
}

impl BinCounts {
    pub fn attempts(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, o: Outcome) -> u64 {
        self.counts[o.index()]
    }

    /// Fraction of attempts with outcome `o`; `None` for an empty bin.
    pub fn share(&self, o: Outcome) -> Option<f64> {
        let n = self.attempts();
        (n > 0).then(|| self.count(o) as f64 / n as f64)
    }

    pub fn pdr(&self) -> Option<f64> {
        self.share(Outcome::Ok)
    }

    pub fn mean_distance(&self) -> Option<f64> {
        let n = self.attempts();
        (n > 0).then(|| self.distance_sum / n as f64)
    }
}

/// Per-distance-bin reception statistics and CBR samples of one or more runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub bin_width_m: f64,
    pub bins: Vec<BinCounts>,
    pub cbr_samples: Vec<f64>,
}

impl SimStats {
    pub fn new(bin_width_m: f64, bin_count: usize) -> Self {
        Self { bin_width_m, bins: vec![BinCounts::default(); bin_count], cbr_samples: Vec::new() }
    }

    pub fn bin_of(&self, distance_m: f64) -> Option<usize> {
        let i = (distance_m / self.bin_width_m) as usize;
        (i < self.bins.len()).then_some(i)
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.bin_width_m
    }

    pub fn total_attempts(&self) -> u64 {
        self.bins.iter().map(BinCounts::attempts).sum()
    }

    /// Pooled share of `o` over all bins.
    pub fn pooled_share(&self, o: Outcome) -> Option<f64> {
        let n = self.total_attempts();
        (n > 0).then(|| self.bins.iter().map(|b| b.count(o)).sum::<u64>() as f64 / n as f64)
    }

    pub fn mean_cbr(&self) -> Option<f64> {
        let n = self.cbr_samples.len();
        (n > 0).then(|| self.cbr_samples.iter().sum::<f64>() / n as f64)
    }

    /// Pools another run's counts into this one. Bin layouts must match.
    pub fn merge(&mut self, other: &SimStats) {
        assert_eq!(self.bins.len(), other.bins.len(), "bin layouts differ");
        assert_eq!(self.bin_width_m, other.bin_width_m, "bin layouts differ");
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            for k in 0..5 {
                a.counts[k] += b.counts[k];
            }
            a.distance_sum += b.distance_sum;
        }
        self.cbr_samples.extend_from_slice(&other.cbr_samples);
    }
}

impl EventSink for SimStats {
    fn record(&mut self, ev: &RxEvent) {
        if let Some(i) = self.bin_of(ev.distance_m) {
            let b = &mut self.bins[i];
            b.counts[ev.outcome.index()] += 1;
            b.distance_sum += ev.distance_m;
        }
    }
}
