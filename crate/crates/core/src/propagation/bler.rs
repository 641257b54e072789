//! PHY abstraction: block error rate as a function of SNR (or SINR) in dB.
//!
//! Tables are piecewise-linear in (dB, BLER). Below the first knot the block
//! is always lost; above the last knot the last value holds.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Identifier of a modulation and coding scheme.
pub type McsId = u8;

/// SNR to BLER look-up table for one MCS.
#[derive(Debug, Clone, PartialEq)]
pub struct BlerTable {
    mcs_id: McsId,
    snr_db: Vec<f64>,
    bler: Vec<f64>,
    // (first knot, 1/step) when the knots are evenly spaced
    uniform: Option<(f64, f64)>,
}

/// Parameters of the synthetic logistic curve `1 / (1 + exp(k·(s - s50)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticBler {
    pub snr50_db: f64,
    pub slope_per_db: f64,
}

impl LogisticBler {
    /// Synthetic stand-ins for the highway link-level curves of a 190-byte
    /// packet. MCS 9 is QPSK r≈0.7 on 4 sub-channels, MCS 7 is QPSK r≈0.5 on 2.
    pub fn synthetic(mcs: McsId) -> Option<Self> {
        match mcs {
            7 => Some(Self { snr50_db: 5.0, slope_per_db: 1.1 }),
            9 => Some(Self { snr50_db: 7.0, slope_per_db: 1.1 }),
            _ => None,
        }
    }

    pub fn eval(&self, snr_db: f64) -> f64 {
        1.0 / (1.0 + (self.slope_per_db * (snr_db - self.snr50_db)).exp())
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    snr_db: f64,
    bler: f64,
}

impl BlerTable {
    pub fn new(mcs_id: McsId, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("BLER table needs at least one point".into()));
        }
        let mut snr_db = Vec::with_capacity(points.len());
        let mut bler = Vec::with_capacity(points.len());
        for (i, &(s, b)) in points.iter().enumerate() {
            if !s.is_finite() || !b.is_finite() {
                return Err(Error::Config(format!("BLER point {i} is not finite")));
            }
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::Config(format!("BLER point {i}: value {b} outside [0, 1]")));
            }
            if let (Some(&prev_s), Some(&prev_b)) = (snr_db.last(), bler.last()) {
                if s <= prev_s {
                    return Err(Error::Config(format!(
                        "BLER point {i}: snr_db {s} not strictly increasing"
                    )));
                }
                if b > prev_b {
                    return Err(Error::Config(format!(
                        "BLER point {i}: BLER increases with SNR ({prev_b} -> {b})"
                    )));
                }
            }
            snr_db.push(s);
            bler.push(b);
        }
        let uniform = uniform_spacing(&snr_db);
        Ok(Self { mcs_id, snr_db, bler, uniform })
    }

    /// Samples a logistic curve every 0.05 dB over ±20/k dB around its midpoint.
    pub fn from_logistic(mcs_id: McsId, curve: LogisticBler) -> Result<Self> {
        if !(curve.slope_per_db > 0.0 && curve.snr50_db.is_finite()) {
            return Err(Error::Config("logistic BLER needs a positive slope".into()));
        }
        let half_span = 20.0 / curve.slope_per_db;
        let step = 0.05;
        let n = (2.0 * half_span / step).ceil() as usize;
        let start = curve.snr50_db - half_span;
        let points = (0..=n)
            .map(|i| {
                let s = start + i as f64 * step;
                (s, curve.eval(s))
            })
            .collect();
        Self::new(mcs_id, points)
    }

    /// Synthetic default curve for a known MCS.
    pub fn synthetic(mcs_id: McsId) -> Result<Self> {
        let curve = LogisticBler::synthetic(mcs_id).ok_or_else(|| {
            Error::Config(format!("no built-in BLER curve for MCS {mcs_id}; supply a CSV table"))
        })?;
        Self::from_logistic(mcs_id, curve)
    }

    /// Loads a `snr_db,bler` CSV. The MCS comes from `mcs_id`, or else from
    /// the first run of digits in the file name (`mcs9.csv` → 9).
    pub fn from_csv_path(path: impl AsRef<Path>, mcs_id: Option<McsId>) -> Result<Self> {
        let path = path.as_ref();
        let mcs = match mcs_id {
            Some(m) => m,
            None => mcs_from_file_name(path).ok_or_else(|| Error::BlerTable {
                path: path.to_path_buf(),
                msg: "MCS id not given and not found in the file name".into(),
            })?,
        };
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file, mcs).map_err(|e| Error::BlerTable {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
    }

    pub fn from_csv_reader<R: Read>(reader: R, mcs_id: McsId) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "snr_db" || &headers[1] != "bler" {
            return Err(Error::Config(format!(
                "expected header `snr_db,bler`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut points = Vec::new();
        for row in rdr.deserialize::<CsvRow>() {
            let row = row?;
            points.push((row.snr_db, row.bler));
        }
        Self::new(mcs_id, points)
    }

    pub fn mcs_id(&self) -> McsId {
        self.mcs_id
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.snr_db.iter().copied().zip(self.bler.iter().copied())
    }

    /// BLER at `snr_db`.
    #[inline]
    pub fn bler(&self, snr_db: f64) -> f64 {
        let n = self.snr_db.len();
        if snr_db < self.snr_db[0] {
            return 1.0;
        }
        if snr_db >= self.snr_db[n - 1] {
            return self.bler[n - 1];
        }
        let i = match self.uniform {
            Some((start, inv_step)) => (((snr_db - start) * inv_step) as usize).min(n - 2),
            None => self.snr_db.partition_point(|&s| s <= snr_db) - 1,
        };
        let (s0, s1) = (self.snr_db[i], self.snr_db[i + 1]);
        let (b0, b1) = (self.bler[i], self.bler[i + 1]);
        let t = ((snr_db - s0) / (s1 - s0)).clamp(0.0, 1.0);
        b0 + t * (b1 - b0)
    }
}

fn uniform_spacing(knots: &[f64]) -> Option<(f64, f64)> {
    if knots.len() < 3 {
        return None;
    }
    let step = (knots[knots.len() - 1] - knots[0]) / (knots.len() - 1) as f64;
    let uniform = knots
        .windows(2)
        .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs().max(1.0));
    uniform.then(|| (knots[0], 1.0 / step))
}

fn mcs_from_file_name(path: &Path) -> Option<McsId> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem
        .chars()
        .skip_while(|c| !c.is_ascii_digit())
        .take_while(|c| c.is_ascii_digit())
        .collect();
    digits.parse().ok()
}
