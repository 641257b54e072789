use crate::SUBFRAMES_PER_SECOND;

/// Sensing decisions never look further back than this many sub-frames.
pub const SENSING_HISTORY: u32 = SUBFRAMES_PER_SECOND;

const EMPTY: u32 = u32::MAX;

/// Latest decoded reservation announced by one transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SciRecord {
    /// Sub-frame of the first decoded transmission on this reservation.
    pub start: u32,
    /// Sub-frame of the most recent decoded transmission.
    pub last: u32,
    pub subchannel: u16,
    /// Further transmissions announced after `last`.
    pub remaining: u32,
}

/// What one vehicle has sensed over the last second: per-resource RSSI and
/// the reservations it decoded, with their RSRP samples.
#[derive(Debug, Clone)]
pub struct SensingMemory {
    subchannels: usize,
    period: u32,
    /// `SENSING_HISTORY × subchannels` received power in mW; NaN when the
    /// vehicle was transmitting and could not listen.
    rssi: Vec<f32>,
    sci: Vec<Option<SciRecord>>,
    slots: usize,
    /// Per transmitter, `slots` entries of (sub-frame, received mW).
    rsrp: Vec<(u32, f32)>,
}

impl SensingMemory {
    pub fn new(vehicles: usize, subchannels: usize, period: u32) -> Self {
        let slots = (SENSING_HISTORY / period).max(1) as usize;
        Self {
            subchannels,
            period,
            rssi: vec![0.0; SENSING_HISTORY as usize * subchannels],
            sci: vec![None; vehicles],
            slots,
            rsrp: vec![(EMPTY, 0.0); vehicles * slots],
        }
    }

    pub fn subchannels(&self) -> usize {
        self.subchannels
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    fn row(&self, subframe: u32) -> usize {
        (subframe % SENSING_HISTORY) as usize * self.subchannels
    }

    /// RSSI row for `subframe`, to be overwritten with that sub-frame's measurement.
    pub fn rssi_row_mut(&mut self, subframe: u32) -> &mut [f32] {
        let r = self.row(subframe);
        &mut self.rssi[r..r + self.subchannels]
    }

    /// RSSI of `subchannel` at `subframe`, which must be within the last
    /// [`SENSING_HISTORY`] sub-frames.
    pub fn rssi(&self, subframe: u32, subchannel: usize) -> f32 {
        self.rssi[self.row(subframe) + subchannel]
    }

    /// Stores a decoded reservation announcement and its received power.
    pub fn record_sci(&mut self, tx: usize, subframe: u32, subchannel: u16, remaining: u32, rx_mw: f64) {
        let period = self.period;
        let rec = match self.sci[tx] {
            Some(r)
                if r.subchannel == subchannel
                    && subframe > r.last
                    && subframe - r.last < SENSING_HISTORY
                    && (subframe - r.last).is_multiple_of(period) =>
            {
                SciRecord { last: subframe, remaining, ..r }
            }
            _ => SciRecord { start: subframe, last: subframe, subchannel, remaining },
        };
        self.sci[tx] = Some(rec);
        let slot = (subframe / period) as usize % self.slots;
        self.rsrp[tx * self.slots + slot] = (subframe, rx_mw as f32);
    }

    pub fn sci(&self, tx: usize) -> Option<&SciRecord> {
        self.sci[tx].as_ref()
    }

    /// Decoded reservations whose last announcement is recent enough to use at `now`.
    pub fn reservations(&self, now: u32) -> impl Iterator<Item = (usize, &SciRecord)> + '_ {
        self.sci.iter().enumerate().filter_map(move |(tx, r)| {
            r.as_ref().filter(|r| r.last <= now && now - r.last < SENSING_HISTORY).map(|r| (tx, r))
        })
    }

    /// Mean received power of `tx`'s transmissions on its current
    /// reservation over the sensing history, dBm.
    pub fn rsrp_dbm(&self, tx: usize, now: u32) -> Option<f64> {
        let rec = self.sci[tx]?;
        let mut sum = 0.0;
        let mut n = 0u32;
        for &(stamp, mw) in &self.rsrp[tx * self.slots..(tx + 1) * self.slots] {
            if stamp != EMPTY && stamp >= rec.start && stamp <= now && now - stamp < SENSING_HISTORY {
                sum += mw as f64;
                n += 1;
            }
        }
        (n > 0).then(|| 10.0 * (sum / n as f64).log10())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rssi_ring_wraps_after_history() {
        let mut m = SensingMemory::new(2, 4, 100);
        m.rssi_row_mut(5)[2] = 1.5;
        assert_eq!(m.rssi(5, 2), 1.5);
        assert_eq!(m.rssi(1005, 2), 1.5);
        m.rssi_row_mut(1005).fill(0.0);
        assert_eq!(m.rssi(5, 2), 0.0);
    }

    #[test]
    fn reservation_tracking_and_rsrp_average() {
        let mut m = SensingMemory::new(3, 4, 100);
        m.record_sci(1, 10, 2, 5, 1e-8);
        m.record_sci(1, 110, 2, 4, 3e-8);
        let r = *m.sci(1).unwrap();
        assert_eq!((r.start, r.last, r.remaining), (10, 110, 4));
        let rsrp = m.rsrp_dbm(1, 200).unwrap();
        assert!((rsrp - 10.0 * 2e-8f64.log10()).abs() < 1e-5);
        // the first sample falls out of the window
        let rsrp = m.rsrp_dbm(1, 1050).unwrap();
        assert!((rsrp - 10.0 * 3e-8f64.log10()).abs() < 1e-5);
        assert_eq!(m.rsrp_dbm(1, 1200), None);
        assert_eq!(m.reservations(1200).count(), 0);

        // a different resource starts a new reservation
        m.record_sci(1, 250, 3, 9, 1e-9);
        let r = *m.sci(1).unwrap();
        assert_eq!((r.start, r.subchannel), (250, 3));
        assert!((m.rsrp_dbm(1, 260).unwrap() + 90.0).abs() < 1e-4);
        assert_eq!(m.reservations(260).map(|(tx, _)| tx).collect::<Vec<_>>(), vec![1]);
    }
}
