use crate::propagation::{dbm_to_mw, mw_to_dbm, BlerTable, RadioConfig};

/// Fate of one packet at one receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Ok,
    HalfDuplex,
    Sensing,
    Propagation,
    Collision,
}

impl Outcome {
    pub const ALL: [Outcome; 5] =
        [Outcome::Ok, Outcome::HalfDuplex, Outcome::Sensing, Outcome::Propagation, Outcome::Collision];

    pub fn label(self) -> &'static str {
        match self {
            Outcome::Ok => "OK",
            Outcome::HalfDuplex => "HD",
            Outcome::Sensing => "SEN",
            Outcome::Propagation => "PRO",
            Outcome::Collision => "COL",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Everything the classifier needs about one reception attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxSample {
    /// The receiver itself transmits in this sub-frame.
    pub rx_transmitting: bool,
    /// Received signal power after shadowing, dBm.
    pub signal_dbm: f64,
    /// Sum of co-resource interference at the receiver, mW.
    pub interference_mw: f64,
    /// One U(0,1) draw shared by the propagation and collision tests.
    pub uniform: f64,
}

/// Assigns exactly one outcome, testing causes in the order HD, SEN, PRO, COL.
///
/// The propagation and collision tests share one uniform draw, so a packet
/// can only be lost to collision if it would have survived without
/// interference.
pub fn classify_rx(s: &RxSample, radio: &RadioConfig, bler: &BlerTable) -> Outcome {
    if s.rx_transmitting {
        return Outcome::HalfDuplex;
    }
    if s.signal_dbm <= radio.sensing_threshold_dbm {
        return Outcome::Sensing;
    }
    if s.uniform < bler.bler(s.signal_dbm - radio.noise_power_dbm) {
        return Outcome::Propagation;
    }
    if s.interference_mw > 0.0 {
        let floor = mw_to_dbm(s.interference_mw + dbm_to_mw(radio.noise_power_dbm));
        if s.uniform < bler.bler(s.signal_dbm - floor) {
            return Outcome::Collision;
        }
    }
    Outcome::Ok
}

/// Whether the control message announcing a reservation is decoded: the
/// packet must be sensed and survive the interference-free BLER test.
pub fn sci_decoded(s: &RxSample, radio: &RadioConfig, bler: &BlerTable) -> bool {
    !s.rx_transmitting
        && s.signal_dbm > radio.sensing_threshold_dbm
        && s.uniform >= bler.bler(s.signal_dbm - radio.noise_power_dbm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_bler(at: f64) -> BlerTable {
        BlerTable::new(0, vec![(at, 1.0), (at + 0.01, 0.0)]).unwrap()
    }

    #[test]
    fn half_duplex_has_precedence() {
        let radio = RadioConfig::default();
        let s = RxSample { rx_transmitting: true, signal_dbm: 0.0, interference_mw: 0.0, uniform: 0.9 };
        assert_eq!(classify_rx(&s, &radio, &step_bler(0.0)), Outcome::HalfDuplex);
        assert!(!sci_decoded(&s, &radio, &step_bler(0.0)));
    }

    #[test]
    fn clean_strong_packet_is_received() {
        let radio = RadioConfig::default();
        let perfect = BlerTable::new(0, vec![(-100.0, 0.0)]).unwrap();
        let s = RxSample { rx_transmitting: false, signal_dbm: -60.0, interference_mw: 0.0, uniform: 0.0 };
        assert_eq!(classify_rx(&s, &radio, &perfect), Outcome::Ok);
    }

    #[test]
    fn outcome_chain() {
        let radio = RadioConfig::default();
        let bler = step_bler(10.0);
        let base = RxSample { rx_transmitting: false, signal_dbm: -91.0, interference_mw: 0.0, uniform: 0.5 };
        assert_eq!(classify_rx(&base, &radio, &bler), Outcome::Sensing);
        // sensed, but 7 dB SNR is below the BLER step
        let s = RxSample { signal_dbm: -88.0, ..base };
        assert_eq!(classify_rx(&s, &radio, &bler), Outcome::Propagation);
        // 30 dB SNR, equal-power interferer puts SINR near 0 dB
        let signal = -65.0;
        let s = RxSample { signal_dbm: signal, interference_mw: dbm_to_mw(signal), ..base };
        assert_eq!(classify_rx(&s, &radio, &bler), Outcome::Collision);
        assert!(sci_decoded(&s, &radio, &bler));
        let s = RxSample { interference_mw: dbm_to_mw(signal - 40.0), ..s };
        assert_eq!(classify_rx(&s, &radio, &bler), Outcome::Ok);
    }
}
