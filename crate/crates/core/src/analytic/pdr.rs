/// PDR at one distance with its four-way loss decomposition.
///
/// Raw deltas are conditional probabilities (each given that the earlier
/// causes did not occur); the `*_norm` fields are their unconditional
/// shares, so that `pdr` plus the four shares is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdrBreakdown {
    pub distance_m: f64,
    pub pdr: f64,
    pub hd_norm: f64,
    pub sen_norm: f64,
    pub pro_norm: f64,
    pub col_norm: f64,
    pub delta_hd: f64,
    pub delta_sen: f64,
    pub delta_pro: f64,
    pub delta_col: f64,
    /// No packet from this distance is received above the sensing threshold.
    pub sensing_dominated: bool,
}

impl PdrBreakdown {
    pub fn compose(distance_m: f64, delta_hd: f64, delta_sen: f64, delta_pro: f64, delta_col: f64) -> Self {
        let hd = unit(delta_hd);
        let sen = unit(delta_sen);
        let pro = unit(delta_pro);
        let col = unit(delta_col);
        let after_hd = 1.0 - hd;
        let after_sen = after_hd * (1.0 - sen);
        let after_pro = after_sen * (1.0 - pro);
        Self {
            distance_m,
            pdr: after_pro * (1.0 - col),
            hd_norm: hd,
            sen_norm: after_hd * sen,
            pro_norm: after_sen * pro,
            col_norm: after_pro * col,
            delta_hd: hd,
            delta_sen: sen,
            delta_pro: pro,
            delta_col: col,
            sensing_dominated: false,
        }
    }

    pub fn loss_sum(&self) -> f64 {
        self.hd_norm + self.sen_norm + self.pro_norm + self.col_norm
    }
}

/// Clamp to [0, 1], mapping -0.0 and NaN to 0.
fn unit(p: f64) -> f64 {
    if p > 0.0 { p.min(1.0) } else { 0.0 }
}

/// Loss from several independent interferers, each with its own probability
/// of destroying the packet.
pub fn combine_interferers(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut log_survive = 0.0;
    for t in terms {
        let t = t.clamp(0.0, 1.0);
        if t >= 1.0 {
            return 1.0;
        }
        log_survive += (-t).ln_1p();
    }
    -log_survive.exp_m1()
}
