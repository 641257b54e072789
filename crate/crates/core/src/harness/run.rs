use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::manifest::{RunManifest, ScenarioKey};
use crate::analytic::{AnalyticModel, PdrBreakdown, ScenarioConfig};
use crate::error::{Error, Result};
use crate::simulator::{self, Outcome, SimParams, SimStats, TraceWriter};

/// Analytic CBR at or above which the model is outside its recommended range.
pub const RECOMMENDED_MAX_CBR: f64 = 0.8;

pub const ABOVE_RECOMMENDED_CBR: &str = "above recommended CBR";

/// Mean absolute deviation of two probability curves, in percent.
pub fn mad(m_s: &[f64], m_a: &[f64]) -> Result<f64> {
    if m_s.len() != m_a.len() {
        return Err(Error::Usage(format!("MAD of vectors of lengths {} and {}", m_s.len(), m_a.len())));
    }
    if m_s.is_empty() {
        return Err(Error::Usage("MAD of empty vectors".into()));
    }
    let sum: f64 = m_s.iter().zip(m_a).map(|(s, a)| (s - a).abs()).sum();
    Ok(100.0 * sum / m_s.len() as f64)
}

/// PDR and normalized loss shares at one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub distance_m: f64,
    pub pdr: f64,
    pub hd: f64,
    pub sen: f64,
    pub pro: f64,
    pub col: f64,
}

impl From<&PdrBreakdown> for CurvePoint {
    fn from(b: &PdrBreakdown) -> Self {
        Self {
            distance_m: b.distance_m,
            pdr: b.pdr,
            hd: b.hd_norm,
            sen: b.sen_norm,
            pro: b.pro_norm,
            col: b.col_norm,
        }
    }
}

/// Simulated curve: one point per non-empty bin, placed at the mean
/// distance of the receptions counted in it.
pub fn sim_curve(stats: &SimStats) -> Vec<CurvePoint> {
    stats
        .bins
        .iter()
        .filter_map(|b| {
            let share = |o| b.share(o).unwrap_or(0.0);
            Some(CurvePoint {
                distance_m: b.mean_distance()?,
                pdr: b.pdr()?,
                hd: share(Outcome::HalfDuplex),
                sen: share(Outcome::Sensing),
                pro: share(Outcome::Propagation),
                col: share(Outcome::Collision),
            })
        })
        .collect()
}

/// MAD of each curve component, percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMad {
    pub pdr: f64,
    pub hd: f64,
    pub sen: f64,
    pub pro: f64,
    pub col: f64,
}

pub fn curve_mad(sim: &[CurvePoint], analytic: &[CurvePoint]) -> Result<CurveMad> {
    let col = |curve: &[CurvePoint], f: fn(&CurvePoint) -> f64| curve.iter().map(f).collect::<Vec<_>>();
    let m = |f: fn(&CurvePoint) -> f64| mad(&col(sim, f), &col(analytic, f));
    Ok(CurveMad {
        pdr: m(|p| p.pdr)?,
        hd: m(|p| p.hd)?,
        sen: m(|p| p.sen)?,
        pro: m(|p| p.pro)?,
        col: m(|p| p.col)?,
    })
}

/// Simulated and analytic curves of one scenario on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioComparison {
    pub sim: Vec<CurvePoint>,
    pub analytic: Vec<CurvePoint>,
    pub attempts: Vec<u64>,
    pub mad: CurveMad,
    pub cbr_analytic: f64,
    pub cbr_sim: Option<f64>,
}

impl ScenarioComparison {
    pub fn above_recommended_cbr(&self) -> bool {
        self.cbr_analytic >= RECOMMENDED_MAX_CBR
    }
}

/// Evaluates the analytic model where the simulator has samples and
/// computes the MAD of every component.
pub fn compare_scenario(cfg: &ScenarioConfig, stats: &SimStats) -> Result<ScenarioComparison> {
    let model = AnalyticModel::new(cfg)?;
    let sim = sim_curve(stats);
    if sim.is_empty() {
        return Err(Error::Model("simulation produced no receptions within range".into()));
    }
    let distances: Vec<f64> = sim.iter().map(|p| p.distance_m).collect();
    let analytic: Vec<CurvePoint> = model.pdr_curve(&distances)?.iter().map(CurvePoint::from).collect();
    let attempts = stats.bins.iter().map(|b| b.attempts()).filter(|&n| n > 0).collect();
    let mad = curve_mad(&sim, &analytic)?;
    Ok(ScenarioComparison { sim, analytic, attempts, mad, cbr_analytic: model.cbr(), cbr_sim: stats.mean_cbr() })
}

/// Runs one scenario once per seed and pools the counts. With `trace`
/// set, each seed's events go to `<dir>/<stem>_seed<k>_trace.csv`.
pub fn simulate_scenario(
    cfg: &ScenarioConfig,
    params: &SimParams,
    seeds: &[u64],
    trace: Option<(&Path, &str)>,
) -> Result<SimStats> {
    if seeds.is_empty() {
        return Err(Error::Usage("simulation runs need at least one seed".into()));
    }
    let mut pooled = SimStats::new(params.bin_width_m, params.bin_count());
    for &seed in seeds {
        let stats = match trace {
            None => simulator::run(cfg, params, seed)?,
            Some((dir, stem)) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("{stem}_seed{seed}_trace.csv"));
                let tmp = tmp_path(&path);
                let mut writer = TraceWriter::new(BufWriter::new(File::create(&tmp)?))?;
                let stats = simulator::run_with_sink(cfg, params, seed, &mut writer)?;
                writer.finish()?.into_inner().map_err(|e| e.into_error())?;
                fs::rename(&tmp, &path)?;
                stats
            }
        };
        pooled.merge(&stats);
    }
    Ok(pooled)
}

/// One row of the comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub key: ScenarioKey,
    pub outcome: std::result::Result<ScenarioComparison, String>,
}

/// Per-scenario MADs and CBRs, one row per manifest scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ReportRow>,
}

impl ComparisonReport {
    pub const HEADER: [&'static str; 12] = [
        "p_t",
        "beta",
        "mad_pdr",
        "mad_hd",
        "mad_sen",
        "mad_pro",
        "mad_col",
        "cbr_analytic",
        "cbr_sim",
        "lambda_hz",
        "subchannels",
        "note",
    ];

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::HEADER)?;
        for row in &self.rows {
            let k = &row.key;
            let mut rec = vec![k.tx_power_dbm.to_string(), k.beta.to_string()];
            match &row.outcome {
                Ok(c) => {
                    for v in [c.mad.pdr, c.mad.hd, c.mad.sen, c.mad.pro, c.mad.col, c.cbr_analytic] {
                        rec.push(format!("{v:.4}"));
                    }
                    rec.push(c.cbr_sim.map(|v| format!("{v:.4}")).unwrap_or_default());
                }
                Err(_) => rec.extend(std::iter::repeat_n(String::new(), 7)),
            }
            rec.push(k.lambda_hz.to_string());
            rec.push(k.subchannels.to_string());
            rec.push(match &row.outcome {
                Ok(c) if c.above_recommended_cbr() => ABOVE_RECOMMENDED_CBR.to_string(),
                Ok(_) => String::new(),
                Err(e) => format!("failed: {e}"),
            });
            w.write_record(&rec)?;
        }
        finish_csv(w)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&ScenarioKey, &str)> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().err().map(|e| (&r.key, e.as_str())))
    }
}

/// What a harness command produced.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub failures: Vec<(ScenarioKey, String)>,
    pub warnings: Vec<String>,
    pub report: Option<ComparisonReport>,
}

impl RunSummary {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }

    fn absorb(&mut self, other: RunSummary) {
        self.files.extend(other.files);
        self.failures.extend(other.failures);
        self.warnings.extend(other.warnings);
        if other.report.is_some() {
            self.report = other.report;
        }
    }
}

fn empty_matrix(m: &RunManifest) -> RunSummary {
    let mut s = RunSummary::default();
    if m.scenarios.is_empty() {
        s.warnings.push("manifest has no scenarios; nothing to do".into());
    }
    s
}

/// Writes `analytic/<stem>.csv` with `distance_m,pdr,hd,sen,pro,col,cbr`
/// for every scenario.
pub fn run_analytic(m: &RunManifest) -> Result<RunSummary> {
    m.validate()?;
    let mut summary = empty_matrix(m);
    let grid = m.distance_grid();
    let dir = m.out_dir.join("analytic");
    for key in &m.scenarios {
        let curve = m.resolve(key).and_then(|cfg| {
            let model = AnalyticModel::new(&cfg)?;
            Ok((model.pdr_curve(&grid)?, model.cbr()))
        });
        match curve {
            Ok((curve, cbr)) => {
                let path = dir.join(format!("{}.csv", key.stem()));
                write_atomic(&path, &analytic_csv(&curve, cbr)?)?;
                summary.files.push(path);
            }
            Err(e) => summary.failures.push((*key, e.to_string())),
        }
    }
    Ok(summary)
}

pub fn analytic_csv(curve: &[PdrBreakdown], cbr: f64) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["distance_m", "pdr", "hd", "sen", "pro", "col", "cbr"])?;
    for b in curve {
        w.write_record(
            [b.distance_m, b.pdr, b.hd_norm, b.sen_norm, b.pro_norm, b.col_norm, cbr].map(|v| v.to_string()),
        )?;
    }
    finish_csv(w)
}

/// Writes `simulate/<stem>.csv` with the seed-pooled simulated curve.
pub fn run_simulate(m: &RunManifest, trace: bool) -> Result<RunSummary> {
    m.validate()?;
    let seeds = m.sim_seeds()?;
    let mut summary = empty_matrix(m);
    let dir = m.out_dir.join("simulate");
    for key in &m.scenarios {
        let stem = key.stem();
        let stats = m.resolve(key).and_then(|cfg| {
            simulate_scenario(&cfg, &m.sim, seeds, trace.then_some((dir.as_path(), stem.as_str())))
        });
        match stats {
            Ok(stats) => {
                let path = dir.join(format!("{stem}.csv"));
                write_atomic(&path, &sim_csv(&stats)?)?;
                summary.files.push(path);
            }
            Err(e) => summary.failures.push((*key, e.to_string())),
        }
    }
    Ok(summary)
}

/// Columns `bin_center_m,mean_distance_m,attempts,pdr,hd,sen,pro,col,cbr`;
/// empty bins have empty value cells.
pub fn sim_csv(stats: &SimStats) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bin_center_m", "mean_distance_m", "attempts", "pdr", "hd", "sen", "pro", "col", "cbr"])?;
    let cbr = stats.mean_cbr().map(|v| v.to_string()).unwrap_or_default();
    for (i, b) in stats.bins.iter().enumerate() {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let mut rec = vec![stats.bin_center(i).to_string(), opt(b.mean_distance()), b.attempts().to_string()];
        for o in [Outcome::Ok, Outcome::HalfDuplex, Outcome::Sensing, Outcome::Propagation, Outcome::Collision] {
            rec.push(opt(b.share(o)));
        }
        rec.push(cbr.clone());
        w.write_record(&rec)?;
    }
    finish_csv(w)
}

/// Simulates every scenario, compares it with the model, and writes
/// `compare/<stem>.csv` per scenario plus `report.csv`.
pub fn run_compare(m: &RunManifest) -> Result<RunSummary> {
    m.validate()?;
    let seeds = m.sim_seeds()?;
    let mut summary = empty_matrix(m);
    let dir = m.out_dir.join("compare");
    let mut report = ComparisonReport::default();
    for key in &m.scenarios {
        let outcome = m.resolve(key).and_then(|cfg| {
            let stats = simulate_scenario(&cfg, &m.sim, seeds, None)?;
            compare_scenario(&cfg, &stats)
        });
        match &outcome {
            Ok(c) => {
                let path = dir.join(format!("{}.csv", key.stem()));
                write_atomic(&path, &comparison_csv(c)?)?;
                summary.files.push(path);
                if c.above_recommended_cbr() {
                    summary.warnings.push(format!(
                        "{}: analytic CBR {:.2} is {ABOVE_RECOMMENDED_CBR}",
                        key.stem(),
                        c.cbr_analytic
                    ));
                }
            }
            Err(e) => summary.failures.push((*key, e.to_string())),
        }
        report.rows.push(ReportRow { key: *key, outcome: outcome.map_err(|e| e.to_string()) });
    }
    let path = m.out_dir.join("report.csv");
    write_atomic(&path, &report.to_csv()?)?;
    summary.files.push(path);
    summary.report = Some(report);
    Ok(summary)
}

pub fn comparison_csv(c: &ScenarioComparison) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "distance_m",
        "attempts",
        "pdr_sim",
        "pdr_analytic",
        "hd_sim",
        "hd_analytic",
        "sen_sim",
        "sen_analytic",
        "pro_sim",
        "pro_analytic",
        "col_sim",
        "col_analytic",
    ])?;
    for ((s, a), n) in c.sim.iter().zip(&c.analytic).zip(&c.attempts) {
        let mut rec = vec![s.distance_m.to_string(), n.to_string()];
        for (x, y) in [(s.pdr, a.pdr), (s.hd, a.hd), (s.sen, a.sen), (s.pro, a.pro), (s.col, a.col)] {
            rec.push(x.to_string());
            rec.push(y.to_string());
        }
        w.write_record(&rec)?;
    }
    finish_csv(w)
}

/// Analytic curves followed by the full comparison.
pub fn sweep(m: &RunManifest) -> Result<RunSummary> {
    let mut summary = run_analytic(m)?;
    summary.absorb(run_compare(m)?);
    Ok(summary)
}

fn finish_csv(mut w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.flush()?;
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
