//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use cv2x_mode4::analytic::{
    common_resources, delta_hd, p_s, AlphaCurve, AnalyticModel, PdrBreakdown, ResourceCounts, ScenarioConfig,
};
use cv2x_mode4::harness::{compare_scenario, run_compare, simulate_scenario, RunManifest, ScenarioComparison};
use cv2x_mode4::simulator::{Outcome, SimParams};
use rand::Rng;

type Check = Result<String, String>;

const MC_DRAWS: u64 = 1_000_000;

/// Every scenario of the three validation tables as (P_t, β, λ, S).
const SCENARIOS: [(f64, f64, u32, u32); 12] = [
    (20.0, 0.1, 10, 4),
    (20.0, 0.2, 10, 4),
    (20.0, 0.3, 10, 4),
    (23.0, 0.1, 10, 4),
    (23.0, 0.2, 10, 4),
    (23.0, 0.3, 10, 4),
    (20.0, 0.1, 20, 4),
    (20.0, 0.2, 20, 4),
    (20.0, 0.3, 20, 4),
    (20.0, 0.1, 10, 2),
    (20.0, 0.2, 10, 2),
    (20.0, 0.3, 10, 2),
];

fn config(s: (f64, f64, u32, u32)) -> ScenarioConfig {
    ScenarioConfig::new(s.1, s.0, s.2, s.3).unwrap()
}

fn label(s: (f64, f64, u32, u32)) -> String {
    format!("P_t={} β={} λ={} S={}", s.0, s.1, s.2, s.3)
}

struct Curves {
    grid: Vec<f64>,
    models: Vec<AnalyticModel>,
    curves: Vec<Vec<PdrBreakdown>>,
}

fn analytic_curves() -> Curves {
    let grid: Vec<f64> = (0..=100).map(|i| 10.0 * i as f64).collect();
    let models: Vec<AnalyticModel> = SCENARIOS.iter().map(|&s| AnalyticModel::new(&config(s)).unwrap()).collect();
    let curves = models.iter().map(|m| m.pdr_curve(&grid).unwrap()).collect();
    Curves { grid, models, curves }
}

fn half_duplex() -> Check {
    let mut detail = Vec::new();
    for (lambda, exact) in [(10, 0.010), (20, 0.020)] {
        let analytic = delta_hd(lambda as f64).map_err(|e| e.to_string())?;
        if analytic != exact {
            return Err(format!("analytic δ_HD({lambda} Hz) = {analytic}, expected {exact}"));
        }
        let cfg = ScenarioConfig::new(0.1, 20.0, lambda, 4).unwrap();
        let p = SimParams { duration_s: 3.0, warmup_s: 1.0, ..Default::default() };
        let stats = simulate_scenario(&cfg, &p, &[1], None).map_err(|e| e.to_string())?;
        let attempts = stats.total_attempts();
        let sim = stats.pooled_share(Outcome::HalfDuplex).unwrap_or(f64::NAN);
        if attempts < 100_000 {
            return Err(format!("only {attempts} attempts at {lambda} Hz"));
        }
        if (sim - exact).abs() > 0.002 {
            return Err(format!("simulated δ̂_HD at {lambda} Hz = {sim:.4} over {attempts} attempts"));
        }
        detail.push(format!("{lambda} Hz: analytic {analytic}, simulated {sim:.4} ({attempts} attempts)"));
    }
    Ok(detail.join("; "))
}

fn appendix_identity() -> Check {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let d: [f64; 4] = [r.random(), r.random(), r.random(), r.random()];
        let b = PdrBreakdown::compose(0.0, d[0], d[1], d[2], d[3]);
        let product = (1.0 - d[0]) * (1.0 - d[1]) * (1.0 - d[2]) * (1.0 - d[3]);
        worst = worst.max((product - (1.0 - b.loss_sum())).abs()).max((product - b.pdr).abs());
    }
    if worst <= 1e-12 { Ok(format!("max deviation {worst:.1e} over 10^4 draws")) } else { Err(format!("deviation {worst:e}")) }
}

fn normalization(curves: &Curves, compared: &[(usize, ScenarioComparison)]) -> Check {
    let mut count = 0;
    let mut check = |b: &PdrBreakdown| -> Result<(), String> {
        count += 1;
        let values = [b.pdr, b.hd_norm, b.sen_norm, b.pro_norm, b.col_norm, b.delta_hd, b.delta_sen, b.delta_pro, b.delta_col];
        if (b.pdr + b.loss_sum() - 1.0).abs() > 1e-9 || values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(format!("bad breakdown at {} m: {b:?}", b.distance_m));
        }
        Ok(())
    };
    for c in &curves.curves {
        c.iter().try_for_each(&mut check)?;
    }
    for (i, cmp) in compared {
        let d: Vec<f64> = cmp.analytic.iter().map(|p| p.distance_m).collect();
        curves.models[*i].pdr_curve(&d).unwrap().iter().try_for_each(&mut check)?;
    }
    Ok(format!("{count} breakdowns"))
}

fn cbr_reproduction(curves: &Curves) -> Check {
    let targets = [0.23, 0.44, 0.62, 0.27, 0.51, 0.69];
    let cbr: Vec<f64> = curves.models[..6].iter().map(|m| m.cbr()).collect();
    for (i, (&c, &t)) in cbr.iter().zip(&targets).enumerate() {
        if (c - t).abs() > 0.08 {
            return Err(format!("{}: CBR {c:.3} vs {t}", label(SCENARIOS[i])));
        }
    }
    for p in 0..2 {
        let row = &cbr[3 * p..3 * p + 3];
        if !(row[0] <= row[1] && row[1] <= row[2]) {
            return Err(format!("CBR not monotone in β: {row:?}"));
        }
    }
    if (0..3).any(|i| cbr[i] > cbr[i + 3]) {
        return Err("CBR not monotone in P_t".into());
    }
    Ok(format!("CBR {}", cbr.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join("/")))
}

fn desk_scale_agreement(curves: &Curves) -> (Check, Vec<(usize, ScenarioComparison)>) {
    let params = SimParams::default();
    let mut compared = Vec::new();
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for (i, &s) in SCENARIOS.iter().enumerate() {
        let model = &curves.models[i];
        if model.cbr() >= 0.8 {
            lines.push(format!("{}: CBR {:.2} ≥ 0.8, not bounded", label(s), model.cbr()));
            continue;
        }
        let start = Instant::now();
        let cfg = config(s);
        let outcome = simulate_scenario(&cfg, &params, &[1, 2, 3], None).and_then(|st| compare_scenario(&cfg, &st));
        match outcome {
            Ok(c) => {
                let line = format!(
                    "{}: MAD(PDR) {:.2}% (HD {:.2} SEN {:.2} PRO {:.2} COL {:.2}), CBR {:.3}/{:.3}, {:.0} s",
                    label(s),
                    c.mad.pdr,
                    c.mad.hd,
                    c.mad.sen,
                    c.mad.pro,
                    c.mad.col,
                    c.cbr_analytic,
                    c.cbr_sim.unwrap_or(f64::NAN),
                    start.elapsed().as_secs_f64()
                );
                println!("      {line}");
                if c.mad.pdr > 5.0 {
                    failed.push(line.clone());
                }
                lines.push(line);
                compared.push((i, c));
            }
            Err(e) => failed.push(format!("{}: {e}", label(s))),
        }
    }
    let n = compared.len();
    let check = if failed.is_empty() { Ok(format!("{n} scenarios with MAD(PDR) ≤ 5%")) } else { Err(failed.join("; ")) };
    (check, compared)
}

fn mc_oracles() -> Check {
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let link = random_link(&mut r);
        let d = r.random_range(100.0..700.0);
        let d_ir = r.random_range(50.0..700.0);
        let checks = [
            ("δ_SEN", link.channel.delta_sen(d), mc_delta_sen(&link.channel, d, MC_DRAWS, &mut r)),
            ("δ_PRO", link.delta_pro(d), mc_delta_pro(&link, d, MC_DRAWS, &mut r)),
            ("p_INT", link.p_int(d, d_ir), mc_p_int(&link, d, d_ir, MC_DRAWS, &mut r)),
        ];
        for (name, exact, est) in checks {
            worst = worst.max(est.z(exact).abs());
            if !est.agrees(exact, 3.0) {
                return Err(format!("config {i}, {name}: model {exact:.6}, sampled {:.6} ± {:.1e}", est.mean, est.se));
            }
        }
    }
    Ok(format!("5 configs × 3 quantities, worst |z| = {worst:.2}"))
}

fn toy_p_sim() -> Check {
    let mut r = rng(7);
    let mut detail = Vec::new();
    // (N_E, overlap ratio) giving integer C_A
    for (n_e, overlap) in [(0.0, 0.0), (10.0, 0.0), (10.0, 1.0), (8.0, (6.0 - 3.2) / 4.8)] {
        let counts = ResourceCounts { n_total: 20, n_excluded: n_e, n_assignable: 20.0 - n_e, n_candidate: 4, tau: 10.0 };
        let c = common_resources(&counts, overlap, 1.0, 1.0, false);
        let analytic = p_s(counts.tau, 0.0) * c.c_candidate / 16.0;
        let (n_a, c_a) = (20 - n_e as usize, c.c_assignable.round() as usize);
        let exact = toy_same_resource_exact(20, n_a, c_a, 4);
        let est = toy_same_resource_mc(20, n_a, c_a, 4, MC_DRAWS, &mut r);
        if (analytic - exact).abs() > 1e-12 || !est.agrees(analytic, 3.0) {
            return Err(format!("C_A = {c_a}: model {analytic}, enumerated {exact}, sampled {:?}", est));
        }
        detail.push(format!("C_A={c_a}: {analytic:.5}"));
    }
    Ok(detail.join(", "))
}

fn interior_max(values: &[f64]) -> Option<usize> {
    let (i, _) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    (i > 0 && i + 1 < values.len()).then_some(i)
}

fn collision_peak(curves: &Curves, compared: &[(usize, ScenarioComparison)]) -> Check {
    let analytic: Vec<f64> = curves.curves[0].iter().map(|b| b.col_norm).collect();
    let a = interior_max(&analytic).ok_or("analytic δ̂_COL peaks at an end of the grid")?;
    let (_, cmp) = compared.iter().find(|(i, _)| *i == 0).ok_or("no simulation of P_t=20 β=0.1")?;
    let sim: Vec<f64> = cmp.sim.iter().map(|p| p.col).collect();
    let s = interior_max(&sim).ok_or("simulated δ̂_COL peaks at an end of the bins")?;
    Ok(format!("analytic peak at {} m, simulated peak at {:.0} m", curves.grid[a], cmp.sim[s].distance_m))
}

fn monotonicity(curves: &Curves) -> Check {
    for (i, c) in curves.curves.iter().enumerate() {
        for w in c.windows(2) {
            if w[1].sen_norm < w[0].sen_norm - 1e-12 || w[1].pdr > w[0].pdr + 1e-12 {
                return Err(format!("{} between {} and {} m", label(SCENARIOS[i]), w[0].distance_m, w[1].distance_m));
            }
        }
        let m = &curves.models[i];
        if let Some(d) = (0..=3000).map(|d| d as f64).find(|&d| m.r_psr(d) > m.r0()) {
            return Err(format!("{}: R_PSR({d}) > R_PSR(0)", label(SCENARIOS[i])));
        }
    }
    let alpha = AlphaCurve::default();
    for (cbr, expected) in [(0.0, 0.0), (0.2, 0.0), (0.45, 0.5), (0.7, 1.0), (1.0, 1.0)] {
        let got = alpha.eval(cbr);
        // 0.45 is not a binary fraction; allow one rounding step there
        let ok = if cbr == 0.45 { (got - expected).abs() <= f64::EPSILON } else { got == expected };
        if !ok {
            return Err(format!("α({cbr}) = {got}"));
        }
    }
    Ok(format!("{} curves, R_PSR and α table", curves.curves.len()))
}

fn determinism() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let toml = "beta = [0.1, 0.2]\ntx_power_dbm = 20\nseeds = [1, 2]\n[simulation]\nduration_s = 5\n";
    let run = |dir: &std::path::Path| {
        let mut m = RunManifest::from_toml_str(toml).unwrap();
        m.out_dir = dir.to_path_buf();
        run_compare(&m).map_err(|e| e.to_string())
    };
    let (sa, sb) = (run(a.path())?, run(b.path())?);
    if sa.files.len() != sb.files.len() || !sa.succeeded() {
        return Err("runs produced different file sets".into());
    }
    for (fa, fb) in sa.files.iter().zip(&sb.files) {
        if fs::read(fa).map_err(|e| e.to_string())? != fs::read(fb).map_err(|e| e.to_string())? {
            return Err(format!("{} differs", fa.display()));
        }
    }
    Ok(format!("{} CSV files identical", sa.files.len()))
}

fn report(id: u32, name: &str, start: Instant, check: &Check) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match check {
        Ok(d) => println!("PASS [{id:>2}] {name}: {d} ({secs:.1} s)"),
        Err(d) => println!("FAIL [{id:>2}] {name}: {d} ({secs:.1} s)"),
    }
    check.is_ok()
}

fn main() -> ExitCode {
    let mut ok = true;

    let t = Instant::now();
    ok &= report(1, "half-duplex exactness", t, &half_duplex());
    let t = Instant::now();
    ok &= report(2, "product/sum identity", t, &appendix_identity());

    let t = Instant::now();
    let curves = analytic_curves();
    let build = t.elapsed();
    let t = Instant::now();
    ok &= report(4, "CBR reproduction", t, &cbr_reproduction(&curves));
    let t = Instant::now();
    ok &= report(9, "monotonicity suite", t, &monotonicity(&curves));

    let t = Instant::now();
    let (agreement, compared) = desk_scale_agreement(&curves);
    ok &= report(5, "model vs simulator at desk scale", t, &agreement);
    let t = Instant::now();
    ok &= report(3, "normalization", t, &normalization(&curves, &compared));
    let t = Instant::now();
    ok &= report(8, "interior collision peak", t, &collision_peak(&curves, &compared));

    let t = Instant::now();
    ok &= report(6, "Monte-Carlo link oracles", t, &mc_oracles());
    let t = Instant::now();
    ok &= report(7, "same-resource brute force", t, &toy_p_sim());
    let t = Instant::now();
    ok &= report(10, "compare determinism", t, &determinism());

    println!("(analytic curves for {} scenarios built in {:.1} s)", SCENARIOS.len(), build.as_secs_f64());
    if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
