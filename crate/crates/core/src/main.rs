use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cv2x_mode4::harness::{self, RunManifest, RunSummary};
use cv2x_mode4::Result;

#[derive(Parser)]
#[command(name = "cv2x", version, about = "C-V2X Mode 4 PDR model and SPS simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic PDR curves for every scenario.
    Analytic(CommonArgs),
    /// Simulated PDR curves, pooled over seeds.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write every reception event to a per-seed trace CSV.
        #[arg(long)]
        trace: bool,
    },
    /// Simulate, evaluate the model on the same bins, and report MADs.
    Compare(CommonArgs),
    /// Analytic curves followed by the comparison.
    Sweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Manifest file (TOML). Without it the default six-scenario highway matrix is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run with these seeds instead of the manifest's (repeatable).
    #[arg(long)]
    seed: Vec<u64>,
    /// Total simulated time per run including warmup, seconds.
    #[arg(long)]
    duration_s: Option<f64>,
    #[arg(long, env = "CV2X_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Distance bin width of simulated curves, meters.
    #[arg(long)]
    bins: Option<f64>,
}

impl CommonArgs {
    fn manifest(&self) -> Result<RunManifest> {
        let mut m = match &self.config {
            Some(path) => RunManifest::from_path(path)?,
            None => RunManifest::default(),
        };
        if !self.seed.is_empty() {
            m.seeds = self.seed.clone();
        }
        if let Some(d) = self.duration_s {
            m.sim.duration_s = d;
        }
        if let Some(dir) = &self.out_dir {
            m.out_dir = dir.clone();
        }
        if let Some(w) = self.bins {
            m.sim.bin_width_m = w;
        }
        m.validate()?;
        Ok(m)
    }
}

fn execute(cmd: &Command) -> Result<RunSummary> {
    match cmd {
        Command::Analytic(a) => harness::run_analytic(&a.manifest()?),
        Command::Simulate { common, trace } => harness::run_simulate(&common.manifest()?, *trace),
        Command::Compare(a) => harness::run_compare(&a.manifest()?),
        Command::Sweep(a) => harness::sweep(&a.manifest()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let summary = match execute(&cli.command) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    for f in &summary.files {
        println!("{}", f.display());
    }
    for (key, e) in &summary.failures {
        eprintln!("scenario {} failed: {e}", key.stem());
    }
    if summary.succeeded() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
