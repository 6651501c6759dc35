//! The `zladder` command line: each subcommand reads an experiment
//! configuration (file plus flag overrides), runs one part of the
//! verification program and writes its reports and plot data to the
//! output directory.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use zladder_core::grid::{build_g1, build_g2, grid_range};
use zladder_core::harness::report::{stamp, write_plot_csv, write_run};
use zladder_core::harness::{self, ExperimentConfig, Lab, VerificationReport, CALIBRATION_HEIGHTS};
use zladder_core::ladder::TabulatedLadder;

/// Window lengths of the `trend` command.
pub const TREND_HS: [f64; 3] = [1e2, 1e3, 1e4];
/// Heights of the `separation` command.
pub const SEPARATION_TS: [f64; 3] = [1e4, 1e5, 1e6];
/// Rows in the checkpoint table written by `ladder`.
const CHECKPOINT_ROWS: usize = 4096;

#[derive(Parser, Debug)]
#[command(name = "zladder", version, about = "Mean values of Z over generalized Gram interval systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical grid points in [T, T + H] to grid.csv.
    Grid(Common),
    /// G1(x) and G2(y) interval tables to g1.csv and g2.csv.
    Gsets(Common),
    /// Separation and ladder cross-check, plus a ladder checkpoint table.
    Ladder(Common),
    /// Direct integrals of Z over G1(x) and G2(y).
    Integrate(Common),
    /// Direct and mirrored mean values with substitution residuals.
    VerifyTheorem(Common),
    /// Union, difference and coverage of the interval systems.
    VerifyCorollaries(Common),
    /// Positive and negative areas over the mirrored sets (needs x = y).
    SignArea(Common),
    /// Integral over G1(x) across x, fitted by A sin x.
    ScanShape(ScanArgs),
    /// Deviation and area ratio across H in {100, 1000, 10000}.
    Trend(Common),
    /// Separation at T in {1e4, 1e5, 1e6}.
    Separation(Common),
    /// Fit the error-budget constant on the calibration heights.
    Calibrate(Common),
    /// Merge the run files in the output directory into report.csv.
    Report(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "T", value_name = "REAL")]
    t: Option<String>,
    #[arg(long, value_name = "REAL")]
    eps: Option<String>,
    /// Window length; `natural` uses T^(1/6+2eps).
    #[arg(long = "H", value_name = "REAL")]
    h: Option<String>,
    /// Half-width for G1, a real or an angle like pi/2.
    #[arg(long, value_name = "ANGLE")]
    x: Option<String>,
    /// Half-width for G2.
    #[arg(long, value_name = "ANGLE")]
    y: Option<String>,
    #[arg(long, value_name = "asymptotic|ode")]
    ladder: Option<String>,
    #[arg(long, value_name = "REAL")]
    rel_tol: Option<String>,
    #[arg(long, value_name = "REAL")]
    abs_tol: Option<String>,
    #[arg(long, value_name = "INT")]
    max_depth: Option<String>,
    #[arg(long, value_name = "INT")]
    correction_terms: Option<String>,
    #[arg(long, value_name = "plain|compensated")]
    summation: Option<String>,
    #[arg(long, value_name = "plain|mean-normalized")]
    ln_mode: Option<String>,
    #[arg(long, value_name = "REAL")]
    kappa: Option<String>,
    #[arg(long, value_name = "INT")]
    seed: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated x values (at least 8); default kπ/16, k = 1..8.
    #[arg(long, value_name = "LIST")]
    xs: Option<String>,
}

/// A problem with the invocation rather than with the computation.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

impl Common {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let pairs = [
            ("T", &self.t),
            ("eps", &self.eps),
            ("H", &self.h),
            ("x", &self.x),
            ("y", &self.y),
            ("ladder", &self.ladder),
            ("rel-tol", &self.rel_tol),
            ("abs-tol", &self.abs_tol),
            ("max-depth", &self.max_depth),
            ("correction-terms", &self.correction_terms),
            ("summation", &self.summation),
            ("ln-mode", &self.ln_mode),
            ("kappa", &self.kappa),
            ("seed", &self.seed),
            ("out", &self.out),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }

    fn config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)
                .map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        }
        for (k, v) in self.overrides() {
            cfg.set(k, v).map_err(|e| Usage(e.to_string()))?;
        }
        cfg.validate().map_err(|e| Usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn parse_xs(list: &str) -> anyhow::Result<Vec<f64>> {
    list.split(',')
        .map(|s| harness::config::parse_angle("xs", s).map_err(|e| Usage(e.to_string()).into()))
        .collect()
}

/// Stamp, print and store the reports of one command; true when no hard
/// verdict failed.
fn finish(cfg: &ExperimentConfig, command: &str, mut reports: Vec<VerificationReport>, start: Instant) -> anyhow::Result<bool> {
    stamp(&mut reports, start.elapsed().as_secs_f64());
    for r in &reports {
        println!("{}", r.summary());
    }
    let path = write_run(&cfg.output_dir, command, &reports)?;
    println!("wrote {}", path.display());
    Ok(!reports.iter().any(VerificationReport::is_hard_failure))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn grid(cfg: &ExperimentConfig) -> anyhow::Result<bool> {
    let pts = grid_range(&cfg.window()?)?;
    let mut s = String::from("nu,tau,t,residual\n");
    for p in &pts {
        writeln!(s, "{},{:?},{:?},{:e}", p.nu, p.tau, p.t, p.residual())?;
    }
    println!("{} grid points", pts.len());
    write_text(&cfg.output_dir.join("grid.csv"), &s)?;
    Ok(true)
}

fn gsets(cfg: &ExperimentConfig) -> anyhow::Result<bool> {
    let w = cfg.window()?;
    for (name, c) in [("g1", build_g1(&w, cfg.x)?), ("g2", build_g2(&w, cfg.y)?)] {
        println!("{name}: {} intervals, measure {}", c.len(), c.measure());
        let path = cfg.output_dir.join(format!("{name}.csv"));
        fs::create_dir_all(&cfg.output_dir)?;
        c.write_csv(BufWriter::new(fs::File::create(&path)?))?;
        println!("wrote {}", path.display());
    }
    Ok(true)
}

fn ladder(cfg: &ExperimentConfig, start: Instant) -> anyhow::Result<bool> {
    let reports = harness::ladder_checks(cfg)?;
    let lab = Lab::new(cfg)?;
    let m = lab.ladder_covering(lab.window.t(), lab.window.end())?;
    let table = TabulatedLadder::from_model(m.as_ref(), CHECKPOINT_ROWS)?;
    let path = cfg.output_dir.join(format!("ladder-{}.csv", m.kind()));
    fs::create_dir_all(&cfg.output_dir)?;
    table.write_csv(BufWriter::new(fs::File::create(&path)?))?;
    println!("wrote {} ({} rows, interpolation tolerance {:e})", path.display(), table.len(), table.tolerance());
    finish(cfg, "ladder", reports, start)
}

fn trend(cfg: &ExperimentConfig, start: Instant) -> anyhow::Result<bool> {
    let (dev, r1) = harness::theorem_trend(cfg, &TREND_HS)?;
    let (area, r2) = harness::area_trend(cfg, &TREND_HS)?;
    write_plot_csv(&cfg.output_dir.join("trend-deviation.csv"), &dev)?;
    write_plot_csv(&cfg.output_dir.join("trend-area.csv"), &area)?;
    finish(cfg, "trend", vec![r1, r2], start)
}

fn calibrate(cfg: &ExperimentConfig) -> anyhow::Result<bool> {
    let c = harness::calibrate(cfg, &CALIBRATION_HEIGHTS)?;
    let mut s = String::from("T,H,branch,deviation,scale,kappa\n");
    for r in &c.rows {
        writeln!(s, "{:?},{:?},{},{:?},{:?},{:?}", r.t, r.h, r.branch, r.deviation, r.scale, r.kappa)?;
    }
    write_text(&cfg.output_dir.join("calibration.csv"), &s)?;
    println!("kappa = {} (configured {})", c.kappa, cfg.kappa);
    Ok(true)
}

fn report(cfg: &ExperimentConfig) -> anyhow::Result<bool> {
    let path = cfg.output_dir.join("report.csv");
    let mut buf = Vec::new();
    let n = harness::report::merge_runs(&cfg.output_dir, &mut buf)?;
    write_text(&path, std::str::from_utf8(&buf)?)?;
    println!("{n} rows");
    Ok(true)
}

fn dispatch(command: Command) -> anyhow::Result<bool> {
    let start = Instant::now();
    match command {
        Command::Grid(c) => grid(&c.config()?),
        Command::Gsets(c) => gsets(&c.config()?),
        Command::Ladder(c) => ladder(&c.config()?, start),
        Command::Integrate(c) => {
            let cfg = c.config()?;
            finish(&cfg, "integrate", harness::integrate_sets(&cfg)?, start)
        }
        Command::VerifyTheorem(c) => {
            let cfg = c.config()?;
            finish(&cfg, "verify-theorem", harness::verify_theorem(&cfg)?, start)
        }
        Command::VerifyCorollaries(c) => {
            let cfg = c.config()?;
            finish(&cfg, "verify-corollaries", harness::verify_corollaries(&cfg)?, start)
        }
        Command::SignArea(c) => {
            let cfg = c.config()?;
            if cfg.x != cfg.y {
                return Err(Usage(format!("sign-area needs x = y, got x = {}, y = {}", cfg.x, cfg.y)).into());
            }
            finish(&cfg, "sign-area", harness::verify_sign_area(&cfg)?, start)
        }
        Command::ScanShape(a) => {
            let cfg = a.common.config()?;
            let xs = match &a.xs {
                Some(list) => parse_xs(list)?,
                None => harness::default_x_grid(),
            };
            if xs.len() < 8 {
                return Err(Usage(format!("--xs needs at least 8 values, got {}", xs.len())).into());
            }
            let (table, rows) = harness::scan_shape(&cfg, &xs)?;
            write_plot_csv(&cfg.output_dir.join("scan-shape.csv"), &table)?;
            finish(&cfg, "scan-shape", rows, start)
        }
        Command::Trend(c) => trend(&c.config()?, start),
        Command::Separation(c) => {
            let cfg = c.config()?;
            finish(&cfg, "separation", harness::separation_series(&cfg, &SEPARATION_TS)?, start)
        }
        Command::Calibrate(c) => calibrate(&c.config()?),
        Command::Report(c) => report(&c.config()?),
    }
}

/// Run the command line `argv` (program name first). Returns 0 when every
/// hard verdict passes, 1 on a failed verdict or computation error and 2
/// on a usage error.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) if e.is::<Usage>() => {
            eprintln!("usage error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
