//! Command-line driver: runs named verification suites and emits
//! machine- and human-readable reports.

use clap::Parser;
use quatlab::report::{ReportFormat, SuiteConfig};
use quatlab::suites::{kernel_convergence_csv, run_suite, SUITES};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "quatlab",
    about = "Exact symbolic + numeric verification suites for quaternionic analysis",
    long_about = None
)]
struct Args {
    /// Suite to run: qlar-identities, action-tables, pairings, kernels,
    /// reproducing, intertwiners, clifford, or all.
    #[arg(long)]
    suite: Option<String>,

    /// Basis cutoff: largest doubled level 2l used by the sweeps.
    #[arg(long = "max-2l")]
    max_2l: Option<i32>,

    /// Numeric tolerance for the quadrature cross-checks.
    #[arg(long)]
    tol: Option<f64>,

    /// Quadrature nodes per angle.
    #[arg(long = "quad-nodes")]
    quad_nodes: Option<usize>,

    /// Random seed; identical seeds give byte-identical reports.
    #[arg(long)]
    seed: Option<u64>,

    /// Report format: json or md.
    #[arg(long)]
    report: Option<String>,

    /// Write the report to this path (otherwise stdout). When the suite
    /// covers the kernel expansions, a convergence table is written next
    /// to it with a .csv extension.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Configuration file with key=value lines (suite, max_2l, tol,
    /// quad_nodes, seed, report); command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Record wall time in the report (disabled by default so reports
    /// stay byte-identical across runs).
    #[arg(long)]
    timing: bool,
}

fn apply_config_file(path: &PathBuf, cfg: &mut SuiteConfig) -> quatlab::Result<()> {
    let text = std::fs::read_to_string(path)?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(quatlab::Error::ConfigInvalid(format!(
                "line {}: expected key=value",
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            quatlab::Error::ConfigInvalid(format!("line {}: bad {what}: {value}", lineno + 1))
        };
        match key {
            "suite" => cfg.suite = value.to_string(),
            "max_2l" => cfg.max_two_l = value.parse().map_err(|_| bad("integer"))?,
            "tol" => cfg.tolerance = value.parse().map_err(|_| bad("float"))?,
            "quad_nodes" => cfg.quad_nodes = value.parse().map_err(|_| bad("integer"))?,
            "seed" => cfg.random_seed = value.parse().map_err(|_| bad("integer"))?,
            "report" => cfg.report_format = ReportFormat::from_str(value)?,
            other => {
                return Err(quatlab::Error::ConfigInvalid(format!(
                    "line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    Ok(())
}

fn run(args: Args) -> quatlab::Result<bool> {
    let mut cfg = SuiteConfig::default();
    if let Some(path) = &args.config {
        apply_config_file(path, &mut cfg)?;
    }
    if let Some(v) = args.suite {
        cfg.suite = v;
    }
    if let Some(v) = args.max_2l {
        cfg.max_two_l = v;
    }
    if let Some(v) = args.tol {
        cfg.tolerance = v;
    }
    if let Some(v) = args.quad_nodes {
        cfg.quad_nodes = v;
    }
    if let Some(v) = args.seed {
        cfg.random_seed = v;
    }
    if let Some(v) = args.report {
        cfg.report_format = ReportFormat::from_str(&v)?;
    }
    if !SUITES.contains(&cfg.suite.as_str()) {
        return Err(quatlab::Error::UnknownSuite(cfg.suite.clone()));
    }
    let started = Instant::now();
    let mut report = run_suite(&cfg)?;
    if args.timing {
        report.wall_time_ms = Some(started.elapsed().as_millis() as u64);
    }
    for entry in &report.entries {
        eprintln!("[{}] {} ({:.3e})", entry.status, entry.id, entry.error);
    }
    eprintln!(
        "summary: pass = {}, fail = {}, skip = {}",
        report.summary.pass, report.summary.fail, report.summary.skip
    );
    let rendered = match cfg.report_format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Md => report.to_markdown(),
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, rendered)?;
            eprintln!("report written to {}", path.display());
            if matches!(cfg.suite.as_str(), "kernels" | "all") {
                let csv_path = path.with_extension("csv");
                std::fs::write(&csv_path, kernel_convergence_csv(&cfg)?)?;
                eprintln!("convergence table written to {}", csv_path.display());
            }
        }
        None => println!("{rendered}"),
    }
    Ok(report.has_failures())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
