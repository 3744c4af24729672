use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use cmalab_cli::{export_csv, run_with_fields, CliError, Command, RunConfig, SeedConfig};

/// Run construction and verification pipelines and report pass/fail per check.
#[derive(Debug, Parser)]
#[command(name = "cmalab", version)]
struct Args {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pipeline to run, overriding the config.
    #[arg(long, value_enum)]
    command: Option<Command>,
    /// Directory receiving report.json and csv/.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Named seed set: standard, polynomial, periodic, fault-b-wbar.
    #[arg(long)]
    seed_preset: Option<String>,
    /// Stopping tolerance of the grid solvers.
    #[arg(long)]
    tol: Option<f64>,
    /// Truncation order of the series constructions.
    #[arg(long)]
    order: Option<usize>,
    /// Finest lattice spacing of the grid pipelines.
    #[arg(long)]
    grid_h: Option<f64>,
}

fn configure(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(c) = args.command {
        cfg.command = c;
    }
    if let Some(name) = &args.seed_preset {
        cfg.seeds = SeedConfig::preset(name)?;
    }
    if let Some(t) = args.tol {
        cfg.numeric.solver_tol = t;
    }
    if let Some(n) = args.order {
        cfg.numeric.order = n;
    }
    if let Some(h) = args.grid_h {
        cfg.numeric.grid_h = h;
    }
    if let Some(dir) = &args.out {
        cfg.output.report = Some(dir.join("report.json"));
        cfg.output.csv_dir = Some(dir.join("csv"));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match configure(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cmalab: {e}");
            return ExitCode::from(2);
        }
    };
    let (report, fields) = match run_with_fields(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cmalab: {e}");
            return ExitCode::from(2);
        }
    };
    let json = report.to_json();
    let outputs = match &cfg.output.report {
        Some(path) => write(path, &json),
        None => {
            println!("{json}");
            Ok(())
        }
    }
    .and_then(|_| match &cfg.output.csv_dir {
        Some(dir) => export_csv(&fields, dir).map(|_| ()),
        None => Ok(()),
    });
    if let Err(e) = outputs {
        eprintln!("cmalab: {e}");
        return ExitCode::from(2);
    }
    for r in &report.records {
        let measured = r.measured.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
        eprintln!(
            "[{}] {}: {measured} (bound {:.1e})",
            if r.pass { "pass" } else { "FAIL" },
            r.name,
            r.threshold
        );
    }
    eprintln!("overall: {}", if report.overall_pass { "pass" } else { "FAIL" });
    ExitCode::from(report.exit_code())
}
