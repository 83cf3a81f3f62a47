//! Config-driven experiment runner.
//!
//! Exit codes: 0 success, 1 config error, 2 runtime numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gimdre_cli::config::{ExperimentConfig, ExperimentSpec};
use gimdre_cli::runner::{run_experiment, TableFormat};

const OUT_DIR_ENV: &str = "GIMDRE_OUT_DIR";

#[derive(Parser)]
#[command(name = "gimdre", version, about = "Density-ratio estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment config file (JSON).
    config: PathBuf,
    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel trials (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (falls back to the config, then $GIMDRE_OUT_DIR,
    /// then ./results).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Per-trial table format.
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run any experiment kind from a config file.
    Run(RunArgs),
    /// Validate a config file and report violations.
    Validate { config: PathBuf },
    /// Run an ess_sweep config.
    SweepEss(RunArgs),
    /// Run a two_sample config.
    TwoSample(RunArgs),
    /// Run a geodesic_trace config.
    TraceGeodesic(RunArgs),
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: unreadable: {e}", config.display());
                    return Ok(ExitCode::from(1));
                }
            };
            match ExperimentConfig::from_str(&text) {
                Err(msg) => {
                    // serde_json errors carry line/column anchors
                    eprintln!("{}: {msg}", config.display());
                    Ok(ExitCode::from(1))
                }
                Ok(cfg) => {
                    let violations = cfg.validate();
                    if violations.is_empty() {
                        println!("ok");
                        Ok(ExitCode::SUCCESS)
                    } else {
                        for v in &violations {
                            eprintln!("{v}");
                        }
                        Ok(ExitCode::from(1))
                    }
                }
            }
        }
        Command::Run(args) => run_kind(args, None),
        Command::SweepEss(args) => run_kind(args, Some("ess_sweep")),
        Command::TwoSample(args) => run_kind(args, Some("two_sample")),
        Command::TraceGeodesic(args) => run_kind(args, Some("geodesic_trace")),
    }
}

fn run_kind(args: RunArgs, expect_kind: Option<&str>) -> anyhow::Result<ExitCode> {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: unreadable: {e}", args.config.display());
            return Ok(ExitCode::from(1));
        }
    };
    let mut cfg = match ExperimentConfig::from_str(&text) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{}: {msg}", args.config.display());
            return Ok(ExitCode::from(1));
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let violations = cfg.validate();
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("{v}");
        }
        return Ok(ExitCode::from(1));
    }
    if let Some(kind) = expect_kind {
        let actual = kind_name(&cfg.experiment);
        if actual != kind {
            eprintln!("config kind is \"{actual}\", expected \"{kind}\"");
            return Ok(ExitCode::from(1));
        }
    }
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let out_dir = args
        .out_dir
        .or_else(|| cfg.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    let format = if args.format == "json" {
        TableFormat::Json
    } else {
        TableFormat::Csv
    };
    let outcome = run_experiment(&cfg, &out_dir, format)?;
    for f in &outcome.files {
        println!("{}", outcome.out_dir.join(f).display());
    }
    Ok(ExitCode::SUCCESS)
}

fn kind_name(spec: &ExperimentSpec) -> &'static str {
    match spec {
        ExperimentSpec::MaeTable { .. } => "mae_table",
        ExperimentSpec::AlphaSweep { .. } => "alpha_sweep",
        ExperimentSpec::SampleSizeSweep { .. } => "sample_size_sweep",
        ExperimentSpec::DimensionSweep { .. } => "dimension_sweep",
        ExperimentSpec::EssSweep { .. } => "ess_sweep",
        ExperimentSpec::GeodesicTrace { .. } => "geodesic_trace",
        ExperimentSpec::TwoSample { .. } => "two_sample",
    }
}
