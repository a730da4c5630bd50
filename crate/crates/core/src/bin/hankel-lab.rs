use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hankel_lab::lab::{configure_threads, run, Config, Experiment, ExperimentReport, Scenario, Status};

#[derive(Parser)]
#[command(name = "hankel-lab", version, about = "Weighted Bergman space experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a radial weight and compute its A_p constants.
    ClassifyWeight(RunArgs),
    /// Check the kernel series, reproducing identity and norm bands.
    KernelCheck(RunArgs),
    /// Carleson-type ratios, vanishing profile and embedding estimates.
    CarlesonTest(RunArgs),
    /// Profile of the distance-to-analytic function and its criterion.
    BdaProfile(RunArgs),
    /// Split a symbol along a lattice partition of unity.
    Decompose(RunArgs),
    /// Compare Hankel norm estimates with the criterion.
    HankelVerify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a scenario key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.json and the CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Suppress the per-check lines.
    #[arg(long)]
    quiet: bool,
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Command::ClassifyWeight(a) => (Experiment::ClassifyWeight, a),
            Command::KernelCheck(a) => (Experiment::KernelCheck, a),
            Command::CarlesonTest(a) => (Experiment::CarlesonTest, a),
            Command::BdaProfile(a) => (Experiment::BdaProfile, a),
            Command::Decompose(a) => (Experiment::Decompose, a),
            Command::HankelVerify(a) => (Experiment::HankelVerify, a),
        }
    }
}

fn load(args: &RunArgs) -> hankel_lab::Result<Config> {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for kv in &args.set {
        cfg.apply_override(kv)?;
    }
    if let Some(seed) = args.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    configure_threads();
    let report = match load(&args) {
        Ok(cfg) => run(kind, &mut Scenario::new(cfg)),
        Err(e) => {
            let mut r = ExperimentReport::new(kind.name());
            r.finish(Err(e));
            r
        }
    };
    if !args.quiet {
        for c in &report.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            println!("{tag} {:<32} {} (expected {})", c.name, c.value, c.expected);
        }
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
    }
    if let Some(e) = &report.error {
        eprintln!("error ({}): {}", e.kind, e.message);
    }
    if let Err(e) = report.emit(&args.out) {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return ExitCode::from(2);
    }
    let status = match report.status {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Partial => "partial",
    };
    println!("{}: {status} -> {}", kind.name(), args.out.join("report.json").display());
    ExitCode::from(report.exit_code() as u8)
}
