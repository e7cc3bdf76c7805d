use std::path::PathBuf;
use std::process::ExitCode;

use binfluid_core::experiments::{self, ScenarioConfig, ScenarioKind};
use binfluid_core::Error;
use clap::{Args, Parser, Subcommand};

/// Run binary-fluid simulation scenarios described by JSON files.
#[derive(Parser)]
#[command(name = "binfluid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence of travelling waves to the steady states as ε → 0
    TwConverge(RunArgs),
    /// Measured interface velocity against the wave speed
    WaveSpeed(RunArgs),
    /// Interface displacement of monotone data across ε
    Immobility(RunArgs),
    /// Weighted interface velocity against the slope-jump law
    Conjecture(RunArgs),
    /// Waiting time of the limit problem
    WaitingTime(RunArgs),
    /// Approximation of the limit problem by the lifted problems
    LimitApprox(RunArgs),
    /// Logarithmic asymptotics of the weight normalisation
    Asymptotics(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir` in the file)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl Command {
    fn split(self) -> (ScenarioKind, RunArgs) {
        match self {
            Command::TwConverge(a) => (ScenarioKind::TwConvergence, a),
            Command::WaveSpeed(a) => (ScenarioKind::WaveSpeed, a),
            Command::Immobility(a) => (ScenarioKind::Immobility, a),
            Command::Conjecture(a) => (ScenarioKind::Conjecture, a),
            Command::WaitingTime(a) => (ScenarioKind::WaitingTime, a),
            Command::LimitApprox(a) => (ScenarioKind::LimitApprox, a),
            Command::Asymptotics(a) => (ScenarioKind::Asymptotics, a),
        }
    }
}

fn execute(kind: ScenarioKind, args: RunArgs) -> Result<bool, Error> {
    let config = ScenarioConfig::load(&args.config)?;
    if config.kind != kind {
        return Err(Error::Config(format!(
            "{} holds a `{}` scenario; run it with that subcommand",
            args.config.display(),
            config.kind.command()
        )));
    }
    let dir = args
        .out
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| Error::Config("no output directory: pass --out".into()))?;
    let out = experiments::run_with_jobs(&config, args.jobs)?;
    experiments::write_outputs(&out, &dir)?;
    for c in &out.summary.checks {
        println!(
            "{} {}: {:.6e} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.bound
        );
    }
    println!("results in {}", dir.display());
    Ok(out.summary.passed)
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
