use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use eulerlab_cli::config::{parse_config_with_overrides, ConfigError, Experiment};
use eulerlab_cli::experiments::run_experiment;

/// Sampling laboratory for a random multiplicative field over the primes:
/// Gibbs measures on the unit interval, free energies, overlap
/// distributions, and their closed-form limits.
#[derive(Parser)]
#[command(name = "eulerlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form limit quantities on the parameter grid (no randomness)
    Theory(RunFlags),
    /// Two-overlap histograms under the Gibbs measure
    Overlap(RunFlags),
    /// Quenched free energy estimates along the window ladder
    #[command(name = "free-energy")]
    FreeEnergy(RunFlags),
    /// Normalized measure of high level sets and its exponent
    #[command(name = "high-points")]
    HighPoints(RunFlags),
    /// Built-in verification suite; exits 1 if any check fails
    Validate(RunFlags),
}

/// Flags mirror configuration keys one to one and override file values.
#[derive(Args)]
struct RunFlags {
    /// Path to a key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Window ladder, comma-separated log T values, strictly increasing
    #[arg(long = "logT", value_name = "REALS")]
    log_t: Option<String>,
    /// Inverse temperatures, comma-separated
    #[arg(long, value_name = "REALS")]
    beta: Option<String>,
    /// Scale split point in (0, 1)
    #[arg(long, value_name = "REAL")]
    alpha: Option<String>,
    /// Low-frequency tilts in (-1, 1), comma-separated
    #[arg(long, value_name = "REALS", allow_hyphen_values = true)]
    u: Option<String>,
    /// Monte Carlo replicas per parameter point
    #[arg(long, value_name = "INT")]
    replicas: Option<String>,
    /// Overlap pairs drawn per replica
    #[arg(long = "pairs_per_replica", value_name = "INT")]
    pairs_per_replica: Option<String>,
    /// Gibbs grid points per 256-point base grid
    #[arg(long = "grid_oversample", value_name = "INT")]
    grid_oversample: Option<String>,
    /// Base seed for all replica streams
    #[arg(long, value_name = "INT")]
    seed: Option<String>,
    /// Directory for CSV/JSON artifacts
    #[arg(long = "output_dir", value_name = "PATH")]
    output_dir: Option<String>,
    /// Worker threads; output bytes do not depend on this
    #[arg(long, value_name = "INT")]
    workers: Option<String>,
}

impl RunFlags {
    fn overrides(&self, experiment: Experiment) -> Vec<(String, String)> {
        let mut pairs = Vec::new();
        let mut add = |key: &str, value: &Option<String>| {
            if let Some(v) = value {
                pairs.push((key.to_string(), v.clone()));
            }
        };
        add("logT", &self.log_t);
        add("beta", &self.beta);
        add("alpha", &self.alpha);
        add("u", &self.u);
        add("replicas", &self.replicas);
        add("pairs_per_replica", &self.pairs_per_replica);
        add("grid_oversample", &self.grid_oversample);
        add("seed", &self.seed);
        add("output_dir", &self.output_dir);
        add("workers", &self.workers);
        // The subcommand always decides the experiment.
        pairs.push(("experiment".to_string(), experiment.name().to_string()));
        pairs
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            if let Some(config_err) = err.downcast_ref::<ConfigError>() {
                eprintln!("invalid configuration:");
                for violation in config_err.violations() {
                    eprintln!("  {violation}");
                }
                ExitCode::from(2)
            } else {
                eprintln!("error: {err:#}");
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let (experiment, flags) = match &cli.command {
        Command::Theory(f) => (Experiment::Theory, f),
        Command::Overlap(f) => (Experiment::Overlap, f),
        Command::FreeEnergy(f) => (Experiment::FreeEnergy, f),
        Command::HighPoints(f) => (Experiment::HighPoints, f),
        Command::Validate(f) => (Experiment::Validate, f),
    };
    let source = match &flags.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            ConfigError::single(format!("config: cannot read {}: {e}", path.display()))
        })?,
        None => String::new(),
    };
    let config = parse_config_with_overrides(&source, &flags.overrides(experiment))?;

    let result = run_experiment(&config)?;
    for path in &result.outputs {
        println!("wrote {}", path.display());
    }
    println!("wrote {}", result.envelope.display());

    if let Some(report) = &result.validation {
        for check in &report.checks {
            let status = if check.passed { "ok  " } else { "FAIL" };
            println!(
                "{status} {:32} observed {:<24} threshold {}",
                check.name, check.observed, check.threshold
            );
        }
        println!("{} passed, {} failed", report.passed, report.failed);
        return Ok(report.all_passed());
    }
    Ok(true)
}
