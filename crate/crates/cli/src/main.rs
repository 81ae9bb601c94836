use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use secnoma_cli::{CliError, Command, Format, RunConfig};

/// Secrecy outage experiments for two-user NOMA with untrusted users.
///
/// Exit status: 0 when every embedded check passes, 1 when a check fails
/// or the computation cannot finish, 2 for configuration errors.
#[derive(Debug, Parser)]
#[command(name = "secnoma", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML run configuration; defaults reproduce the reference setup.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo realizations per point.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Keep only realizations with the near user's gain above the far user's.
    #[arg(long, global = true)]
    conditioned: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Analytical against simulated near-user outage over the target rate.
    Validate,
    /// Outage of both users against the far user's distance.
    DistanceSweep,
    /// Outage curves over the power split with per-user optima.
    Optimize,
    /// Min-max fair power split against the near user's target rate.
    Minmax,
    /// Min-max split against fixed and per-user splits over the SNR.
    GainComparison,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Command {
        match s {
            Sub::Validate => Command::Validate,
            Sub::DistanceSweep => Command::DistanceSweep,
            Sub::Optimize => Command::Optimize,
            Sub::Minmax => Command::Minmax,
            Sub::GainComparison => Command::GainComparison,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.sim.seed = seed;
    }
    if let Some(n) = cli.samples {
        if n == 0 {
            return Err(CliError::Config("--samples must be at least 1".into()));
        }
        config.sim.realizations = n;
    }
    if cli.conditioned {
        config.sim.conditioned = true;
    }
    if let Some(format) = cli.format {
        config.output.format = format;
    }
    if let Some(out) = &cli.out {
        config.output.path = Some(out.display().to_string());
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let config = load(cli)?;
    let report = Command::from(cli.command).run(&config)?;
    match &config.output.path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            report.write(config.output.format, &mut file)?;
            file.flush()?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            report.write(config.output.format, &mut stdout)?;
        }
    }
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        eprintln!("{verdict} {}: {}", c.name, c.detail);
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
