use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdbc_core::scenario::config::{build_spec, ConfigFile, SpecOverrides};
use tdbc_core::scenario::{self, ScenarioKind};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION_FAILED: u8 = 2;

/// Outage and power-gain sweeps for three-phase bidirectional
/// decode-and-forward relaying with optimal power allocation.
#[derive(Debug, Parser)]
#[command(name = "tdbc-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Outage vs. total power, optimal and fixed allocation.
    SweepTotalPower(CommonArgs),
    /// Power gains of the optimal policies at target outage probabilities.
    PowerGains(CommonArgs),
    /// Run the built-in validation suite; exits with status 2 on any failure.
    Validate(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// start:stop:step, in dB for power sweeps and as probabilities for
    /// power-gains.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

fn run(cli: Cli) -> Result<bool, tdbc_core::Error> {
    let (kind, args) = match cli.command {
        Command::SweepTotalPower(a) => (ScenarioKind::SweepTotalPower, a),
        Command::PowerGains(a) => (ScenarioKind::PowerGains, a),
        Command::Validate(a) => (ScenarioKind::Validate, a),
    };
    let file = args.config.as_deref().map(ConfigFile::load).transpose()?;
    let overrides = SpecOverrides {
        grid: args.grid,
        trials: args.trials,
        seed: args.seed,
        out: args.out,
    };
    let spec = build_spec(kind, file.as_ref(), &overrides)?;
    let output = scenario::run(&spec)?;
    match &spec.output_path {
        Some(path) => output.table.write_file(path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output.table.write_to(&mut lock)?;
            lock.flush().map_err(|source| tdbc_core::Error::Io {
                path: "<stdout>".into(),
                source,
            })?;
        }
    }
    Ok(output.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("tdbc-sim: validation failed");
            ExitCode::from(EXIT_VALIDATION_FAILED)
        }
        Err(e) => {
            eprintln!("tdbc-sim: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
