use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use freqid::harness::{emit_csv, preset_config, run_scenario, validate, ScenarioConfig, PRESET_NAMES};
use freqid::Error;

/// Online frequency identification of a sinusoidal signal with
/// generator-driven amplitude and frequency.
#[derive(Parser)]
#[command(name = "freqid", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file and write the trajectory CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the oracle suite on a configured scenario.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a built-in preset scenario and write its trajectory CSV.
    Preset {
        /// One of fig1..fig7.
        #[arg(long)]
        name: String,
        /// Output CSV path; defaults to `<name>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> freqid::Result<ExitCode> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            simulate_to(&cfg, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            let report = validate(&cfg)?;
            for check in &report.checks {
                println!(
                    "{}: {} (measured {:.3e}, bound {:.3e})",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.measured,
                    check.bound
                );
            }
            Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Preset { name, out } => {
            let cfg = preset_config(&name).ok_or_else(|| {
                Error::Config(format!("unknown preset {name:?}; expected one of {PRESET_NAMES:?}"))
            })?;
            let out = out.unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
            simulate_to(&cfg, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn simulate_to(cfg: &ScenarioConfig, out: &std::path::Path) -> freqid::Result<()> {
    let run = run_scenario(cfg)?;
    emit_csv(&run.records, out)?;
    let est = &run.final_estimate;
    println!(
        "wrote {} records to {}; final estimate theta = ({:.6}, {:.6}), omega_hat = {:.6}, valid = {}",
        run.records.len(),
        out.display(),
        est.theta1_hat,
        est.theta2_hat,
        est.omega_hat,
        est.valid
    );
    Ok(())
}
