use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use magzoh::cli::{
    cmd_design, cmd_lav, cmd_simulate, exit, exit_code, metrics_summary, parse_scenario, DesignKind,
};
use magzoh::Error;

#[derive(Debug, Parser)]
#[command(
    author,
    version,
    about = "Sampling-period design and simulation for magnetorquer attitude control"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute T*, eps0 and the averaged spectrum for a scenario
    Design {
        #[arg(long)]
        config: PathBuf,
        /// state | output (defaults to the scenario's control law)
        #[arg(long)]
        kind: Option<String>,
        /// Also write the report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Simulate the closed loop and write the trajectory CSV
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print L_av(T), its T -> 0 limit and the limit's eigenvalues
    Lav {
        #[arg(long)]
        config: PathBuf,
        /// Sampling period in seconds (defaults to the scenario's period_s)
        #[arg(long)]
        period: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Design { config, kind, json } => {
            let scenario = parse_scenario(&config)?;
            let kind = kind.map(|k| k.parse::<DesignKind>()).transpose()?;
            let report = cmd_design(&scenario, kind)?;
            print!("{}", report.summary());
            if let Some(path) = json {
                let text =
                    serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
                std::fs::write(&path, text)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
        }
        Command::Simulate { config, out } => {
            let scenario = parse_scenario(&config)?;
            let (_, metrics) = cmd_simulate(&scenario, &out)?;
            print!("{}", metrics_summary(&metrics));
        }
        Command::Lav { config, period } => {
            let scenario = parse_scenario(&config)?;
            print!("{}", cmd_lav(&scenario, period)?.summary());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
