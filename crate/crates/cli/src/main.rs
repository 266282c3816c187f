use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use bql::config::{parse_entries, parse_overrides};
use bql::{run, CliError, RunConfig, Subcommand};

/// Simulation and estimate checks for the periodic Boussinesq-type system.
///
/// Every config key can also be given as `--key value`; flags win.
#[derive(Debug, Parser)]
#[command(name = "bql", version)]
struct Args {
    /// simulate, picard, norms or verify-estimates
    subcommand: String,

    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// `--key value` overrides.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let subcommand: Subcommand = args.subcommand.parse()?;
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            parse_entries(&text)?
        }
        None => Default::default(),
    };
    RunConfig::from_entries(subcommand, file, parse_overrides(&args.overrides)?)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match load(&args).and_then(|cfg| run(&cfg)) {
        Ok(artifacts) => {
            for path in artifacts {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("bql: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
