//! `marsnet` command line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use marsnet_core::runner::{self, Command};
use marsnet_core::scenario::{parse_scenario, Scenario};
use marsnet_core::Error;

/// Runs a constellation scenario and writes CSV reports.
#[derive(Debug, Parser)]
#[command(name = "marsnet", version)]
struct Args {
    /// Scenario file (`key=value` per line). Defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory. Overrides `output.dir` from the scenario.
    #[arg(long, value_name = "DIR")]
    output: Option<PathBuf>,

    /// One of coverage, rtt, route, handover, linkbudget, mass, apps, all.
    #[arg(long, value_name = "NAME", default_value = "all")]
    command: String,
}

fn execute(args: &Args) -> Result<Vec<PathBuf>, Error> {
    let command: Command = args.command.parse()?;
    let scenario = match &args.config {
        Some(path) => parse_scenario(path)?,
        None => Scenario::default(),
    };
    let output = args
        .output
        .clone()
        .or_else(|| scenario.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("marsnet-out"));
    runner::run(command, &scenario, &output)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("marsnet: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
