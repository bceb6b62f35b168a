//! The `cmc` binary: run a configured scenario and report the outcome.
//!
//! Exit codes: 0 all checks passed, 1 config or IO trouble, 2 the solver
//! failed, 3 the run finished but at least one check failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use cmc_cli::{execute, RunRecord, Scenario};

#[derive(Parser)]
#[command(
    name = "cmc",
    version,
    about = "Height-estimate checks for constant-mean-curvature graphs",
    after_help = "Configs are TOML files with a `kind` field matching the subcommand.\n\
        Outputs land in --out: checks.csv, report.json, plots.svg, and for\n\
        uniqueness runs divergence.csv."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the TOML config for this scenario.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the emitted artifacts (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one domain and check the height and distance estimates.
    Verify(RunArgs),
    /// Compare solutions on growing truncations of a strip.
    Uniqueness(RunArgs),
    /// Refine a mesh against a closed-form solution and fit the order.
    Convergence(RunArgs),
}

fn summarize(record: &RunRecord) {
    let failed = record.failed_checks();
    let total = record.checks.len();
    println!(
        "{}: {} checks, {} failed, {} solves",
        record.scenario,
        total,
        failed,
        record.solves.len()
    );
    for note in &record.notes {
        println!("note: {note}");
    }
    if failed > 0 {
        for row in record.checks.iter().filter(|r| !r.pass) {
            println!(
                "FAIL {} measured {:.6e} bound {:.6e} slack {:.6e}",
                row.name, row.measured, row.bound, row.slack
            );
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (scenario, args) = match &cli.command {
        Command::Verify(args) => (Scenario::Verify, args),
        Command::Uniqueness(args) => (Scenario::Uniqueness, args),
        Command::Convergence(args) => (Scenario::Convergence, args),
    };
    match execute(scenario, &args.config, &args.out, args.seed) {
        Ok(record) => {
            summarize(&record);
            if record.failed_checks() > 0 {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
