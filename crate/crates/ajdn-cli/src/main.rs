//! `ajdn`: detect asynchronous jumps in the piecewise-smooth mean of a
//! high-dimensional time series with nonstationary, cross-correlated noise.
//!
//! Exit codes: 0 success, 1 bad invocation, 2 unusable input data,
//! 3 numerically degenerate computation.

mod cmd_bench;
mod cmd_detect;
mod cmd_evaluate;
mod cmd_filter;
mod cmd_simulate;
mod cmd_tune;
mod fail;
mod io;
mod params;

use clap::Parser;

use crate::fail::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "ajdn",
    version,
    about = "Multiscale jump detection for high-dimensional time series",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Detect jumps in a CSV panel; writes jumps.json and summary.txt.
    Detect(cmd_detect::DetectArgs),
    /// Report tuned hyperparameters for a CSV panel.
    Tune(cmd_tune::TuneArgs),
    /// Generate a synthetic panel with known ground truth.
    Simulate(cmd_simulate::SimulateArgs),
    /// Score a detection output against ground truth.
    Evaluate(cmd_evaluate::EvaluateArgs),
    /// Monte Carlo evaluation over many simulated panels.
    Bench(cmd_bench::BenchArgs),
    /// Validate the jump-pass filter's moment properties.
    FilterCheck(cmd_filter::FilterArgs),
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Detect(args) => cmd_detect::run(args),
        Command::Tune(args) => cmd_tune::run(args),
        Command::Simulate(args) => cmd_simulate::run(args),
        Command::Evaluate(args) => cmd_evaluate::run(args),
        Command::Bench(args) => cmd_bench::run(args),
        Command::FilterCheck(args) => cmd_filter::run(args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is a
            // usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {failure}");
            std::process::exit(failure.exit_code());
        }
    }
}
