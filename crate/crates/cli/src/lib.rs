//! Command-line front end: figure data, correlation sweeps and cross-checks
//! as CSV or JSON.

pub mod args;
pub mod checks;
pub mod commands;
pub mod error;
pub mod output;

use args::{Cli, Command, OutputArgs};
use commands::Outcome;
use error::CliError;

/// Runs one command, writes its output and reports warnings on stderr.
///
/// Output is written before cross-check failures are returned, so a
/// validation error still leaves the data for inspection.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (outcome, output) = execute(&cli.command)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    outcome.report.write(output.format, output.out.as_deref())?;
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(outcome.failures.join("; ")))
    }
}

pub fn execute(command: &Command) -> Result<(Outcome, &OutputArgs), CliError> {
    Ok(match command {
        Command::PhotonNumber(a) => (commands::photon_number(a)?, &a.output),
        Command::Quadrature(a) => (commands::quadrature(a)?, &a.output),
        Command::SweepCorrelation(a) => (commands::sweep_correlation(a)?, &a.output),
        Command::MeterCheck(a) => (commands::meter_check(a)?, &a.output),
        Command::PovmCheck(a) => (commands::povm_check(a)?, &a.output),
    })
}
