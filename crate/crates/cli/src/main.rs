//! `lowdeg`: fit low-degree polynomials to noisy points from the command line.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when the algorithm or a
//! requested check fails.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lowdeg_cli::{certify, fit, jacobian, plot};

#[derive(Debug, Parser)]
#[command(name = "lowdeg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a polynomial and an admissible perturbation of the points.
    Fit(fit::FitArgs),
    /// Certify that an exact perturbation exists near the stored one.
    Certify(certify::CertifyArgs),
    /// Compare the residual Jacobian with finite differences.
    CheckJacobian(jacobian::CheckJacobianArgs),
    /// Write grid samples of a two-variable result as CSV.
    EmitPlot(plot::EmitPlotArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Fit(a) => fit::run(a),
        Command::Certify(a) => certify::run(a),
        Command::CheckJacobian(a) => jacobian::run(a),
        Command::EmitPlot(a) => plot::run(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
