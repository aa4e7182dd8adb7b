//! `radpulse`: batch front-end for the radpulse library.
//!
//! Exit codes: 0 success, 1 a validation failed, 2 bad input, 3 I/O error,
//! 4 numerical failure.

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radpulse::RadError;

mod cmd;
mod config;
mod model;
mod output;

#[derive(Parser, Debug)]
#[command(
    name = "radpulse",
    version,
    about = "Pulse-response analysis for the reaction-advection-diffusion equation"
)]
struct Cli {
    /// Flat key=value file supplying default flags for the subcommand
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<String>,
    /// Print timing and resolved parameters on stderr
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalue table (n, mu_n, w_n)
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Eigen(cmd::eigen::EigenArgs),
    /// Exit flow, concentration or holdup on a time grid
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Curve(cmd::curve::CurveArgs),
    /// Moments and peak characteristics over a (Pe, kappa_d) grid
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Signatures(cmd::signatures::SignatureArgs),
    /// Rate constant and Péclet number from measured curves
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Fit(cmd::fit::FitArgs),
    /// Check the series against the finite-difference or Monte Carlo oracle
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Validate(cmd::validate::ValidateArgs),
}

/// Bad flags or input files that the library never saw.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// What a successful run concluded.
pub enum Outcome {
    Ok,
    ValidationFailed,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<RadError>() {
            return if e.is_input_error() { 2 } else { 4 };
        }
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 3;
        }
    }
    4
}

fn set_threads() -> Result<(), UsageError> {
    let Ok(value) = std::env::var("RADPULSE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("RADPULSE_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError(e.to_string()))
}

fn run() -> anyhow::Result<Outcome> {
    let args = config::expand(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 2 } else { 0 });
        }
    };
    set_threads()?;
    let start = std::time::Instant::now();
    let outcome = match &cli.command {
        Command::Eigen(a) => cmd::eigen::run(a),
        Command::Curve(a) => cmd::curve::run(a),
        Command::Signatures(a) => cmd::signatures::run(a),
        Command::Fit(a) => cmd::fit::run(a),
        Command::Validate(a) => cmd::validate::run(a),
    }?;
    if cli.verbose {
        eprintln!("{:?}", cli.command);
        eprintln!("elapsed_s={:.3}", start.elapsed().as_secs_f64());
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    match run() {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
