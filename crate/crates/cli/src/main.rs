//! `duality-pricer`: price, simulate, compare, verify and benchmark from the shell.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 a verify check
//! failed, 3 numerical failure.

mod commands;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use duality_pricer::PricingError;

#[derive(Debug, Parser)]
#[command(
    name = "duality-pricer",
    version,
    about = "Option pricing under binomial, BSM, Bachelier and logistic models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price the scenario's option in closed form (or on the lattice).
    Price {
        #[arg(long)]
        config: PathBuf,
        /// Also print finite-difference greeks.
        #[arg(long)]
        greeks: bool,
    },
    /// Simulate paths of the scenario's model to CSV and print a Monte-Carlo price.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the scenario seed and the environment.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write a convergence table over growing path counts.
        #[arg(long)]
        convergence: Option<PathBuf>,
    },
    /// Put, call and binary-put values across a strike grid for every model the scenario parameterizes.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        k_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        k_max: f64,
        /// Number of strikes, endpoints included.
        #[arg(long)]
        k_steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Primal and dual function curves of both models.
    Funcs {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the verification suite.
    Verify {
        /// Comma-separated check names; all checks when omitted.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed for the statistical checks.
        #[arg(long, conflicts_with = "reseed")]
        seed: Option<u64>,
        /// Draw a fresh base seed and report without failing.
        #[arg(long)]
        reseed: bool,
    },
    /// Time the six dual/primal functions of both models.
    Bench {
        #[arg(long, default_value_t = 100_000)]
        n_evals: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Pricing(PricingError),
    ChecksFailed(usize),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Pricing(e) => write!(f, "{}: {e}", e.code()),
            CliError::ChecksFailed(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

impl From<PricingError> for CliError {
    fn from(e: PricingError) -> Self {
        CliError::Pricing(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::ChecksFailed(_) => 2,
            CliError::Pricing(PricingError::Numeric(_)) => 3,
            CliError::Pricing(_) => 1,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Price { config, greeks } => commands::price(&config, greeks),
        Command::Simulate { config, out, seed, convergence } => {
            commands::simulate(&config, &out, seed, convergence.as_deref())
        }
        Command::Compare { config, k_min, k_max, k_steps, out } => {
            commands::compare(&config, k_min, k_max, k_steps, &out)
        }
        Command::Funcs { out } => commands::funcs(&out),
        Command::Verify { checks, out, seed, reseed } => commands::verify(checks, out.as_deref(), seed, reseed),
        Command::Bench { n_evals, reps, out } => commands::bench(n_evals, reps, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::ChecksFailed(3).exit_code(), 2);
        assert_eq!(CliError::Pricing(PricingError::Numeric("nan".into())).exit_code(), 3);
        assert_eq!(CliError::Pricing(PricingError::Domain("k < 0".into())).exit_code(), 1);
    }
}
