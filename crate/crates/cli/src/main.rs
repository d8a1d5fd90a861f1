//! `radpersist`: persistence exponents, eigenfunctions and quasi-stationary
//! laws of the AR(1) chain with +-1 innovations.

mod args;
mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "radpersist",
    version,
    about = "Persistence of AR(1) chains with Rademacher innovations"
)]
pub struct Cli {
    /// Accept decimal values of a (computed in floating point).
    #[arg(long, global = true)]
    pub inexact: bool,
    /// Allow 2/3 < a < 1, where no result is claimed to be correct.
    #[arg(long, global = true)]
    pub experimental: bool,
    /// Write the output here, with a manifest next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orbit of zero (or of --x) under T_a, as JSON.
    Orbit {
        #[arg(long)]
        a: String,
        /// Start point; fractions and decimals are iterated exactly when a is rational.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// lambda_a(p) for one a or a grid lo:hi:n, as CSV.
    Lambda {
        #[arg(long)]
        p: f64,
        #[arg(long, conflicts_with = "a_grid", required_unless_present = "a_grid")]
        a: Option<String>,
        #[arg(long)]
        a_grid: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Quasi-stationary CDF on a grid lo:hi:n, as CSV.
    Cdf {
        #[arg(long)]
        a: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Transition matrix of the lumped chain.
    Lumped {
        #[arg(long)]
        a: String,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Json)]
        format: MatrixFormat,
    },
    /// Analytic, matrix and Monte Carlo values side by side, as JSON.
    Validate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo estimate of P(tau > n), or the conditional ECDF with --ecdf.
    Simulate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        /// Grid lo:hi:n for the empirical CDF of survivors.
        #[arg(long)]
        ecdf: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Validation(_) => 2,
                CliError::Numeric(_) => 3,
                CliError::Io(_) => 1,
            })
        }
    }
}
