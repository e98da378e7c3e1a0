mod commands;
mod error;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kinstrata::census::{Region, Selector};
use kinstrata::DEFAULT_SEED;

use error::{CliError, EXIT_IO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pretty,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "kinstrata", version, about = "Kinematic strata of Mandelstam matrices")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "STRATA_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membership test for the Mandelstam region, with a violated minor as witness.
    Check {
        /// Matrix JSON file; `-` or absent reads standard input.
        input: Option<PathBuf>,
    },
    /// Stratum label of a massless Mandelstam matrix.
    Classify { input: Option<PathBuf> },
    /// Stratum counts by rank and dimension.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "massless")]
        region: Region,
        #[arg(long, default_value = "all")]
        r: Selector,
        #[arg(long, default_value = "all")]
        d: Selector,
        /// Re-derive every cell by enumerating signed matroids.
        #[arg(long)]
        check_bruteforce: bool,
    },
    /// A single census cell.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "massless")]
        region: Region,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        check_bruteforce: bool,
    },
    /// Momentum configuration and Gram matrix in a given stratum.
    Sample {
        /// Stratum label JSON file; `-` or absent reads standard input.
        label: Option<PathBuf>,
        /// Impose momentum conservation.
        #[arg(long)]
        mmc: bool,
    },
    /// Compares numerical Jacobian ranks with the dimension formulas.
    DimVerify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        mmc: bool,
        /// Independent samples per label.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Hasse diagram of the strata at one rank.
    Poset {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value = "massless")]
        region: Region,
        /// Restrict to the order ideal below this signed matroid (JSON).
        #[arg(long)]
        below: Option<String>,
    },
    /// Worked four- and five-particle momentum-conserving regions.
    Examples {
        #[command(subcommand)]
        which: Example,
    },
}

#[derive(Debug, Subcommand)]
pub enum Example {
    /// Four particles, coordinates (x, y).
    N4 {
        /// Classify the point (x, y); rationals such as `-3/2` are accepted.
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
        point: Option<Vec<String>>,
        /// Classify the integer grid over [-3, 3]^2.
        #[arg(long, conflicts_with = "point")]
        grid: bool,
    },
    /// Five particles, coordinates (a, b, c, d, e) = (s12, s23, s34, s45, s15).
    N5 {
        /// Region count of the arrangement and the sign table.
        #[arg(long)]
        census: bool,
        /// Classify the point (a, b, c, d, e).
        #[arg(long, num_args = 5, value_names = ["A", "B", "C", "D", "E"], allow_negative_numbers = true)]
        point: Option<Vec<String>>,
        /// A rational point where the quartic vanishes, with its rank.
        #[arg(long)]
        boundary: bool,
    },
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(Some(path), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io(None, e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli).and_then(|outcome| {
        emit(&cli, &outcome.text)?;
        outcome.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "{}", e.to_json());
            ExitCode::from(if e.exit == EXIT_IO { 2 } else { 1 })
        }
    }
}
