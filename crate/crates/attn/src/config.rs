//! Command-line configuration and argument parsing.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// A comma-separated list of numbers; each entry may be a fraction like `1/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberList(pub Vec<f64>);

impl FromStr for NumberList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(parse_number)
            .collect::<Result<_, _>>()
            .map(NumberList)
    }
}

/// Parses a finite decimal or a fraction `p/q`, evaluated in double precision.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in '{s}'"))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in '{s}'"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in '{s}'"));
            }
            num / den
        }
        None => s.parse().map_err(|_| format!("'{s}' is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "attn",
    version,
    about = "Incentive-compatible information policies under costly attention"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Optimal attention outcome for a prior on {-1, 0, 1}.
    #[command(allow_negative_numbers = true)]
    Solve {
        #[arg(long, value_parser = NumberList::from_str)]
        prior: NumberList,
        #[arg(long, value_parser = parse_number)]
        kappa: f64,
    },
    /// Order-IC check of a policy file, optionally confirmed by the LP oracle.
    #[command(allow_negative_numbers = true)]
    CheckIc {
        /// Policy file (JSON).
        policy: PathBuf,
        #[arg(long, value_parser = parse_number)]
        kappa: f64,
        #[arg(long)]
        with_oracle: bool,
        /// Oracle lattice resolution.
        #[arg(long, default_value_t = attn_core::oracle::DEFAULT_GRID)]
        grid: usize,
        /// Oracle tolerance (default scales with the full-attention value).
        #[arg(long, value_parser = parse_number)]
        tol: Option<f64>,
    },
    /// Optimal outcome over a range of kappa, as CSV.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[arg(long, value_parser = NumberList::from_str)]
        prior: NumberList,
        #[arg(long, value_parser = parse_number)]
        kappa_min: f64,
        #[arg(long, value_parser = parse_number)]
        kappa_max: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Compares the closed form with a grid search and the LP oracle.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(long, value_parser = NumberList::from_str)]
        prior: NumberList,
        #[arg(long, value_parser = parse_number)]
        kappa: f64,
        /// Points per axis of the search grid.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = attn_core::oracle::DEFAULT_GRID)]
        oracle_grid: usize,
        #[arg(long, default_value_t = 1e-6, value_parser = parse_number)]
        tol: f64,
        /// Shifts the second threshold before solving (negative control).
        #[arg(long, hide = true, value_parser = parse_number)]
        perturb_k2: Option<f64>,
    },
    /// Agent's best garbling of a policy file via the LP oracle.
    #[command(allow_negative_numbers = true)]
    Oracle {
        policy: PathBuf,
        #[arg(long, value_parser = parse_number)]
        kappa: f64,
        #[arg(long, default_value_t = attn_core::oracle::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_parser = parse_number)]
        tol: Option<f64>,
    },
}

fn check_kappa(kappa: f64) -> Result<(), CliError> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "--kappa must be positive, got {kappa}"
        )))
    }
}

fn check_grid(name: &str, grid: usize) -> Result<(), CliError> {
    if grid >= 1 {
        Ok(())
    } else {
        Err(CliError::input(format!("{name} must be at least 1")))
    }
}

fn check_tol(tol: Option<f64>) -> Result<(), CliError> {
    match tol {
        Some(t) if !(t > 0.0) => Err(CliError::input(format!("--tol must be positive, got {t}"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    /// Checks the preconditions the target command relies on.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.command {
            Command::Solve { kappa, .. } => check_kappa(*kappa),
            Command::CheckIc {
                kappa, grid, tol, ..
            }
            | Command::Oracle {
                kappa, grid, tol, ..
            } => {
                check_kappa(*kappa)?;
                check_grid("--grid", *grid)?;
                check_tol(*tol)
            }
            Command::Sweep {
                kappa_min,
                kappa_max,
                steps,
                ..
            } => {
                check_kappa(*kappa_min)?;
                if !(kappa_min < kappa_max) {
                    return Err(CliError::input(format!(
                        "--kappa-min ({kappa_min}) must be below --kappa-max ({kappa_max})"
                    )));
                }
                if *steps < 2 {
                    return Err(CliError::input("--steps must be at least 2"));
                }
                Ok(())
            }
            Command::Verify {
                kappa,
                grid,
                oracle_grid,
                tol,
                ..
            } => {
                check_kappa(*kappa)?;
                check_grid("--grid", *grid)?;
                check_grid("--oracle-grid", *oracle_grid)?;
                check_tol(Some(*tol))
            }
        }
    }
}
