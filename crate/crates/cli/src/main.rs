use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use bures_cli::commands::{self, FamilyKind};
use bures_cli::figure::{self, Figure};
use bures_cli::verify;
use clap::{Parser, Subcommand};

/// Bures metrics, curvatures, distances and priors for qubit families and
/// thermal spin ensembles.
#[derive(Parser)]
#[command(name = "bures", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the metric tensor at a point.
    Metric {
        #[arg(long, value_enum)]
        family: FamilyKind,
        /// Number of qubits (product families and the ensemble).
        #[arg(long)]
        n: Option<usize>,
        /// Chart coordinates, comma-separated.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
    },
    /// Print Gaussian (2D) and scalar curvature at a point.
    Curvature {
        #[arg(long, value_enum)]
        family: FamilyKind,
        /// Number of qubits (product families and the ensemble).
        #[arg(long)]
        n: Option<usize>,
        /// Chart coordinates, comma-separated.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
    },
    /// Bures distance between two thermal ensembles.
    Distance {
        /// Number of qubits.
        #[arg(long)]
        n: usize,
        /// Inverse temperature of the first ensemble.
        #[arg(long, allow_negative_numbers = true)]
        beta1: f64,
        /// Inverse temperature of the second ensemble.
        #[arg(long, allow_negative_numbers = true)]
        beta2: f64,
        /// Also build both matrices densely (n ≤ 5) and compare.
        #[arg(long)]
        dense_check: bool,
    },
    /// Normalize the volume element into a prior.
    Prior {
        #[arg(long, value_enum)]
        family: FamilyKind,
        /// Number of qubits (product families and the ensemble).
        #[arg(long)]
        n: Option<usize>,
        /// Only print the normalization constant.
        #[arg(long)]
        normalizer_only: bool,
        /// Also print the prior density at this point.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        at: Option<Vec<f64>>,
    },
    /// Write the data behind a figure as CSV.
    Figure {
        /// 1: g_ββ for n=2..7; 2: n=100 distance surface; 3, 4: length excess for n=2, 3.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        /// Output CSV path (written atomically).
        #[arg(long)]
        out: PathBuf,
        /// Points per axis (default 400 for figure 1, 100 otherwise).
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run the acceptance suite; exits non-zero if any criterion fails.
    Verify {
        /// Multiplies every numerical tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Run only these criteria (comma-separated numbers).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Print every individual check, not just one line per criterion.
        #[arg(long)]
        verbose: bool,
    },
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("BURES_THREADS") {
        let threads: usize = value
            .parse()
            .map_err(|_| anyhow::anyhow!("BURES_THREADS must be a positive integer, got {value:?}"))?;
        anyhow::ensure!(threads > 0, "BURES_THREADS must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Metric { family, n, at } => print!("{}", commands::cmd_metric(family, n, &at)?),
        Command::Curvature { family, n, at } => print!("{}", commands::cmd_curvature(family, n, &at)?),
        Command::Distance { n, beta1, beta2, dense_check } => {
            print!("{}", commands::cmd_distance(n, beta1, beta2, dense_check)?)
        }
        Command::Prior { family, n, normalizer_only, at } => {
            print!("{}", commands::cmd_prior(family, n, normalizer_only, at.as_deref())?)
        }
        Command::Figure { which, out, grid } => {
            let fig = Figure::from_number(which)?;
            let table = figure::cmd_figure(fig, &out, grid)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), out.display());
        }
        Command::Verify { tol_scale, only, verbose } => {
            anyhow::ensure!(tol_scale > 0.0 && tol_scale.is_finite(), "--tol-scale must be positive");
            let numbers: Vec<u8> = if only.is_empty() {
                verify::CRITERIA.iter().map(|&(n, _)| n).collect()
            } else {
                only
            };
            let mut all_passed = true;
            for number in numbers {
                let report = verify::run_criterion(number, tol_scale);
                println!("{}", report.summary());
                if verbose || !report.passed() {
                    for check in &report.checks {
                        println!("    {}", check.line());
                    }
                }
                all_passed &= report.passed();
            }
            return Ok(all_passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
