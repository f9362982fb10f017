use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::Failure;

/// Normal forms of special Lagrangian pairs, G₂ checks and ℤ₂ loop invariants.
#[derive(Debug, Parser)]
#[command(name = "slaglab", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct Global {
    /// Random seed; defaults to $SLAGLAB_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Gap below which two angles count as equal when classifying strata.
    #[arg(long, global = true, default_value_t = slaglab::tol::GAP)]
    pub gap_tol: f64,
    /// Distance from π/2 at which an angle counts as on a wall.
    #[arg(long, global = true, default_value_t = slaglab::tol::WALL)]
    pub wall_tol: f64,
    /// Residual bound for the algebraic identity suites.
    #[arg(long, global = true, default_value_t = slaglab::tol::ALGEBRA)]
    pub algebra_tol: f64,
    /// Transversality margin below which a pair is rejected.
    #[arg(long, global = true, default_value_t = slaglab::tol::TRANSVERSE)]
    pub transverse_tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic angles and normalizing transformation of a pair.
    NormalForm {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Stabilizer stratum, region and graphicality of a pair.
    Classify {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Graph bilinear form of a pair, or the finite-difference form of a field.
    Bilinear {
        #[arg(long, conflicts_with = "field", required_unless_present = "field")]
        pair: Option<PathBuf>,
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// η of a pair loop.
    Eta {
        #[arg(long = "loop")]
        path: PathBuf,
        /// Print the angle and eigenvalue trajectory as CSV instead of a report.
        #[arg(long)]
        csv: bool,
    },
    /// μ of two framing loops compared through the pairing.
    Mu {
        #[arg(long)]
        framings: PathBuf,
    },
    /// Generate a random input document.
    Gen(GenArgs),
    /// Diffeomorphism type of the generalized connected sum.
    Consum {
        #[arg(long)]
        k: usize,
        /// Comma-separated ±1 values, one per component.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        mu: String,
        #[arg(long, default_value = "X+")]
        plus_name: String,
        #[arg(long, default_value = "X-")]
        minus_name: String,
    },
    /// Run the randomized invariant suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Su3,
    AngleVector,
    SlagPlane,
    TransversePair,
    CloseGraphicalPair,
    PairLoop,
    FramingLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StratumArg {
    Generic,
    LowPair,
    HighPair,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Trivial,
    Moebius,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct GenArgs {
    /// What to generate; inferred from --model or --twists when omitted.
    #[arg(long, value_enum)]
    pub kind: Option<GenKind>,
    /// Trace class of generated angle vectors.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub m: u8,
    #[arg(long, value_enum, default_value = "generic")]
    pub stratum: StratumArg,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lambda_prime: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub twists: Option<i32>,
    /// Write the document here and print a report; otherwise print the document.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            let _ = writeln!(std::io::stdout(), "{out}");
            ExitCode::SUCCESS
        }
        Err((text, failure)) => {
            let _ = writeln!(std::io::stdout(), "{text}");
            if let Failure::Malformed(m) | Failure::Computation { message: m, .. } = &failure {
                eprintln!("error: {m}");
            }
            ExitCode::from(failure.code())
        }
    }
}
