//! `daw`: generate demand matrices, synthesize and evaluate topologies,
//! brute-force small instances and build X3C reductions.

mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use daw_core::{Algorithm, Mode, Rational};

#[derive(Debug, Parser)]
#[command(name = "daw", version, about = "Demand-aware topology synthesis with exact throughput")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit CSV rows instead of a JSON report.
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a matrix from a named family or at random.
    Gen(GenArgs),
    /// Run a synthesis algorithm on a matrix.
    Synth(SynthArgs),
    /// Evaluate a topology against a matrix.
    Eval(EvalArgs),
    /// Best topology per mode by exhaustive enumeration.
    Enum(EnumArgs),
    /// Check the ordering between the four throughput notions.
    Audit(PairArgs),
    /// Build the X3C gadget and, if a cover exists, its witness.
    Reduce(ReduceArgs),
    /// Seeded trials over families and random matrices, as long-format CSV.
    Bench(BenchArgs),
    /// Check an explicit flow plan.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Family tag, e.g. m1, strong-upper, uniform. Omit with --random.
    #[arg(long, conflicts_with = "random")]
    pub family: Option<String>,
    /// Convex combination of random permutation matrices.
    #[arg(long)]
    pub random: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_rational)]
    pub kappa: Option<Rational>,
    /// Number of permutations for --random.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Also write the matrix JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub algo: AlgoChoice,
    #[arg(long)]
    pub matrix: PathBuf,
    /// Objective used to report (and, for `best`, to choose) the topology.
    #[arg(long, default_value = "direct-strict")]
    pub mode: Mode,
    /// Fixed kappa for two-stage instead of the bisection search.
    #[arg(long, value_parser = parse_rational)]
    pub kappa: Option<Rational>,
    #[arg(long, default_value_t = 8)]
    pub retries: usize,
    /// Also write the topology JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
pub enum AlgoChoice {
    One(Algorithm),
    Best,
}

impl std::str::FromStr for AlgoChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "best" {
            Ok(AlgoChoice::Best)
        } else {
            s.parse().map(AlgoChoice::One)
        }
    }
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub matrix: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// One mode, or every mode when omitted.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Include witness flow plans in the report.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Debug, Args)]
pub struct EnumArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub mode: Option<Mode>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// X3C instance as {"N": .., "sets": [[..], ..]}.
    #[arg(long, conflicts_with = "random")]
    pub x3c: Option<PathBuf>,
    /// Random instance `N,M`.
    #[arg(long, value_parser = parse_pair)]
    pub random: Option<(usize, usize)>,
    /// Plant an exact cover in the random instance.
    #[arg(long, requires = "random")]
    pub planted: bool,
    /// Also write the gadget demand matrix here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub n: Vec<usize>,
    /// Random matrices per node count, in addition to the families.
    #[arg(long, default_value_t = 5)]
    pub trials: u64,
    #[arg(long, value_delimiter = ',', default_value = "direct-strict,direct-weak")]
    pub modes: Vec<Mode>,
    /// Append rows to this CSV file instead of printing them.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub mode: Mode,
    /// Throughput to check in strict modes.
    #[arg(long, value_parser = parse_rational)]
    pub kappa: Option<Rational>,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    daw_core::parse_rational(s).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected N,M, got '{s}'"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    Ok((num(a)?, num(b)?))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match commands::dispatch(&cli, &argv) {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
