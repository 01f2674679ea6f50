//! `slicerank` command-line tool.
//!
//! Exit status: 0 on success, 1 when a verification verdict is negative,
//! 2 on usage errors, malformed input or exceeded guards.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "slicerank", version, about = "Sum-free sets, STPP constructions and slice rank certificates")]
pub struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Upper bounds on tricolored sum-free sets in a group.
    Bound(GroupArg),
    /// CSV grid of rate functions and exact tuple counts.
    Rates(RatesArgs),
    /// The constants ε and δ.
    Constants,
    /// Verify a tricolored sum-free set (or a border set with --border).
    SumfreeVerify(SumfreeVerifyArgs),
    /// Exhaustive maximum tricolored sum-free set in a small group.
    SumfreeSearch(SumfreeSearchArgs),
    /// Verify an STPP construction.
    StppVerify(InputArg),
    /// Packing sums and exponents of an STPP construction.
    Packing(InputArg),
    /// ω bound from an STPP construction or from sizes and a group order.
    Omega(OmegaArgs),
    /// Border sum-free set from an STPP construction.
    Border(InputArg),
    /// Genuine sum-free set in H^N from a border set.
    Unborder(PowerArgs),
    /// Uniform STPP family in H^{3N}, described by sizes.
    Uniformize(UniformizeArgs),
    /// Group tensor D_H or identity diagonal over F_p.
    Tensor(TensorArgs),
    /// Exact slice rank of a small tensor, with a witness decomposition.
    Slicerank(InputArg),
    /// Triangle decomposition of the shifted cyclic group tensor or of P(x+y+z).
    Triangle(TriangleArgs),
    /// Verify or search for an instability certificate.
    Instability(InstabilityArgs),
    /// Exact count of tuples below the weight cutoff.
    Count(CountArgs),
}

#[derive(Args, Debug)]
pub struct GroupArg {
    /// Group such as "Z2^10" or "Z3 x Z9".
    #[arg(long)]
    pub group: String,
}

#[derive(Args, Debug)]
pub struct InputArg {
    /// JSON input file.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct RatesArgs {
    /// Comma-separated values of m.
    #[arg(long, default_value = "1,2,3,4,5,6,7,8")]
    pub m: String,
    /// Comma-separated rationals α in (0, 1/2).
    #[arg(long, default_value = "1/3")]
    pub alpha: String,
    /// Tuple length for the exact counts.
    #[arg(long, default_value_t = 6)]
    pub n: u32,
}

#[derive(Args, Debug)]
pub struct SumfreeVerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Input is a border set with weights.
    #[arg(long)]
    pub border: bool,
}

#[derive(Args, Debug)]
pub struct SumfreeSearchArgs {
    #[arg(long)]
    pub group: String,
    /// Largest group order searched.
    #[arg(long, default_value_t = 9)]
    pub max_order: u64,
}

#[derive(Args, Debug)]
pub struct OmegaArgs {
    /// STPP construction file.
    #[arg(long, conflicts_with_all = ["sizes", "order"])]
    pub input: Option<PathBuf>,
    /// Comma-separated products |A||B||C| or size triples "a*b*c".
    #[arg(long, requires = "order")]
    pub sizes: Option<String>,
    /// Group order |H|.
    #[arg(long, requires = "sizes")]
    pub order: Option<u128>,
    /// Print a table instead of JSON.
    #[arg(long)]
    pub table: bool,
}

#[derive(Args, Debug)]
pub struct PowerArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub power: u32,
}

#[derive(Args, Debug)]
pub struct UniformizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub power: u32,
    /// Randomized cross-condition trials on sampled members.
    #[arg(long, default_value_t = 100)]
    pub spot_checks: usize,
}

#[derive(Args, Debug)]
pub struct TensorArgs {
    #[arg(long)]
    pub p: u64,
    /// Group for D_H.
    #[arg(long, conflicts_with = "diagonal", required_unless_present = "diagonal")]
    pub group: Option<String>,
    /// Side length of the identity diagonal.
    #[arg(long)]
    pub diagonal: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TriangleArgs {
    /// Prime power q for D_{Z/qZ}.
    #[arg(long, conflicts_with = "poly", required_unless_present = "poly")]
    pub q: Option<u64>,
    /// Values P(0), …, P(p−1) as a comma-separated list.
    #[arg(long, requires = "p")]
    pub poly: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
}

#[derive(Args, Debug)]
pub struct InstabilityArgs {
    /// Tensor file.
    #[arg(long)]
    pub input: PathBuf,
    /// Certificate to verify; without it a bounded search runs.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Largest weight tried by the search.
    #[arg(long, default_value_t = 3)]
    pub max_weight: i64,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub m: u64,
    /// Rational cutoff such as "1/3".
    #[arg(long, default_value = "1/3")]
    pub alpha: String,
    #[arg(long)]
    pub n: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
