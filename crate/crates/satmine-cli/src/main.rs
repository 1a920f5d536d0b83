//! Command-line frontend: mining, dataset generation, instance export,
//! verification against the reference miner, and benchmark sweeps.

mod commands;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "satmine", version, about = "Frequent itemset mining on a SAT/PB solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine frequent (or maximal frequent) itemsets from a dataset.
    Mine(MineArgs),
    /// Generate a synthetic dataset.
    Gen(GenArgs),
    /// Export the encoded instance as a .cnf or .opb file.
    Export(ExportArgs),
    /// Sweep a grid of (dataset, θ, strategy) cells and emit CSV.
    Bench(BenchArgs),
    /// Mine and compare against the reference miner; exit 1 on mismatch.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum FormatArg {
    Transactions,
    Matrix,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum StrategyArg {
    Simple,
    Lsm,
    Cmg,
    Ld,
    Dual,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum BlockingArg {
    Simple,
    Subsets,
    SubsetsCompact,
    Supersets,
    SupersetsCompact,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum EncodingArg {
    Baseline,
    Reduced,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum RemovalArg {
    None,
    Incremental,
    Fixed,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum PolarityArg {
    Pos,
    Neg,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum InstanceFormatArg {
    Cnf,
    Opb,
}

/// Flags shared by `mine`, `verify` and `bench` cells.
#[derive(Args, Clone)]
pub struct MiningFlags {
    /// Strategy driving the enumeration.
    #[arg(long, value_enum, default_value = "simple")]
    strategy: StrategyArg,
    /// Blocking-clause shape; defaults to the strategy's natural choice.
    #[arg(long, value_enum)]
    blocking: Option<BlockingArg>,
    /// Coverage encoding.
    #[arg(long, value_enum, default_value = "baseline")]
    encoding: EncodingArg,
    /// Rewrite negated literals away (weighted constraints only).
    #[arg(long)]
    positive_only: bool,
    /// Clause-removal emulation mode (required by cmg and ld).
    #[arg(long, value_enum, default_value = "none")]
    removal: RemovalArg,
    /// Decision phase for item variables.
    #[arg(long, value_enum)]
    polarity_items: Option<PolarityArg>,
    /// Decision phase for transaction variables.
    #[arg(long, value_enum)]
    polarity_trans: Option<PolarityArg>,
    /// Solver seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
pub struct MineArgs {
    /// Dataset path.
    #[arg(long)]
    input: PathBuf,
    /// Dataset file format.
    #[arg(long, value_enum, default_value = "transactions")]
    format: FormatArg,
    /// Support threshold: an absolute count (e.g. 3) or a frequency in
    /// (0, 1] (e.g. 0.05).
    #[arg(long)]
    theta: String,
    #[command(flatten)]
    mining: MiningFlags,
    /// Report only the maximal frequent itemsets.
    #[arg(long)]
    maximal_only: bool,
    /// Result file path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct GenArgs {
    /// Alphabet size n.
    #[arg(long)]
    items: usize,
    /// Transaction count m.
    #[arg(long)]
    trans: usize,
    /// Target density in (0, 1).
    #[arg(long)]
    density: f64,
    /// Pattern bias γ in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Number of planted patterns.
    #[arg(long, default_value_t = 0)]
    planted: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (transactions format).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct ExportArgs {
    /// Dataset path.
    #[arg(long)]
    input: PathBuf,
    /// Dataset file format.
    #[arg(long, value_enum, default_value = "transactions")]
    input_format: FormatArg,
    /// Support threshold (count or frequency).
    #[arg(long)]
    theta: String,
    /// Coverage encoding.
    #[arg(long, value_enum, default_value = "baseline")]
    encoding: EncodingArg,
    #[arg(long)]
    positive_only: bool,
    #[arg(long, value_enum, default_value = "none")]
    removal: RemovalArg,
    /// Encode the dual (infrequent-itemset) formulation.
    #[arg(long)]
    dual: bool,
    /// Instance format.
    #[arg(long, value_enum)]
    format: InstanceFormatArg,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Dataset paths (repeatable).
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Dataset file format for --input files.
    #[arg(long, value_enum, default_value = "transactions")]
    format: FormatArg,
    /// Generator specs like "items=20,trans=40,density=0.35,gamma=0.4,planted=4,seed=1"
    /// (repeatable).
    #[arg(long = "gen")]
    gen_specs: Vec<String>,
    /// Comma-separated thresholds (counts or frequencies).
    #[arg(long, value_delimiter = ',')]
    theta: Vec<String>,
    /// Comma-separated strategies.
    #[arg(long, value_enum, value_delimiter = ',')]
    strategy: Vec<StrategyArg>,
    /// Blocking-clause shape; defaults to each strategy's natural choice.
    #[arg(long, value_enum)]
    blocking: Option<BlockingArg>,
    #[arg(long, value_enum, default_value = "baseline")]
    encoding: EncodingArg,
    #[arg(long)]
    positive_only: bool,
    #[arg(long, value_enum, default_value = "incremental")]
    removal: RemovalArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-cell timeout in seconds (cooperative, checked between
    /// iterations).
    #[arg(long)]
    timeout: Option<f64>,
    /// Worker threads for grid cells.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Dataset path.
    #[arg(long)]
    input: PathBuf,
    /// Dataset file format.
    #[arg(long, value_enum, default_value = "transactions")]
    format: FormatArg,
    /// Support threshold (count or frequency).
    #[arg(long)]
    theta: String,
    #[command(flatten)]
    mining: MiningFlags,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mine(args) => commands::mine(args),
        Command::Gen(args) => commands::gen(args),
        Command::Export(args) => commands::export(args),
        Command::Bench(args) => commands::bench(args),
        Command::Verify(args) => commands::verify(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
