//! `spanwalk`: random spanning trees from the command line.
//!
//! Graphs are whitespace-separated `u v` edge lists (`#` starts a
//! comment); input labels are mapped to canonical ids `0..n` in order
//! of first appearance, and all output uses the canonical ids.
//!
//! Exit codes: 0 success, 2 usage, 3 input parse failure, 4 validation
//! failure, 5 solver failure, 6 statistical failure.

mod commands;

use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spanwalk_core::pipeline::{Algorithm, PipelineError};

#[derive(Parser)]
#[command(name = "spanwalk", version, about = "Sample, decompose, verify, and count spanning trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample random spanning trees of a graph.
    Sample(SampleArgs),
    /// Partition a graph into low-diameter components and verify the result.
    Decompose(DecomposeArgs),
    /// Check trees from standard input against a graph; optionally test uniformity.
    Verify(VerifyArgs),
    /// Count spanning trees exactly.
    Count(CountArgs),
    /// Measure cover-walk lengths, cut crossings, shortcut jumps, and fallback rate.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    AldousBroder,
    Wilson,
    ShortcutEdge,
    ShortcutVertex,
}

impl AlgorithmArg {
    fn to_algorithm(self) -> Algorithm {
        match self {
            AlgorithmArg::AldousBroder => Algorithm::AldousBroder,
            AlgorithmArg::Wilson => Algorithm::Wilson,
            AlgorithmArg::ShortcutEdge => Algorithm::ShortcutEdge,
            AlgorithmArg::ShortcutVertex => Algorithm::ShortcutVertex,
        }
    }

    fn name(self) -> &'static str {
        match self {
            AlgorithmArg::AldousBroder => "aldous-broder",
            AlgorithmArg::Wilson => "wilson",
            AlgorithmArg::ShortcutEdge => "shortcut-edge",
            AlgorithmArg::ShortcutVertex => "shortcut-vertex",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Each tree as sorted `u v` lines, trees separated by blank lines.
    Edges,
    /// Per-sample walk statistics as `key=value` lines.
    Stats,
}

#[derive(Args)]
struct SampleArgs {
    /// Graph edge-list file; `-` reads standard input.
    #[arg(value_name = "GRAPH", default_value = "-")]
    input: String,
    /// Sampling algorithm.
    #[arg(long, value_enum, default_value_t = AlgorithmArg::ShortcutVertex)]
    algorithm: AlgorithmArg,
    /// Decomposition conductance in (0,1); defaults to 1/sqrt(n).
    #[arg(long)]
    phi: Option<f64>,
    /// Total-variation bound on the sampled tree distribution.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Override the exit-table accuracy derived from delta.
    #[arg(long)]
    eps: Option<f64>,
    /// Master seed; sample i draws from stream i of this seed.
    #[arg(long, env = "SPANWALK_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of trees to sample.
    #[arg(short = 'n', long = "samples", default_value_t = 1)]
    samples: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Edges)]
    format: FormatArg,
    /// Stop shortcutting once a walk transcript reaches this length
    /// (default m*n); the walk then continues verbatim.
    #[arg(long)]
    fallback_threshold: Option<u64>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Graph edge-list file; `-` reads standard input.
    #[arg(value_name = "GRAPH", default_value = "-")]
    input: String,
    /// Decomposition conductance in (0,1); defaults to 1/sqrt(n).
    #[arg(long)]
    phi: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Graph edge-list file (standard input carries the trees).
    #[arg(value_name = "GRAPH")]
    input: String,
    /// Also test the batch for uniformity over all spanning trees.
    #[arg(long)]
    uniformity: bool,
    /// Chi-square significance level for --uniformity.
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    /// Total-variation threshold for --uniformity.
    #[arg(long, default_value_t = 0.02)]
    tv_threshold: f64,
    /// Give up if the graph has more spanning trees than this.
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
}

#[derive(Args)]
struct CountArgs {
    /// Graph edge-list file; `-` reads standard input.
    #[arg(value_name = "GRAPH", default_value = "-")]
    input: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Graph edge-list file; `-` reads standard input.
    #[arg(value_name = "GRAPH", default_value = "-")]
    input: String,
    /// Sampling algorithm to measure against the plain cover walk.
    #[arg(long, value_enum, default_value_t = AlgorithmArg::ShortcutVertex)]
    algorithm: AlgorithmArg,
    /// Decomposition conductance in (0,1); defaults to 1/sqrt(n).
    #[arg(long)]
    phi: Option<f64>,
    /// Total-variation bound handed to the sampler.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Master seed; run i pairs streams of this seed.
    #[arg(long, env = "SPANWALK_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of paired measurement runs.
    #[arg(short = 'n', long = "samples", default_value_t = 10)]
    samples: u64,
    /// Stop shortcutting once a walk transcript reaches this length.
    #[arg(long)]
    fallback_threshold: Option<u64>,
}

/// Failure classes, each with its own exit code.
enum CliError {
    Usage(String),
    Parse(String),
    Validation(String),
    Solver(String),
    Statistical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Validation(_) => 4,
            CliError::Solver(_) => 5,
            CliError::Statistical(_) => 6,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage: {msg}"),
            CliError::Parse(msg) => write!(f, "parse: {msg}"),
            CliError::Validation(msg) => write!(f, "validation: {msg}"),
            CliError::Solver(msg) => write!(f, "solver: {msg}"),
            CliError::Statistical(msg) => write!(f, "statistical: {msg}"),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> CliError {
        match e {
            PipelineError::Table(_) | PipelineError::Walk(_) => CliError::Solver(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(args) => commands::cmd_sample(args),
        Command::Decompose(args) => commands::cmd_decompose(args),
        Command::Verify(args) => commands::cmd_verify(args),
        Command::Count(args) => commands::cmd_count(args),
        Command::Bench(args) => commands::cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spanwalk: {e}");
            ExitCode::from(e.code())
        }
    }
}
