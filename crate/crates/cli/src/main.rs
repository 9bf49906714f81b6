//! `meshroute`: generate mesh networks, route them, compare algorithms and
//! export Graphviz drawings.

mod commands;
mod dot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use meshroute::{Error, SearchMode};

#[derive(Parser, Debug)]
#[command(
    name = "meshroute",
    version,
    about = "Interference-aware mesh backhaul routing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random network and write it as JSON.
    Generate(GenerateArgs),
    /// Route a network with one algorithm and print the assignment.
    Route(RouteArgs),
    /// Run every algorithm over scenarios and seeds, writing a CSV.
    Compare(CompareArgs),
    /// Write a Graphviz drawing with the paths of two algorithms.
    ExportDot(ExportDotArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Number of base stations.
    #[arg(long)]
    pub bs: usize,
    /// Number of users.
    #[arg(long)]
    pub users: usize,
    /// Number of core base stations.
    #[arg(long)]
    pub core: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Side of the square deployment area in meters.
    #[arg(long)]
    pub grid_side_m: Option<f64>,
    /// Minimum distance between base stations in meters.
    #[arg(long)]
    pub min_sep_m: Option<f64>,
    /// Maximum length of a base-station link in meters.
    #[arg(long)]
    pub link_radius_m: Option<f64>,
    /// Probability that two base stations in range are linked.
    #[arg(long)]
    pub link_prob: Option<f64>,
    /// Hop limit every user must be able to reach a core within.
    #[arg(long, default_value_t = 4)]
    pub hmax: usize,
}

#[derive(Args, Debug, Clone)]
pub struct RadioArgs {
    /// Maximum number of links on a path.
    #[arg(long, default_value_t = 4)]
    pub hmax: usize,
    /// Noise power override in dBm.
    #[arg(long, allow_negative_numbers = true)]
    pub noise_dbm: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct PlanArgs {
    /// Number of user groups.
    #[arg(long, default_value_t = 1)]
    pub groups: usize,
    #[arg(long, value_enum, default_value_t = Mode::Sequential)]
    pub mode: Mode,
    /// Assign users to groups round-robin instead of in contiguous blocks.
    #[arg(long)]
    pub round_robin: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Isolated,
    Sequential,
}

impl From<Mode> for SearchMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Isolated => SearchMode::Isolated,
            Mode::Sequential => SearchMode::Sequential,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Interference-aware grouped tree search.
    Ours,
    /// The same search blind to interference.
    Noint,
    /// One uniformly random path per user.
    Random,
    /// Genetic algorithm.
    Ga,
}

#[derive(Args, Debug)]
pub struct RouteArgs {
    /// Network JSON file.
    pub network: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Ours)]
    pub algo: Algo,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[command(flatten)]
    pub radio: RadioArgs,
    /// Seed for the random and genetic algorithms.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// GA population size K.
    #[arg(long, default_value_t = 20)]
    pub ga_k: usize,
    /// GA survivors J.
    #[arg(long, default_value_t = 10)]
    pub ga_j: usize,
    #[arg(long, default_value_t = 20)]
    pub ga_generations: usize,
    #[arg(long, default_value_t = 0.1)]
    pub ga_mutation: f64,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// `table1` or `B,U,C,G` tuples separated by `;`.
    #[arg(long, default_value = "table1")]
    pub scenarios: String,
    /// Number of seeds per scenario.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    /// Random assignments averaged per network.
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    /// GA runs per network; 0 skips the GA.
    #[arg(long, default_value_t = 50)]
    pub ga_runs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub ga_mutation: f64,
    #[arg(long, value_enum, default_value_t = Mode::Sequential)]
    pub mode: Mode,
    #[command(flatten)]
    pub radio: RadioArgs,
    /// CSV output; written to stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Leave the wall_ms column empty so that output is reproducible.
    #[arg(long)]
    pub no_wall_time: bool,
}

#[derive(Args, Debug)]
pub struct ExportDotArgs {
    pub network: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[command(flatten)]
    pub radio: RadioArgs,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation { .. } | Error::Domain(_) | Error::Parse(_) => 2,
        Error::Generation(_) => 3,
        Error::Routing(_) | Error::NoValidPath(_) => 4,
        Error::Csv(_) | Error::Io(_) => 1,
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("MESHROUTE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("MESHROUTE_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Route(a) => commands::route(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::ExportDot(a) => commands::export_dot(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
