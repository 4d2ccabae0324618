use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contwalk_core::experiments::{Metric, SweptParam};
use contwalk_core::{Capacity, Family, LambdaRule, RoutingMode};

mod commands;

/// Distributed random-walk sampling on a simulated CONGEST network.
#[derive(Debug, Parser)]
#[command(name = "contwalk", version, about)]
struct Cli {
    /// Directory for generated files.
    #[arg(long, global = true, env = "CONTWALK_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Run one random walk (stitched, or naive with --naive).
    Walk(WalkArgs),
    /// Serve a stream of walk requests, rebuilding tables on failure.
    Continuous(ContinuousArgs),
    /// Sweep one parameter and report table utilization (kappa).
    KappaSweep(SweepArgs),
    /// Sweep one parameter and report amortized messages per walk.
    MessageSweep(SweepArgs),
    /// Compare sampled walk endpoints with the exact distribution.
    DistCheck(DistCheckArgs),
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Read the graph from an edge list instead of generating one.
    #[arg(long, conflicts_with_all = ["family", "p", "r", "alpha"])]
    graph: Option<PathBuf>,
    #[arg(long, default_value = "gnp-expander", value_parser = parse_family)]
    family: Family,
    /// Node count.
    #[arg(long = "n", visible_alias = "nodes", default_value_t = 1000)]
    n: usize,
    /// Edge probability for gnp-expander and two-tier (default log2 n / n).
    #[arg(long)]
    p: Option<f64>,
    /// Connection radius for geometric (default sqrt(log2 n / n)).
    #[arg(long)]
    r: Option<f64>,
    /// Preferential-attachment exponent for power-law.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
}

#[derive(Debug, Args)]
struct AlgoArgs {
    /// Short walks per node, in units of deg(v) * log2 n.
    #[arg(long = "eta", visible_alias = "walks-per-degree", default_value_t = 1.0)]
    eta: f64,
    /// Short-walk length: an integer, `sqrt`, `<c>*sqrt`, `logn` or `theory`.
    #[arg(long = "lambda", visible_alias = "short-length", default_value = "sqrt", value_parser = parse_lambda)]
    lambda: LambdaRule,
    #[arg(long, default_value = "shortest-path", value_parser = parse_routing)]
    routing: RoutingMode,
    /// Tokens per directed edge per round, or `unbounded`.
    #[arg(long, default_value = "1", value_parser = parse_capacity)]
    capacity: Capacity,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default: <out-dir>/<family>-n<n>-s<seed>.edges).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WalkArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Walk length.
    #[arg(long = "l", visible_alias = "length", default_value_t = 1000)]
    l: u32,
    /// Source node.
    #[arg(long, default_value_t = 0)]
    source: u32,
    /// Walk the token hop by hop instead of stitching short walks.
    #[arg(long)]
    naive: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ContinuousArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long = "l", visible_alias = "length", default_value_t = 1000)]
    l: u32,
    /// Number of requests, with degree-proportional sources.
    #[arg(long, default_value_t = 1000)]
    requests: usize,
    /// Also route each destination back to its source.
    #[arg(long)]
    notify_source: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Flat key = value sweep file; flags given explicitly override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Swept parameter: l, n, eta or lambda.
    #[arg(long, value_parser = parse_param)]
    param: Option<SweptParam>,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',', conflicts_with = "exponents")]
    values: Option<Vec<f64>>,
    /// Comma-separated exponents e for an l grid of round(n^e).
    #[arg(long, value_delimiter = ',')]
    exponents: Option<Vec<f64>>,
    #[arg(long = "n", visible_alias = "nodes")]
    n: Option<usize>,
    /// Walk length when l is not swept: an integer or `n`.
    #[arg(long = "l", visible_alias = "length")]
    l: Option<String>,
    #[arg(long = "eta", visible_alias = "walks-per-degree")]
    eta: Option<f64>,
    #[arg(long = "lambda", visible_alias = "short-length", value_parser = parse_lambda)]
    lambda: Option<LambdaRule>,
    /// Comma-separated families (default: all five).
    #[arg(long, value_delimiter = ',', value_parser = parse_family)]
    families: Option<Vec<Family>>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_capacity)]
    capacity: Option<Capacity>,
    #[arg(long, value_parser = parse_routing)]
    routing: Option<RoutingMode>,
    /// Skip the SVG plot.
    #[arg(long)]
    no_plot: bool,
}

#[derive(Debug, Args)]
struct DistCheckArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long = "eta", visible_alias = "walks-per-degree", default_value_t = 1.0)]
    eta: f64,
    #[arg(long = "lambda", visible_alias = "short-length", default_value = "sqrt", value_parser = parse_lambda)]
    lambda: LambdaRule,
    #[arg(long = "l", visible_alias = "length", default_value_t = 8)]
    l: u32,
    #[arg(long, default_value_t = 0)]
    source: u32,
    /// Walks to sample, each on a fresh table.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Largest acceptable total-variation distance.
    #[arg(long, default_value_t = 0.02)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: contwalk_core::GraphError| e.to_string())
}

fn parse_lambda(s: &str) -> Result<LambdaRule, String> {
    s.parse().map_err(|e: contwalk_core::WalkError| e.to_string())
}

fn parse_routing(s: &str) -> Result<RoutingMode, String> {
    s.parse().map_err(|e: contwalk_core::GraphError| e.to_string())
}

fn parse_capacity(s: &str) -> Result<Capacity, String> {
    s.parse().map_err(|e: contwalk_core::SimError| e.to_string())
}

fn parse_param(s: &str) -> Result<SweptParam, String> {
    s.parse().map_err(|e: contwalk_core::experiments::ExperimentError| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a, &cli.out_dir),
        Command::Walk(a) => commands::walk(&a),
        Command::Continuous(a) => commands::continuous(&a, &cli.out_dir),
        Command::KappaSweep(a) => commands::sweep(&a, &cli.out_dir, "kappa-sweep", Metric::Kappa),
        Command::MessageSweep(a) => {
            commands::sweep(&a, &cli.out_dir, "message-sweep", Metric::AmortizedMessages)
        }
        Command::DistCheck(a) => commands::dist_check(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
