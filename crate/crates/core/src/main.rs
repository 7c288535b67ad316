//! Command-line front end: `netprox solve` runs a problem assembled from
//! files; `netprox bench` times a seeded random instance.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use netprox::io::{
    load_problem, write_solution, write_solution_file, write_summary, write_summary_file,
};
use netprox::solver::{solve, RhoPolicy, SolveOptions, SolveStatus, StoppingCriteria};

#[derive(Parser)]
#[command(
    name = "netprox",
    version,
    about = "ADMM solver for convex problems on graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem built from an edge list, node data, and templates
    Solve(SolveArgs),
    /// Generate and solve a seeded 3-regular Huber/network-lasso instance
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Edge list file: one "j k" pair per line, '#' comments
    #[arg(long)]
    graph: PathBuf,
    /// Node data CSV: header "id,<cols>", vector columns as name[0],name[1],...
    #[arg(long)]
    node_data: PathBuf,
    /// Node objective template, e.g. "sum_squares(x - a)"
    #[arg(long)]
    node_objective: String,
    /// Edge objective template, e.g. "netlasso(0.5)"
    #[arg(long)]
    edge_objective: String,
    /// Optional edge data CSV: header "j,k,<cols>"
    #[arg(long)]
    edge_data: Option<PathBuf>,
    /// Initial penalty parameter
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Penalty adaptation policy
    #[arg(long, value_enum, default_value_t = RhoPolicyArg::Fixed)]
    rho_policy: RhoPolicyArg,
    /// Residual-balance trigger ratio
    #[arg(long, default_value_t = 10.0)]
    mu: f64,
    /// Residual-balance scaling factor
    #[arg(long, default_value_t = 2.0)]
    tau: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps_abs: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps_rel: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Print one residual line per iteration
    #[arg(long)]
    verbose: bool,
    /// Solution CSV path (stdout if omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Summary path (stdout if omitted)
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RhoPolicyArg {
    Fixed,
    Balance,
}

#[derive(Args)]
struct BenchArgs {
    /// Node count (even, >= 4)
    #[arg(long)]
    nodes: usize,
    /// Variable size per node
    #[arg(long)]
    dim: usize,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => run_bench(args),
    };
    match outcome {
        Ok(SolveStatus::Converged) => ExitCode::SUCCESS,
        Ok(SolveStatus::MaxIters) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run_solve(args: SolveArgs) -> netprox::Result<SolveStatus> {
    let graph = load_problem(
        &args.graph,
        &args.node_data,
        &args.node_objective,
        &args.edge_objective,
        args.edge_data.as_deref(),
    )?;
    let policy = match args.rho_policy {
        RhoPolicyArg::Fixed => RhoPolicy::Fixed,
        RhoPolicyArg::Balance => RhoPolicy::ResidualBalance {
            mu: args.mu,
            tau_incr: args.tau,
            tau_decr: args.tau,
        },
    };
    let options = SolveOptions {
        criteria: StoppingCriteria {
            eps_abs: args.eps_abs,
            eps_rel: args.eps_rel,
            max_iters: args.max_iters,
        },
        rho: args.rho,
        policy,
        threads: args.threads,
        verbose: args.verbose,
        warm_start: None,
    };
    let result = solve(&graph, &options)?;

    let stdout = std::io::stdout();
    match &args.output {
        Some(path) => write_solution_file(path, &result)?,
        None => write_solution(&mut stdout.lock(), &result)?,
    }
    match &args.summary {
        Some(path) => write_summary_file(path, &result, args.rho)?,
        None => write_summary(&mut stdout.lock(), &result, args.rho)?,
    }
    Ok(result.status)
}

fn run_bench(args: BenchArgs) -> netprox::Result<SolveStatus> {
    let report = netprox::bench::run_benchmark(args.nodes, args.dim, args.seed, args.threads)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{report}")?;
    Ok(report.status)
}
