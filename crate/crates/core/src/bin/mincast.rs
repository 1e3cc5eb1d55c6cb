use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mincast::baselines::{dst_approx, DEFAULT_DST_LEVEL};
use mincast::flowcore::solve_multicast_lp;
use mincast::harness::{compare, run, CompareOptions, ExperimentConfig, Scenario};
use mincast::netmodel::io::{load_network, NetworkDoc, Table};
use mincast::netmodel::MulticastRequest;
use mincast::subgrad::{dual_subgradient_solve, DualProblem, SubgradConfig};
use mincast::wireless::{solve_lossless, solve_lossy};
use mincast::{Error, Result};

#[derive(Parser)]
#[command(name = "mincast", version, about = "Minimum-cost multicast over coded packet networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one multicast request on a network document.
    Solve(SolveArgs),
    /// Run a static experiment from a TOML config.
    Bench(RunArgs),
    /// Run a dynamic membership experiment from a TOML config.
    Dynamic(RunArgs),
    /// Relative reduction of column B against column A, matched by instance.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Lp,
    Dst,
    Subgrad,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON network document.
    network: PathBuf,
    #[arg(long)]
    source: String,
    /// Comma-separated sink names.
    #[arg(long, value_delimiter = ',', required = true)]
    sinks: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    #[arg(long, value_enum, default_value = "lp")]
    method: Method,
    /// Subgradient iterations.
    #[arg(long, default_value_t = 50)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Subgradient iterations.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value = "instance")]
    id: String,
    #[arg(long, default_value = "cost")]
    column_a: String,
    #[arg(long, default_value = "cost")]
    column_b: String,
    #[arg(long, default_value_t = 2000)]
    resamples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn solve(args: &SolveArgs) -> Result<serde_json::Value> {
    let doc = load_network(&args.network)?;
    match doc {
        NetworkDoc::Wireline(net) => {
            let s = net.require(&args.source)?;
            let sinks = args.sinks.iter().map(|t| net.require(t)).collect::<Result<Vec<_>>>()?;
            let req = MulticastRequest::new(net.node_count(), s, &sinks, args.rate)?;
            let (cost, z) = match args.method {
                Method::Lp => {
                    let sol = solve_multicast_lp(&net, &req)?;
                    (sol.cost, sol.z)
                }
                Method::Dst => {
                    let tree = dst_approx(&net, s, &sinks, DEFAULT_DST_LEVEL)?;
                    (tree.cost * args.rate, tree.subgraph(net.arc_count(), args.rate))
                }
                Method::Subgrad => {
                    let cfg = SubgradConfig { iterations: args.iters, seed: args.seed, ..SubgradConfig::default() };
                    let r = dual_subgradient_solve(DualProblem::Wireline(&net), &req, &cfg)?;
                    (r.cost, r.z)
                }
            };
            Ok(json!({ "cost": cost, "z": z.rates() }))
        }
        NetworkDoc::Wireless(h) => {
            let s = h.require(&args.source)?;
            let sinks = args.sinks.iter().map(|t| h.require(t)).collect::<Result<Vec<_>>>()?;
            let req = MulticastRequest::new(h.node_count(), s, &sinks, args.rate)?;
            let (cost, z) = match args.method {
                Method::Lp if h.reception().is_some() => {
                    let sol = solve_lossy(&h, &req)?;
                    (sol.cost, sol.z)
                }
                Method::Lp => {
                    let sol = solve_lossless(&h, &req)?;
                    (sol.cost, sol.z)
                }
                Method::Subgrad => {
                    let cfg = SubgradConfig { iterations: args.iters, seed: args.seed, ..SubgradConfig::default() };
                    let r = dual_subgradient_solve(DualProblem::Wireless(&h), &req, &cfg)?;
                    (r.cost, r.z)
                }
                Method::Dst => return Err(Error::InvalidArgument("the Steiner tree method needs a wireline network".into())),
            };
            Ok(json!({ "cost": cost, "z": z.rates() }))
        }
    }
}

fn experiment(args: &RunArgs, dynamic: bool) -> Result<String> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if dynamic != (cfg.scenario == Scenario::Dynamic) {
        let want = if dynamic { "dynamic" } else { "a static scenario" };
        return Err(Error::Config(format!("config scenario `{}` is not {want}", cfg.scenario.name())));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output = out.clone();
    }
    if let Some(iters) = args.iters {
        cfg.solver.iterations = iters;
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    let summary = run(&cfg)?;
    Ok(summary.summary.to_csv())
}

fn compare_files(args: &CompareArgs) -> Result<serde_json::Value> {
    let opts = CompareOptions {
        id_column: args.id.clone(),
        column_a: args.column_a.clone(),
        column_b: args.column_b.clone(),
        resamples: args.resamples,
        seed: args.seed,
    };
    let c = compare(&Table::load(&args.a)?, &Table::load(&args.b)?, &opts)?;
    let rows: Vec<_> = c.rows.iter().map(|r| json!({ "instance": r.id, "a": r.a, "b": r.b, "reduction": r.reduction })).collect();
    Ok(json!({ "mean": c.mean, "ci95": [c.ci95.0, c.ci95.1], "rows": rows }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Solve(a) => solve(a).map(|v| format!("{v:#}\n")),
        Command::Bench(a) => experiment(a, false),
        Command::Dynamic(a) => experiment(a, true),
        Command::Compare(a) => compare_files(a).map(|v| format!("{v:#}\n")),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = json!({ "error": e.kind(), "message": e.to_string(), "seed": e.seed() });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
