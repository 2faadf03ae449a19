use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cmlhdc::cml::CmlModel;
use cmlhdc::graph::{random_connected_graph, Graph};
use cmlhdc::harness::{run_experiment, Experiment, ExperimentConfig, DEFAULT_SEED, SEED_ENV};
use cmlhdc::seed::derive_rng;

#[derive(Parser)]
#[command(name = "cmlhdc", version, about = "Cognitive map learners with hyperdimensional node states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fraction of trained CMLs passing evaluation
    SuccessRate(ExperimentArgs),
    /// Similarity of node states to their own and other signed states
    SignSimilarity(ExperimentArgs),
    /// Similarity distribution of random hypervector pairs
    NoiseFloor(ExperimentArgs),
    /// Recovery similarity from bundles of bound pairs
    BundleRecovery(ExperimentArgs),
    /// Multi-level hierarchy simulation and chain reconstruction
    Hierarchy(ExperimentArgs),
    /// Merged experience models across three CMLs
    MonolithicExp(ExperimentArgs),
    /// Proxy-symbol map consistency grid
    ProxyMap(ExperimentArgs),
    /// Train one CML and save it as JSON
    Train(TrainArgs),
    /// Plan a path with a saved CML
    Traverse(TraverseArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Undirected edge count (default 2n)
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Cleanup threshold override
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    cycles: Option<usize>,
    /// Hierarchy depth
    #[arg(long)]
    levels: Option<usize>,
    /// Proxy map attempts per grid cell
    #[arg(long)]
    budget: Option<usize>,
    /// Complete proxy maps sought per grid cell
    #[arg(long)]
    maps: Option<usize>,
    #[arg(long, env = SEED_ENV)]
    seed: Option<u64>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON results
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run trials on one thread
    #[arg(long)]
    serial: bool,
}

impl ExperimentArgs {
    fn into_config(self, experiment: Experiment) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path).with_context(|| format!("reading {}", path.display()))?,
            None => ExperimentConfig::new(experiment),
        };
        c.experiment = experiment;
        macro_rules! set {
            ($($f:ident),*) => { $( if self.$f.is_some() { c.$f = self.$f; } )* };
        }
        set!(n, d, edges, epochs, k, m, theta, trials, cycles, levels, budget, maps, seed, out);
        c.serial |= self.serial;
        Ok(c)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    d: usize,
    /// Undirected edge count (default 2n)
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    /// Graph JSON file to train on instead of a random graph
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TraverseArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    start: usize,
    #[arg(long)]
    target: usize,
    /// Step cap (default 4n)
    #[arg(long)]
    max_steps: Option<usize>,
}

fn train(args: TrainArgs) -> Result<()> {
    let mut rng = derive_rng(args.seed, &[]);
    let graph = match &args.graph {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<Graph>(&text).with_context(|| format!("parsing graph {}", path.display()))?
        }
        None => random_connected_graph(args.n, args.edges.unwrap_or(2 * args.n), &mut rng)?,
    };
    let mut model = CmlModel::new(graph, args.d, &mut rng)?;
    model.train(args.epochs)?;
    let ev = model.evaluate(&mut rng)?;
    fs::write(&args.out, model.to_json()?).with_context(|| format!("writing {}", args.out.display()))?;
    let report = json!({
        "model": args.out,
        "success": ev.success(),
        "adjacency_errors": ev.adjacency_errors,
        "traversal_failures": ev.traversals.iter().filter(|t| !t.succeeded()).count(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn traverse(args: TraverseArgs) -> Result<()> {
    let text = fs::read_to_string(&args.model).with_context(|| format!("reading {}", args.model.display()))?;
    let model = CmlModel::from_json(&text).with_context(|| format!("parsing model {}", args.model.display()))?;
    let target_state = model.state_of(args.target)?;
    let max_steps = args.max_steps.unwrap_or_else(|| model.default_max_steps());
    let result = model.traverse(args.start, &target_state, args.target, max_steps)?;
    let shortest = model.graph().shortest_path_length(args.start, args.target)?;
    let report = json!({ "shortest": shortest, "result": result });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (experiment, args) = match cli.command {
        Command::Train(a) => return train(a),
        Command::Traverse(a) => return traverse(a),
        Command::SuccessRate(a) => (Experiment::SuccessRate, a),
        Command::SignSimilarity(a) => (Experiment::SignSimilarity, a),
        Command::NoiseFloor(a) => (Experiment::NoiseFloor, a),
        Command::BundleRecovery(a) => (Experiment::BundleRecovery, a),
        Command::Hierarchy(a) => (Experiment::Hierarchy, a),
        Command::MonolithicExp(a) => (Experiment::MonolithicExp, a),
        Command::ProxyMap(a) => (Experiment::ProxyMap, a),
    };
    let cfg = args.into_config(experiment)?;
    let record = run_experiment(&cfg).with_context(|| format!("running {experiment}"))?;
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
