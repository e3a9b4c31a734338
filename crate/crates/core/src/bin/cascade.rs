use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cascade_infer::algorithm::{infer_traced, Algorithm, InferenceSettings};
use cascade_infer::io::{
    format_graph, format_metrics, format_observation, format_tree, read_graph, read_observation,
    read_tree, write_graph, write_observation, write_tree,
};
use cascade_infer::metrics::{aggregate, evaluate_with, PlacementRule};
use cascade_infer::oracle::TreeFamily;
use cascade_infer::perfect::OpeningCost;
use cascade_infer::pipeline::{format_timings, run_pipeline, PipelineConfig};
use cascade_infer::simulate::{
    assign_random_probs, erdos_renyi, power_law, sample_observation, simulate_icm, SimConfig,
    SourceChoice,
};
use cascade_infer::{DiffusionGraph, Error, ObservationMode, Result};

#[derive(Parser)]
#[command(name = "cascade", version, about = "Infer information cascades from partial observations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic diffusion graph with random edge probabilities.
    GenGraph(GenGraphArgs),
    /// Simulate one independent-cascade run and write the true tree.
    Simulate(SimulateArgs),
    /// Hide a fraction of a tree's nodes and write the remaining observation.
    Observe(ObserveArgs),
    /// Infer a cascade tree from an observation.
    Infer(InferArgs),
    /// Score an inferred tree against the true one.
    Evaluate(EvaluateArgs),
    /// Run simulate, observe, infer and evaluate over a sweep.
    Pipeline(PipelineArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum GraphModel {
    PowerLaw,
    ErdosRenyi,
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    At,
    Exact,
    By,
}

impl From<Mode> for ObservationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::At | Mode::Exact => ObservationMode::Exact,
            Mode::By => ObservationMode::By,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Family {
    Bounded,
    Perfect,
    ShortestPath,
}

impl From<Family> for TreeFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Bounded => TreeFamily::Bounded,
            Family::Perfect => TreeFamily::Perfect,
            Family::ShortestPath => TreeFamily::ShortestPath,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Opening {
    MaxInEdge,
    Zero,
    Unit,
}

#[derive(Copy, Clone, ValueEnum)]
enum Placement {
    Depth,
    Ancestors,
}

impl From<Placement> for PlacementRule {
    fn from(p: Placement) -> Self {
        match p {
            Placement::Depth => PlacementRule::Depth,
            Placement::Ancestors => PlacementRule::Ancestors,
        }
    }
}

#[derive(Args)]
struct GenGraphArgs {
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
    #[arg(long, value_enum, default_value = "power-law")]
    model: GraphModel,
    /// Edges added per node (power-law).
    #[arg(long, default_value_t = 2)]
    attach: usize,
    /// Edge probability (Erdős–Rényi).
    #[arg(long, default_value_t = 0.01)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, short)]
    graph: PathBuf,
    /// Source label; random when omitted.
    #[arg(long)]
    source: Option<String>,
    #[arg(long, default_value_t = 1)]
    min_nodes: usize,
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long)]
    max_steps: Option<u32>,
    /// Replace the graph's probabilities with fresh random ones first.
    #[arg(long)]
    reweight: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ObserveArgs {
    #[arg(long, short)]
    graph: PathBuf,
    #[arg(long, short)]
    tree: PathBuf,
    /// Fraction of cascade nodes to hide, in [0, 1).
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long, short)]
    graph: PathBuf,
    #[arg(long = "obs", short = 'x')]
    observation: PathBuf,
    #[arg(long)]
    algo: Algorithm,
    /// How observed times are read; defaults to what the algorithm expects.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[command(flatten)]
    knobs: Knobs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Knobs {
    /// Tree family searched by the exact algorithm.
    #[arg(long, value_enum, default_value = "bounded")]
    exact_family: Family,
    /// Cost charged for opening a new parent in perfect inference.
    #[arg(long, value_enum, default_value = "max-in-edge")]
    opening: Opening,
    /// Largest per-level candidate count solved exactly.
    #[arg(long)]
    exact_cap: Option<usize>,
    /// Largest graph the exact algorithm accepts.
    #[arg(long)]
    oracle_cap: Option<usize>,
}

impl Knobs {
    fn settings(&self) -> InferenceSettings {
        let mut s = InferenceSettings {
            exact_family: self.exact_family.into(),
            ..InferenceSettings::default()
        };
        s.perfect.opening = match self.opening {
            Opening::MaxInEdge => OpeningCost::MaxInEdge,
            Opening::Zero => OpeningCost::Zero,
            Opening::Unit => OpeningCost::Unit,
        };
        if let Some(cap) = self.exact_cap {
            s.perfect.exact_cap = cap;
        }
        if let Some(cap) = self.oracle_cap {
            s.oracle_cap = cap;
        }
        s
    }
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, short)]
    graph: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    inferred: PathBuf,
    #[arg(long = "obs", short = 'x')]
    observation: PathBuf,
    #[arg(long, value_enum, default_value = "at")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "depth")]
    placement: Placement,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, short)]
    graph: PathBuf,
    #[arg(long, default_value_t = 100)]
    cascades: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.45, 0.65, 0.85])]
    sigma: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [Algorithm::Wbct, Algorithm::Wpct])]
    algo: Vec<Algorithm>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min_nodes: usize,
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long)]
    max_steps: Option<u32>,
    #[arg(long, value_enum, default_value = "depth")]
    placement: Placement,
    #[command(flatten)]
    knobs: Knobs,
    /// Also write true trees, observations and inferred trees.
    #[arg(long)]
    emit_trees: bool,
    /// Also write per-phase wall-clock times to timings.txt.
    #[arg(long)]
    timings: bool,
    #[arg(long, short)]
    out: PathBuf,
}

fn emit(out: Option<&Path>, text: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    match out {
        Some(p) => write(p),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn source_label(g: &DiffusionGraph, label: Option<&str>) -> Result<SourceChoice> {
    match label {
        None => Ok(SourceChoice::Random),
        Some(l) => g
            .node_by_label(l)
            .map(SourceChoice::Node)
            .ok_or_else(|| Error::UnknownLabel(l.to_owned())),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenGraph(a) => {
            let g = match a.model {
                GraphModel::PowerLaw => power_law(a.nodes, a.attach, a.seed)?,
                GraphModel::ErdosRenyi => erdos_renyi(a.nodes, a.edge_prob, a.seed)?,
            };
            emit(a.out.as_deref(), &format_graph(&g), |p| write_graph(p, &g))
        }
        Command::Simulate(a) => {
            let mut g = read_graph(&a.graph)?;
            if a.reweight {
                g = assign_random_probs(&g, a.seed)?;
            }
            let mut cfg = SimConfig::new(a.seed, source_label(&g, a.source.as_deref())?);
            cfg.min_nodes = a.min_nodes;
            cfg.max_nodes = a.max_nodes;
            cfg.max_steps = a.max_steps;
            let t = simulate_icm(&g, &cfg)?;
            emit(a.out.as_deref(), &format_tree(&g, &t), |p| write_tree(p, &g, &t))
        }
        Command::Observe(a) => {
            let g = read_graph(&a.graph)?;
            let t = read_tree(&a.tree, &g)?;
            let x = sample_observation(&t, a.sigma, a.seed, ObservationMode::Exact)?;
            emit(a.out.as_deref(), &format_observation(&g, &x), |p| {
                write_observation(p, &g, &x)
            })
        }
        Command::Infer(a) => {
            let g = read_graph(&a.graph)?;
            let settings = a.knobs.settings();
            let mode = a.mode.map_or_else(|| a.algo.observation_mode(&settings), Into::into);
            let x = read_observation(&a.observation, &g, mode)?;
            let inferred = infer_traced(a.algo, &g, &x, &settings, a.seed)?;
            if inferred.exact_fallback {
                eprintln!("note: some levels exceeded the exact cap and were solved greedily");
            }
            let t = inferred.tree;
            emit(a.out.as_deref(), &format_tree(&g, &t), |p| write_tree(p, &g, &t))
        }
        Command::Evaluate(a) => {
            let g = read_graph(&a.graph)?;
            let truth = read_tree(&a.truth, &g)?;
            let inferred = read_tree(&a.inferred, &g)?;
            let x = read_observation(&a.observation, &g, a.mode.into())?;
            let score = evaluate_with(&truth, &inferred, &x, a.placement.into())?;
            print!("{}", format_metrics(&aggregate([&score])));
            Ok(())
        }
        Command::Pipeline(a) => {
            let g = read_graph(&a.graph)?;
            let mut cfg = PipelineConfig::new(a.cascades, a.sigma, a.algo, a.seed);
            cfg.min_nodes = a.min_nodes;
            cfg.max_nodes = a.max_nodes;
            cfg.max_steps = a.max_steps;
            cfg.placement = a.placement.into();
            cfg.settings = a.knobs.settings();
            cfg.emit_trees = a.emit_trees;
            cfg.record_timings = a.timings;
            cfg.out_dir = Some(a.out.clone());
            let res = run_pipeline(&g, &cfg)?;
            print!("{}", std::fs::read_to_string(a.out.join("summary.txt")).unwrap_or_default());
            if a.timings {
                eprint!("{}", format_timings(&res.timings));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help/--version.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_infeasible() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
