//! Command line front end and the job runners shared with the FFI layer.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bench::{self, RunRecord};
use crate::freight::{run_freight, FreightConfig, Objective};
use crate::graph::{GraphStream, HyperNodeRecord, HypergraphStream};
use crate::heistream::{run_heistream, HeiStreamConfig, ModelKind};
use crate::io::{self, MetisReader, NodeMajorReader};
use crate::metrics::{self, QualityReport};
use crate::multisection::{run_oms, run_oms_parallel, HierarchySpec, MultisectionTree, OmsConfig, OmsScorer};
use crate::onepass::{hashing_assign, run_onepass, OnePassAlgorithm, OnePassConfig, DEFAULT_ALPHA_GROWTH, DEFAULT_GAMMA};
use crate::partition::PartitionState;
use crate::{generate, CsrGraph, Error, Hypergraph, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphAlgorithm {
    Hashing,
    Ldg,
    Fennel,
    Heistream,
    Oms,
}

impl GraphAlgorithm {
    pub fn name(&self) -> &'static str {
        match self {
            GraphAlgorithm::Hashing => "hashing",
            GraphAlgorithm::Ldg => "ldg",
            GraphAlgorithm::Fennel => "fennel",
            GraphAlgorithm::Heistream => "heistream",
            GraphAlgorithm::Oms => "oms",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HyperAlgorithm {
    Freight,
    Hashing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveArg {
    Con,
    Cut,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Con => Objective::Connectivity,
            ObjectiveArg::Cut => Objective::CutNet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Basic,
    Extended,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Basic => ModelKind::Basic,
            ModelArg::Extended => ModelKind::Extended,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerArg {
    Fennel,
    Ldg,
}

/// Every parameter of a graph partitioning run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJob {
    pub algorithm: GraphAlgorithm,
    pub k: u32,
    pub epsilon: f64,
    pub seed: u64,
    pub gamma: f64,
    pub alpha: Option<f64>,
    pub passes: u32,
    pub alpha_growth: f64,
    /// Fan-out of the multi-section tree when no hierarchy is given.
    pub base: u32,
    pub delta: usize,
    pub model: ModelKind,
    pub x: u32,
    pub scorer: OmsScorer,
    pub hash_bottom_layers: u32,
}

impl GraphJob {
    pub fn new(algorithm: GraphAlgorithm, k: u32) -> Self {
        Self {
            algorithm,
            k,
            epsilon: 0.03,
            seed: 0,
            gamma: DEFAULT_GAMMA,
            alpha: None,
            passes: 1,
            alpha_growth: DEFAULT_ALPHA_GROWTH,
            base: crate::multisection::DEFAULT_BASE,
            delta: 32768,
            model: ModelKind::Extended,
            x: 4,
            scorer: OmsScorer::Fennel,
            hash_bottom_layers: 0,
        }
    }

    fn oms_config(&self) -> OmsConfig {
        OmsConfig {
            scorer: self.scorer,
            epsilon: self.epsilon,
            gamma: self.gamma,
            alpha: self.alpha,
            hash_bottom_layers: self.hash_bottom_layers,
        }
    }

    fn tree(&self, hierarchy: Option<&HierarchySpec>) -> Result<MultisectionTree> {
        match hierarchy {
            Some(h) => {
                h.check_k(self.k)?;
                Ok(MultisectionTree::build_from_spec(h))
            }
            None => {
                if self.base < 2 {
                    return Err(Error::config("base must be at least 2"));
                }
                Ok(MultisectionTree::build_hierarchy(self.k, self.base))
            }
        }
    }
}

/// Final partition of a run plus the α the scorer used.
#[derive(Debug, Clone)]
pub struct JobOutcome {
    pub state: PartitionState,
    pub alpha: Option<f64>,
}

/// Runs `job` on a graph stream. OMS descends a tree built from `hierarchy`
/// when given and from `job.base` otherwise.
pub fn run_graph_job<S: GraphStream + ?Sized>(
    stream: &mut S,
    job: &GraphJob,
    hierarchy: Option<&HierarchySpec>,
) -> Result<JobOutcome> {
    if job.k == 0 {
        return Err(Error::config("k must be at least 1"));
    }
    match job.algorithm {
        GraphAlgorithm::Hashing | GraphAlgorithm::Ldg | GraphAlgorithm::Fennel => {
            let algorithm = match job.algorithm {
                GraphAlgorithm::Hashing => OnePassAlgorithm::Hashing,
                GraphAlgorithm::Ldg => OnePassAlgorithm::Ldg,
                _ => OnePassAlgorithm::Fennel,
            };
            let config = OnePassConfig {
                epsilon: job.epsilon,
                passes: job.passes,
                restream_alpha_growth: job.alpha_growth,
                gamma: job.gamma,
                alpha: job.alpha,
                seed: job.seed,
                ..OnePassConfig::new(algorithm, job.k)
            };
            let run = run_onepass(stream, &config)?;
            let alpha = (job.algorithm == GraphAlgorithm::Fennel).then_some(run.params.alpha);
            Ok(JobOutcome { state: run.state, alpha })
        }
        GraphAlgorithm::Heistream => {
            let config = HeiStreamConfig {
                epsilon: job.epsilon,
                model: job.model,
                x: job.x,
                passes: job.passes,
                seed: job.seed,
                gamma: job.gamma,
                alpha: job.alpha,
                ..HeiStreamConfig::new(job.k, job.delta)
            };
            let run = run_heistream(stream, &config)?;
            Ok(JobOutcome {
                state: run.state,
                alpha: Some(run.params.alpha),
            })
        }
        GraphAlgorithm::Oms => {
            let tree = job.tree(hierarchy)?;
            let run = run_oms(stream, &tree, &job.oms_config())?;
            Ok(JobOutcome {
                state: run.state,
                alpha: Some(run.params.alpha),
            })
        }
    }
}

/// Node-parallel OMS on an in-memory graph.
pub fn run_graph_job_parallel(
    graph: &CsrGraph,
    job: &GraphJob,
    hierarchy: Option<&HierarchySpec>,
    threads: usize,
) -> Result<JobOutcome> {
    if job.algorithm != GraphAlgorithm::Oms {
        return Err(Error::config("only oms runs in parallel"));
    }
    let tree = job.tree(hierarchy)?;
    let run = run_oms_parallel(graph, &tree, &job.oms_config(), threads)?;
    Ok(JobOutcome {
        state: run.state,
        alpha: Some(run.params.alpha),
    })
}

/// Every parameter of a hypergraph partitioning run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperJob {
    pub algorithm: HyperAlgorithm,
    pub objective: Objective,
    pub k: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub alpha: Option<f64>,
}

impl HyperJob {
    pub fn new(algorithm: HyperAlgorithm, objective: Objective, k: u32) -> Self {
        Self {
            algorithm,
            objective,
            k,
            epsilon: 0.03,
            gamma: DEFAULT_GAMMA,
            alpha: None,
        }
    }

    pub fn name(&self) -> String {
        match self.algorithm {
            HyperAlgorithm::Hashing => "hashing".into(),
            HyperAlgorithm::Freight => format!("freight-{}", self.objective.name()),
        }
    }
}

pub fn run_hyper_job<S: HypergraphStream + ?Sized>(stream: &mut S, job: &HyperJob) -> Result<JobOutcome> {
    if job.k == 0 {
        return Err(Error::config("k must be at least 1"));
    }
    match job.algorithm {
        HyperAlgorithm::Freight => {
            let config = FreightConfig {
                epsilon: job.epsilon,
                gamma: job.gamma,
                alpha: job.alpha,
                ..FreightConfig::new(job.objective, job.k)
            };
            let run = run_freight(stream, &config)?;
            Ok(JobOutcome {
                state: run.state,
                alpha: Some(run.params.alpha),
            })
        }
        HyperAlgorithm::Hashing => {
            if !(job.epsilon >= 0.0) {
                return Err(Error::config("epsilon must be nonnegative"));
            }
            let n = stream.header().n;
            let total = stream.total_node_weight()?;
            let mut state = PartitionState::new(n, job.k, job.epsilon, total.max(1));
            let mut rec = HyperNodeRecord::default();
            stream.rewind()?;
            while stream.next_node(&mut rec)? {
                if rec.id as usize >= n {
                    return Err(Error::Invariant(format!("record id {} outside 0..{n}", rec.id)));
                }
                let b = hashing_assign(rec.id, job.k);
                if !state.fits(b, rec.weight) {
                    state.balance_violations += 1;
                }
                state.assign(rec.id, b, rec.weight);
            }
            Ok(JobOutcome { state, alpha: None })
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "streamdecomp", version, about = "Streaming graph and hypergraph decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Partition a METIS graph.
    Partition(PartitionArgs),
    /// Buffered streaming partitioning of a METIS graph.
    Heistream(HeistreamArgs),
    /// Partition a hypergraph (node-major by default).
    #[command(visible_alias = "freight")]
    Hpartition(HpartitionArgs),
    /// Map a METIS graph onto a machine hierarchy.
    Map(MapArgs),
    /// Quality of an existing partition.
    Metrics(MetricsArgs),
    /// Convert an hMetis (net-major) file to node-major.
    Transpose(TransposeArgs),
    /// Run an algorithm matrix and write one CSV row per run.
    Bench(BenchArgs),
    /// Per-(algorithm, k) means of a bench CSV.
    Summarize(SummarizeArgs),
    /// Write a synthetic instance.
    Generate(GenerateArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CommonArgs {
    /// Input file.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.03)]
    pub epsilon: f64,
    #[arg(long, env = "STREAMDECOMP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Partition file; defaults to `<input>.part.<k>`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Metrics JSON file; printed to stdout when absent.
    #[arg(long)]
    pub metrics_json: Option<PathBuf>,
    /// Appends the metrics as one CSV row.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Load the input first and report only the algorithm time.
    #[arg(long)]
    pub time_core: bool,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// Fennel α; computed from n, m and k when absent.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PartitionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = GraphAlgorithm::Fennel)]
    pub algorithm: GraphAlgorithm,
    #[arg(long, short)]
    pub k: u32,
    /// Multi-section tree fan-out for `oms`.
    #[arg(long, default_value_t = crate::multisection::DEFAULT_BASE)]
    pub base: u32,
    #[arg(long, default_value_t = 1)]
    pub passes: u32,
    #[arg(long, default_value_t = DEFAULT_ALPHA_GROWTH)]
    pub alpha_growth: f64,
    #[arg(long, default_value_t = 32768)]
    pub delta: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Extended)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 4)]
    pub x: u32,
}

impl PartitionArgs {
    fn job(&self) -> GraphJob {
        GraphJob {
            epsilon: self.common.epsilon,
            seed: self.common.seed,
            gamma: self.common.gamma,
            alpha: self.common.alpha,
            passes: self.passes,
            alpha_growth: self.alpha_growth,
            base: self.base,
            delta: self.delta,
            model: self.model.into(),
            x: self.x,
            ..GraphJob::new(self.algorithm, self.k)
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct HeistreamArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[arg(long, short)]
    pub k: u32,
    /// Batch size in nodes.
    #[arg(long, default_value_t = 32768)]
    pub delta: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Extended)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 1)]
    pub passes: u32,
    #[arg(long, default_value_t = 4)]
    pub x: u32,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct HpartitionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = HyperAlgorithm::Freight)]
    pub algorithm: HyperAlgorithm,
    #[arg(long, short)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Con)]
    pub objective: ObjectiveArg,
    /// Input is an hMetis net-major file; it is loaded and streamed from
    /// memory.
    #[arg(long)]
    pub net_major: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapAlgorithm {
    Oms,
    Fennel,
    Ldg,
    Hashing,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct MapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Fan-outs `a1:a2:...`, innermost first.
    #[arg(long)]
    pub hierarchy: String,
    /// Distances `d1:d2:...`, innermost first.
    #[arg(long)]
    pub distances: String,
    /// `oms` maps directly; the others partition into k blocks and use
    /// block i as PE i.
    #[arg(long, value_enum, default_value_t = MapAlgorithm::Oms)]
    pub algorithm: MapAlgorithm,
    #[arg(long, value_enum, default_value_t = ScorerArg::Fennel)]
    pub scorer: ScorerArg,
    /// More than one thread runs the node-parallel variant in memory.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Bottom tree layers assigned by hashing.
    #[arg(long, default_value_t = 0)]
    pub hash_bottom_layers: u32,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct MetricsArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub partition: PathBuf,
    /// Number of blocks; the largest block id + 1 when absent.
    #[arg(long, short)]
    pub k: Option<u32>,
    #[arg(long, default_value_t = 0.03)]
    pub epsilon: f64,
    /// Input is a node-major hypergraph.
    #[arg(long)]
    pub hypergraph: bool,
    /// Input is an hMetis net-major hypergraph.
    #[arg(long)]
    pub net_major: bool,
    #[arg(long, requires = "distances")]
    pub hierarchy: Option<String>,
    #[arg(long, requires = "hierarchy")]
    pub distances: Option<String>,
    #[arg(long)]
    pub metrics_json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct TransposeArgs {
    /// hMetis net-major input.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Node-major output.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BenchArgs {
    #[arg(long = "input", short, required = true)]
    pub inputs: Vec<PathBuf>,
    /// Graph: hashing, ldg, fennel, heistream, oms. Hypergraph: hashing,
    /// freight-con, freight-cut.
    #[arg(long, value_delimiter = ',', required = true)]
    pub algorithms: Vec<String>,
    #[arg(long, short, value_delimiter = ',', required = true)]
    pub k: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    pub repeats: u32,
    /// Seed of the first repeat; repeat r uses seed + r.
    #[arg(long, env = "STREAMDECOMP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.03)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 32768)]
    pub delta: usize,
    #[arg(long, default_value_t = 1)]
    pub passes: u32,
    /// Inputs are node-major hypergraphs.
    #[arg(long)]
    pub hypergraph: bool,
    /// CSV output; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SummarizeArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenerateKind {
    Rgg2d,
    Rgg3d,
    Grid2d,
    Tri2d,
    Grid3d,
    Ba,
    Gnm,
    Hyper,
    Stencil2d,
    Stencil3d,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GenerateKind,
    /// Approximate number of nodes.
    #[arg(long, short)]
    pub n: usize,
    /// Average degree (graphs) or number of nets per node (hypergraphs).
    #[arg(long, default_value_t = 8.0)]
    pub degree: f64,
    #[arg(long, env = "STREAMDECOMP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Write hypergraphs node-major instead of hMetis.
    #[arg(long)]
    pub node_major: bool,
}

/// Parses the process arguments and runs. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli.command) {
        Ok(()) => 0,
        Err(e) if e.is_broken_pipe() => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::Partition(a) => partition_cmd(command, &a.common, &a.job(), None, 1),
        Command::Heistream(a) => {
            let job = GraphJob {
                epsilon: a.common.epsilon,
                seed: a.common.seed,
                gamma: a.common.gamma,
                alpha: a.common.alpha,
                passes: a.passes,
                delta: a.delta,
                model: a.model.into(),
                x: a.x,
                ..GraphJob::new(GraphAlgorithm::Heistream, a.k)
            };
            partition_cmd(command, &a.common, &job, None, 1)
        }
        Command::Map(a) => {
            let spec = HierarchySpec::parse(&a.hierarchy, &a.distances)?;
            let algorithm = match a.algorithm {
                MapAlgorithm::Oms => GraphAlgorithm::Oms,
                MapAlgorithm::Fennel => GraphAlgorithm::Fennel,
                MapAlgorithm::Ldg => GraphAlgorithm::Ldg,
                MapAlgorithm::Hashing => GraphAlgorithm::Hashing,
            };
            let job = GraphJob {
                epsilon: a.common.epsilon,
                seed: a.common.seed,
                gamma: a.common.gamma,
                alpha: a.common.alpha,
                scorer: match a.scorer {
                    ScorerArg::Fennel => OmsScorer::Fennel,
                    ScorerArg::Ldg => OmsScorer::Ldg,
                },
                hash_bottom_layers: a.hash_bottom_layers,
                ..GraphJob::new(algorithm, spec.k())
            };
            partition_cmd(command, &a.common, &job, Some(&spec), a.threads)
        }
        Command::Hpartition(a) => hpartition_cmd(command, a),
        Command::Metrics(a) => metrics_cmd(a),
        Command::Transpose(a) => {
            let pins = io::transpose_hmetis_file(&a.input, &a.output)?;
            eprintln!("wrote {} ({pins} pins)", a.output.display());
            Ok(())
        }
        Command::Bench(a) => bench_cmd(a),
        Command::Summarize(a) => {
            let file = File::open(&a.input).map_err(|e| io_err(&a.input, e))?;
            let rows = bench::read_csv(file)?;
            let summary = bench::bench_summary(&rows)?;
            match &a.output {
                Some(p) => bench::write_summary_csv(create(p)?, &summary),
                None => bench::write_summary_csv(std::io::stdout().lock(), &summary),
            }
        }
        Command::Generate(a) => generate_cmd(a),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: Some(path.to_owned()),
        source: e,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn instance_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn default_output(input: &Path, k: u32) -> PathBuf {
    let mut s = input.as_os_str().to_owned();
    s.push(format!(".part.{k}"));
    PathBuf::from(s)
}

/// Metrics JSON with the producing command and scorer parameters.
fn record_json(
    record: &RunRecord,
    report: &QualityReport,
    state: &PartitionState,
    alpha: Option<f64>,
    gamma: f64,
    run_spec: &Command,
) -> Result<serde_json::Value> {
    let mut v = record.to_json(run_spec)?;
    v["l_max"] = report.l_max.into();
    v["max_block_weight"] = report.max_block_weight.into();
    v["balance_violations"] = state.balance_violations.into();
    v["alpha"] = alpha.into();
    v["gamma"] = gamma.into();
    Ok(v)
}

fn emit(common: &CommonArgs, json: &serde_json::Value, record: &RunRecord) -> Result<()> {
    let text = serde_json::to_string_pretty(json)?;
    match &common.metrics_json {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{text}")?;
            w.flush()?;
        }
        None => writeln!(std::io::stdout().lock(), "{text}")?,
    }
    if let Some(p) = &common.csv {
        append_csv(p, record)?;
    }
    if record.balance_violation {
        eprintln!("warning: partition exceeds the block capacity");
    }
    Ok(())
}

fn append_csv(path: &Path, record: &RunRecord) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    w.serialize(record)?;
    w.flush()?;
    Ok(())
}

fn partition_cmd(
    command: &Command,
    common: &CommonArgs,
    job: &GraphJob,
    hierarchy: Option<&HierarchySpec>,
    threads: usize,
) -> Result<()> {
    let start = Instant::now();
    let (outcome, core_ms, graph) = if common.time_core || threads > 1 {
        let graph = io::read_metis(&common.input)?;
        let core = Instant::now();
        let outcome = if threads > 1 {
            run_graph_job_parallel(&graph, job, hierarchy, threads)?
        } else {
            run_graph_job(&mut graph.stream(), job, hierarchy)?
        };
        (outcome, ms(core), Some(graph))
    } else {
        let mut reader = MetisReader::open(&common.input)?;
        let outcome = run_graph_job(&mut reader, job, hierarchy)?;
        (outcome, ms(start), None)
    };
    let runtime_ms = if common.time_core { core_ms } else { ms(start) };
    let report = match &graph {
        Some(g) => metrics::graph_report(&mut g.stream(), &outcome.state.assignment, job.k, job.epsilon, hierarchy)?,
        None => {
            let mut reader = MetisReader::open(&common.input)?;
            metrics::graph_report(&mut reader, &outcome.state.assignment, job.k, job.epsilon, hierarchy)?
        }
    };
    let out = common.output.clone().unwrap_or_else(|| default_output(&common.input, job.k));
    io::write_partition(&outcome.state.assignment, &out)?;
    let record = RunRecord::new(
        &report,
        job.algorithm.name(),
        &instance_name(&common.input),
        job.k,
        job.epsilon,
        job.seed,
        runtime_ms,
        core_ms,
    );
    let json = record_json(&record, &report, &outcome.state, outcome.alpha, job.gamma, command)?;
    emit(common, &json, &record)
}

fn load_hypergraph(path: &Path, net_major: bool) -> Result<Hypergraph> {
    if net_major {
        io::read_hmetis(path)
    } else {
        io::read_node_major(path)
    }
}

fn hpartition_cmd(command: &Command, a: &HpartitionArgs) -> Result<()> {
    let common = &a.common;
    let job = HyperJob {
        epsilon: common.epsilon,
        gamma: common.gamma,
        alpha: common.alpha,
        ..HyperJob::new(a.algorithm, a.objective.into(), a.k)
    };
    let start = Instant::now();
    let (outcome, core_ms, hg) = if common.time_core || a.net_major {
        let hg = load_hypergraph(&common.input, a.net_major)?;
        let core = Instant::now();
        let outcome = run_hyper_job(&mut hg.stream(), &job)?;
        (outcome, ms(core), Some(hg))
    } else {
        let mut reader = NodeMajorReader::open(&common.input)?;
        let outcome = run_hyper_job(&mut reader, &job)?;
        (outcome, ms(start), None)
    };
    let runtime_ms = if common.time_core { core_ms } else { ms(start) };
    let report = match &hg {
        Some(h) => metrics::hypergraph_report(&mut h.stream(), &outcome.state.assignment, job.k, job.epsilon)?,
        None => {
            let mut reader = NodeMajorReader::open(&common.input)?;
            metrics::hypergraph_report(&mut reader, &outcome.state.assignment, job.k, job.epsilon)?
        }
    };
    let out = common.output.clone().unwrap_or_else(|| default_output(&common.input, job.k));
    io::write_partition(&outcome.state.assignment, &out)?;
    let record = RunRecord::new(
        &report,
        &job.name(),
        &instance_name(&common.input),
        job.k,
        job.epsilon,
        common.seed,
        runtime_ms,
        core_ms,
    );
    let json = record_json(&record, &report, &outcome.state, outcome.alpha, job.gamma, command)?;
    emit(common, &json, &record)
}

fn metrics_cmd(a: &MetricsArgs) -> Result<()> {
    let hierarchy = match (&a.hierarchy, &a.distances) {
        (Some(h), Some(d)) => Some(HierarchySpec::parse(h, d)?),
        _ => None,
    };
    let assignment = io::read_partition(&a.partition, None, None)?;
    let k = match a.k {
        Some(k) => k,
        None => assignment.iter().copied().max().map_or(1, |b| b + 1),
    };
    if let Some(h) = &hierarchy {
        h.check_k(k)?;
    }
    if let Some(&b) = assignment.iter().find(|&&b| b >= k) {
        return Err(Error::config(format!("block id {b} not below k = {k}")));
    }
    let report = if a.hypergraph || a.net_major {
        let hg = load_hypergraph(&a.input, a.net_major)?;
        check_len(assignment.len(), hg.n())?;
        metrics::hypergraph_report(&mut hg.stream(), &assignment, k, a.epsilon)?
    } else {
        let mut reader = MetisReader::open(&a.input)?;
        check_len(assignment.len(), reader.header().n)?;
        metrics::graph_report(&mut reader, &assignment, k, a.epsilon, hierarchy.as_ref())?
    };
    let json = serde_json::json!({
        "edge_cut": report.edge_cut,
        "cut_net": report.cut_net,
        "connectivity": report.connectivity,
        "imbalance": report.imbalance,
        "comm_cost": report.comm_cost,
        "k": k,
        "epsilon": a.epsilon,
        "l_max": report.l_max,
        "max_block_weight": report.max_block_weight,
        "balance_violation": report.max_block_weight > report.l_max,
        "instance": instance_name(&a.input),
    });
    let text = serde_json::to_string_pretty(&json)?;
    match &a.metrics_json {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{text}")?;
            w.flush()?;
        }
        None => writeln!(std::io::stdout().lock(), "{text}")?,
    }
    Ok(())
}

fn check_len(got: usize, n: usize) -> Result<()> {
    if got != n {
        return Err(Error::config(format!("partition has {got} entries, graph has {n} nodes")));
    }
    Ok(())
}

fn bench_cmd(a: &BenchArgs) -> Result<()> {
    let mut rows = Vec::new();
    for input in &a.inputs {
        let name = instance_name(input);
        if a.hypergraph {
            let hg = io::read_node_major(input)?;
            for alg in &a.algorithms {
                let (algorithm, objective) = match alg.as_str() {
                    "hashing" => (HyperAlgorithm::Hashing, Objective::Connectivity),
                    "freight-con" | "freight" => (HyperAlgorithm::Freight, Objective::Connectivity),
                    "freight-cut" => (HyperAlgorithm::Freight, Objective::CutNet),
                    other => return Err(Error::config(format!("unknown hypergraph algorithm {other:?}"))),
                };
                for &k in &a.k {
                    for r in 0..a.repeats {
                        let seed = a.seed + r as u64;
                        let job = HyperJob {
                            epsilon: a.epsilon,
                            ..HyperJob::new(algorithm, objective, k)
                        };
                        let start = Instant::now();
                        let out = run_hyper_job(&mut hg.stream(), &job)?;
                        let t = ms(start);
                        let report = metrics::hypergraph_report(&mut hg.stream(), &out.state.assignment, k, a.epsilon)?;
                        rows.push(RunRecord::new(&report, &job.name(), &name, k, a.epsilon, seed, t, t));
                    }
                }
            }
        } else {
            let g = io::read_metis(input)?;
            for alg in &a.algorithms {
                let algorithm = GraphAlgorithm::from_str(alg, true)
                    .map_err(|_| Error::config(format!("unknown graph algorithm {alg:?}")))?;
                for &k in &a.k {
                    for r in 0..a.repeats {
                        let seed = a.seed + r as u64;
                        let job = GraphJob {
                            epsilon: a.epsilon,
                            seed,
                            passes: a.passes,
                            delta: a.delta,
                            ..GraphJob::new(algorithm, k)
                        };
                        let start = Instant::now();
                        let out = run_graph_job(&mut g.stream(), &job, None)?;
                        let t = ms(start);
                        let report = metrics::graph_report(&mut g.stream(), &out.state.assignment, k, a.epsilon, None)?;
                        rows.push(RunRecord::new(&report, algorithm.name(), &name, k, a.epsilon, seed, t, t));
                    }
                }
            }
        }
    }
    if rows.iter().any(|r| r.balance_violation) {
        eprintln!("warning: some partitions exceed the block capacity");
    }
    match &a.output {
        Some(p) => bench::write_csv(create(p)?, &rows),
        None => bench::write_csv(std::io::stdout().lock(), &rows),
    }
}

fn generate_cmd(a: &GenerateArgs) -> Result<()> {
    if a.n == 0 {
        return Err(Error::config("n must be positive"));
    }
    let side2 = ((a.n as f64).sqrt().round() as u32).max(1);
    let side3 = ((a.n as f64).cbrt().round() as u32).max(1);
    let graph = |g: CsrGraph| io::write_metis(&g, &a.output);
    let hyper = |h: Hypergraph| {
        if a.node_major {
            io::write_node_major(&h, &a.output)
        } else {
            io::write_hmetis(&h, &a.output)
        }
    };
    match a.kind {
        GenerateKind::Rgg2d => graph(generate::rgg::<2>(a.n, a.degree, a.seed)),
        GenerateKind::Rgg3d => graph(generate::rgg::<3>(a.n, a.degree, a.seed)),
        GenerateKind::Grid2d => graph(generate::grid2d(side2, side2, false)),
        GenerateKind::Tri2d => graph(generate::grid2d(side2, side2, true)),
        GenerateKind::Grid3d => graph(generate::grid3d(side3, side3, side3)),
        GenerateKind::Ba => graph(generate::barabasi_albert(a.n, (a.degree / 2.0).round().max(1.0) as usize, a.seed)),
        GenerateKind::Gnm => graph(generate::gnm(a.n, (a.n as f64 * a.degree / 2.0) as usize, a.seed)),
        GenerateKind::Hyper => hyper(generate::random_hypergraph(
            a.n,
            (a.n as f64 * a.degree / 4.0).max(1.0) as usize,
            8,
            a.seed,
        )?),
        GenerateKind::Stencil2d => hyper(generate::stencil2d_rownet(side2, side2, false)?),
        GenerateKind::Stencil3d => hyper(generate::stencil3d_rownet(side3, side3, side3)?),
    }
}
