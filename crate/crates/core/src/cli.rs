//! Command-line front end.
//!
//! Every JSON artifact is wrapped in an envelope carrying the tool version,
//! the master seed and an echo of the effective configuration. Stage seeds
//! are derived from the master seed with [`crate::seed::derive_seed`].

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::census::{scan_motifs, triad_census, MotifClass, MotifScore, MotifSearchConfig};
use crate::combinatorics::{
    count_interaction_topologies, enumerate_core_combinations, extension_classes, unique_interaction_count,
    CombinationTopology, ExtensionClass, InteractionCount, Motif,
};
use crate::detect::{detect, results_csv, DetectConfig, DetectReport};
use crate::dynamics::{
    circuit_library, build_circuit, catalog_listing, classify_steady_state, find_fixed_points, integrate_many,
    parse_initial, phase_portrait, phase_relation, pulse_metrics, CircuitModel, CircuitTopology, ClassifyTolerances,
    FixedPoint, FixedPointSearch, PhaseRelation, PortraitConfig, PulseMetrics, SteadyState, SteadyStateClass,
};
use crate::error::{Error, ErrorKind, Result};
use crate::graph::{
    downsample, load_edge_list, validate_downsample, write_edge_list, DirectedGraph, DownsampleConfig, LoadReport,
    ParseOptions, ValidationConfig, ValidationReport,
};
use crate::nullmodel::{AnnealConfig, NullModelConfig};
use crate::seed::{derive_seed, STREAM_DOWNSAMPLE, STREAM_FIXED_POINTS, STREAM_MOTIFS, STREAM_NULL, STREAM_VALIDATION};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Value every unspecified initial condition takes in `simulate`.
pub const DEFAULT_INITIAL: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "hypermotif", version, about = "Detect, enumerate and simulate network motif combinations")]
pub struct Cli {
    /// Master seed for every stochastic stage.
    #[arg(long, global = true, env = "HYPERMOTIF_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triad census and motif significance of an edge list.
    Census(CensusArgs),
    /// Over- and under-represented motif-role combinations.
    Detect(DetectArgs),
    /// Ways to combine or interconnect two motifs.
    Enumerate(EnumerateArgs),
    /// Integrate a circuit model and classify its behavior.
    Simulate(SimulateArgs),
    /// Vector field and nullclines of a two-variable slice.
    Portrait(PortraitArgs),
    /// Random-walk downsampling of a large network.
    Downsample(DownsampleArgs),
    /// List the circuit model catalog.
    Catalog,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NetworkArgs {
    /// Edge list: one `source target` pair per line.
    pub input: PathBuf,
    /// Largest motif size; only 3 is supported.
    #[arg(long, default_value_t = 3)]
    pub motif_size: usize,
    /// Drop self-loop lines instead of keeping them.
    #[arg(long)]
    pub no_self_loops: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CensusArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub network: NetworkArgs,
    /// Rewired networks used to score motifs (0 skips scoring).
    #[arg(long, default_value_t = 100)]
    pub ensemble: usize,
    #[arg(long, default_value_t = crate::census::DEFAULT_MOTIF_Z)]
    pub z_threshold: f64,
    /// Swap attempts per edge when rewiring.
    #[arg(long, default_value_t = 100)]
    pub swap_multiplier: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DetectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub network: NetworkArgs,
    /// Census-constrained random networks.
    #[arg(long, default_value_t = 100)]
    pub ensemble: usize,
    /// Rewired networks for motif scoring (defaults to --ensemble).
    #[arg(long)]
    pub motif_ensemble: Option<usize>,
    #[arg(long, default_value_t = crate::detect::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100)]
    pub swap_multiplier: usize,
    /// Annealing proposal budget per ensemble member.
    #[arg(long, default_value_t = 2_000_000)]
    pub max_iterations: u64,
    /// Also write every ensemble member as `ensemble_<i>.tsv`.
    #[arg(long)]
    pub write_ensemble: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumerateMode {
    Combine,
    Interact,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnumerateArgs {
    /// First motif: SL, MUTUAL, FFL, FBL or any triad class name.
    pub motif_a: String,
    pub motif_b: String,
    #[arg(long, value_enum, default_value_t = EnumerateMode::Combine)]
    pub mode: EnumerateMode,
    /// Report counts only.
    #[arg(long)]
    pub count_only: bool,
    /// Include extension classes of every core topology.
    #[arg(long)]
    pub extensions: bool,
    /// Count interactions for undirected networks.
    #[arg(long)]
    pub undirected: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Catalog model id (see `catalog`).
    pub model: Option<String>,
    /// JSON circuit topology instead of a catalog id.
    #[arg(long)]
    pub topology: Option<PathBuf>,
    /// Hill parameter overrides such as `n_xx=1,k_xy=0.2`.
    #[arg(long = "param", value_delimiter = ',')]
    pub params: Vec<String>,
    /// Cooperativity applied to every Hill factor.
    #[arg(long)]
    pub n: Option<f64>,
    /// Half-max level applied to every Hill factor.
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Initial condition such as `X=0.1,Y=0.2`; repeat for a sweep.
    #[arg(long)]
    pub init: Vec<String>,
    #[arg(long, default_value_t = crate::dynamics::DEFAULT_STEP)]
    pub step: f64,
    #[arg(long, default_value_t = crate::dynamics::DEFAULT_HORIZON)]
    pub horizon: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PortraitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Grid points per axis.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Horizontal variable (defaults to the first).
    #[arg(long)]
    pub x: Option<String>,
    /// Vertical variable (defaults to the second).
    #[arg(long)]
    pub y: Option<String>,
    /// Horizontal range `lo:hi`.
    #[arg(long)]
    pub x_range: Option<String>,
    #[arg(long)]
    pub y_range: Option<String>,
    /// Values of the other variables, such as `Z=0.2`.
    #[arg(long)]
    pub freeze: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DownsampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub network: NetworkArgs,
    /// Length of the sampled entry list.
    #[arg(long)]
    pub sz: usize,
    #[arg(long, default_value_t = 0.85)]
    pub walk_probability: f64,
    /// Compare degree distribution and motifs with the full network.
    #[arg(long)]
    pub validate: bool,
    /// Rewired networks per motif scan during validation.
    #[arg(long, default_value_t = 100)]
    pub motif_ensemble: usize,
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: C,
    result: R,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(format!("cannot serialize output: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn envelope<C: Serialize, R: Serialize>(command: &str, seed: u64, config: C, result: R) -> Result<String> {
    to_json(&Envelope {
        tool: "hypermotif",
        version: VERSION,
        command,
        seed,
        config,
        result,
    })
}

struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

fn load_network(args: &NetworkArgs) -> Result<(DirectedGraph, LoadReport)> {
    if args.motif_size != 3 {
        return Err(Error::UnsupportedMotifSize(args.motif_size));
    }
    load_edge_list(
        &args.input,
        &ParseOptions {
            allow_self_loops: !args.no_self_loops,
        },
    )
}

#[derive(Serialize)]
struct ClassCount {
    class: MotifClass,
    code: u8,
    connected: bool,
    count: u64,
}

#[derive(Serialize)]
struct CensusResult {
    nodes: usize,
    edges: usize,
    load: LoadReport,
    self_loops: u64,
    triads: Vec<ClassCount>,
    motif_scores: Vec<MotifScore>,
    motifs: Vec<MotifClass>,
}

fn cmd_census(args: &CensusArgs, seed: u64, out: &mut Output) -> Result<String> {
    let (g, load) = load_network(&args.network)?;
    let census = triad_census(&g);
    let motif_cfg = MotifSearchConfig {
        ensemble_size: args.ensemble,
        swap_multiplier: args.swap_multiplier,
        z_threshold: args.z_threshold,
        seed: derive_seed(seed, STREAM_MOTIFS),
        ..Default::default()
    };
    let motif_scores = if args.ensemble == 0 { Vec::new() } else { scan_motifs(&g, &motif_cfg)? };
    let motifs: Vec<MotifClass> = motif_scores.iter().filter(|s| s.significant).map(|s| s.motif_class).collect();
    let result = CensusResult {
        nodes: g.node_count(),
        edges: g.edge_count(),
        load,
        self_loops: census.self_loops,
        triads: MotifClass::all_triads()
            .into_iter()
            .map(|c| ClassCount {
                class: c,
                code: c.canonical_code(),
                connected: c.is_connected(),
                count: census.count(c),
            })
            .collect(),
        motif_scores,
        motifs,
    };
    let summary = format!(
        "{} nodes, {} edges, significant motifs: [{}]",
        result.nodes,
        result.edges,
        result.motifs.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
    );
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        args: &'a CensusArgs,
        motifs: &'a MotifSearchConfig,
    }
    out.write(
        "census.json",
        &envelope("census", seed, Config { args, motifs: &motif_cfg }, &result)?,
    )?;
    Ok(summary)
}

fn detect_config(args: &DetectArgs, seed: u64) -> DetectConfig {
    DetectConfig {
        null: NullModelConfig {
            ensemble_size: args.ensemble,
            swap_multiplier: args.swap_multiplier,
            anneal: AnnealConfig {
                max_iterations: args.max_iterations,
                ..Default::default()
            },
            seed: derive_seed(seed, STREAM_NULL),
        },
        motifs: MotifSearchConfig {
            ensemble_size: args.motif_ensemble.unwrap_or(args.ensemble),
            swap_multiplier: args.swap_multiplier,
            seed: derive_seed(seed, STREAM_MOTIFS),
            ..Default::default()
        },
        alpha: args.alpha,
    }
}

fn cmd_detect(args: &DetectArgs, seed: u64, out: &mut Output) -> Result<String> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", args.alpha)));
    }
    let (g, load) = load_network(&args.network)?;
    let cfg = detect_config(args, seed);
    let report = detect(&g, &cfg)?;
    #[derive(Serialize)]
    struct DetectResult<'a> {
        nodes: usize,
        edges: usize,
        load: LoadReport,
        #[serde(flatten)]
        report: &'a DetectReport,
    }
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        args: &'a DetectArgs,
        pipeline: &'a DetectConfig,
    }
    let result = DetectResult {
        nodes: g.node_count(),
        edges: g.edge_count(),
        load,
        report: &report,
    };
    out.write("detect.json", &envelope("detect", seed, Config { args, pipeline: &cfg }, &result)?)?;
    out.write("detect.csv", &results_csv(&report.results))?;
    if args.write_ensemble {
        let width = report.ensemble_graphs.len().to_string().len();
        for (i, m) in report.ensemble_graphs.iter().enumerate() {
            out.write(&format!("ensemble_{i:0width$}.tsv"), &write_edge_list(m))?;
        }
    }
    let significant: Vec<String> = report
        .significant()
        .map(|s| format!("{} ({}, q={:.3e})", s.name(), s.direction, s.q))
        .collect();
    Ok(format!(
        "{} motif classes, {} statistics, significant: [{}]",
        report.motifs.len(),
        report.results.len(),
        significant.join(", ")
    ))
}

#[derive(Serialize)]
struct CoreEntry {
    #[serde(flatten)]
    topology: CombinationTopology,
    #[serde(skip_serializing_if = "Option::is_none")]
    extension_classes: Option<Vec<ExtensionClass>>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum EnumerateResult {
    Combine {
        motif_a: String,
        motif_b: String,
        count: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        topologies: Option<Vec<CoreEntry>>,
    },
    Interact {
        motif_a: String,
        motif_b: String,
        counts: InteractionCount,
        #[serde(skip_serializing_if = "Option::is_none")]
        unique_non_empty: Option<String>,
    },
}

fn enumerate_result(args: &EnumerateArgs) -> Result<EnumerateResult> {
    let a: Motif = args.motif_a.parse()?;
    let b: Motif = args.motif_b.parse()?;
    Ok(match args.mode {
        EnumerateMode::Combine => {
            let cores = enumerate_core_combinations(&a, &b)?;
            let count = cores.len();
            let topologies = if args.count_only {
                None
            } else {
                Some(
                    cores
                        .into_iter()
                        .map(|topology| {
                            let extension_classes = if args.extensions { Some(extension_classes(&topology)?) } else { None };
                            Ok(CoreEntry {
                                topology,
                                extension_classes,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?,
                )
            };
            EnumerateResult::Combine {
                motif_a: a.name.clone(),
                motif_b: b.name.clone(),
                count,
                topologies,
            }
        }
        EnumerateMode::Interact => EnumerateResult::Interact {
            counts: count_interaction_topologies(a.size, b.size, !args.undirected),
            unique_non_empty: (!args.count_only && !args.undirected).then(|| unique_interaction_count(&a, &b).to_string()),
            motif_a: a.name,
            motif_b: b.name,
        },
    })
}

fn cmd_enumerate(args: &EnumerateArgs, seed: u64, out: Option<&mut Output>) -> Result<String> {
    let result = enumerate_result(args)?;
    let summary = match &result {
        EnumerateResult::Combine { count, .. } => format!("{count} core topologies"),
        EnumerateResult::Interact { counts, .. } => format!("{} labeled linkages", counts.labeled),
    };
    let json = envelope("enumerate", seed, args, &result)?;
    match out {
        Some(out) => {
            out.write("enumerate.json", &json)?;
            Ok(summary)
        }
        None => Ok(json.trim_end().to_string()),
    }
}

fn load_model(args: &ModelArgs) -> Result<CircuitModel> {
    let mut model = match (&args.model, &args.topology) {
        (Some(id), None) => circuit_library(id)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let topo: CircuitTopology = serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
            build_circuit(&topo)?
        }
        _ => return Err(Error::InvalidArgument("give either a model id or --topology".into())),
    };
    if let Some(n) = args.n {
        model.set_all('n', n)?;
    }
    if let Some(k) = args.k {
        model.set_all('k', k)?;
    }
    for p in &args.params {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("parameter `{p}` is not NAME=VALUE")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("parameter value `{value}` is not a number")))?;
        model.set_parameter(name.trim(), value)?;
    }
    Ok(model)
}

fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

#[derive(Serialize)]
struct PairPhase {
    a: String,
    b: String,
    #[serde(flatten)]
    relation: PhaseRelation,
}

#[derive(Serialize)]
struct VariablePulse {
    variable: String,
    #[serde(flatten)]
    metrics: PulseMetrics,
}

#[derive(Serialize)]
struct Run {
    initial: Vec<f64>,
    final_state: Vec<f64>,
    classification: SteadyStateClass,
    pulses: Vec<VariablePulse>,
    phases: Vec<PairPhase>,
    trajectory_file: String,
}

#[derive(Serialize)]
struct ModelSummary<'a> {
    id: &'a str,
    variables: &'a [String],
    equations: Vec<String>,
}

fn fixed_point_search(seed: u64) -> FixedPointSearch {
    FixedPointSearch {
        seed: derive_seed(seed, STREAM_FIXED_POINTS),
        ..Default::default()
    }
}

fn cmd_simulate(args: &SimulateArgs, seed: u64, out: &mut Output) -> Result<String> {
    let model = load_model(&args.model)?;
    let specs = if args.init.is_empty() { vec![String::new()] } else { args.init.clone() };
    let initials = specs
        .iter()
        .map(|s| parse_initial(&model, s, DEFAULT_INITIAL))
        .collect::<Result<Vec<_>>>()?;
    let trajectories = integrate_many(&model, &initials, args.horizon, args.step)?;
    let tol = ClassifyTolerances::default();
    let stem = file_stem(&model.id);
    let mut runs = Vec::new();
    for (i, tr) in trajectories.iter().enumerate() {
        let name = if trajectories.len() == 1 { format!("traj_{stem}.csv") } else { format!("traj_{stem}_{i}.csv") };
        out.write(&name, &tr.to_csv())?;
        let classification = classify_steady_state(&model, tr, &tol)?;
        let pulses = (0..model.dim())
            .map(|v| {
                Ok(VariablePulse {
                    variable: model.variables[v].clone(),
                    metrics: pulse_metrics(tr, v)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let oscillating: Vec<usize> = classification
            .variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.class == SteadyState::SustainedOscillation)
            .map(|(i, _)| i)
            .collect();
        let mut phases = Vec::new();
        for (x, &a) in oscillating.iter().enumerate() {
            for &b in &oscillating[x + 1..] {
                if let Ok(relation) = phase_relation(tr, a, tr, b, &tol) {
                    phases.push(PairPhase {
                        a: model.variables[a].clone(),
                        b: model.variables[b].clone(),
                        relation,
                    });
                }
            }
        }
        runs.push(Run {
            initial: tr.states[0].clone(),
            final_state: tr.final_state().to_vec(),
            classification,
            pulses,
            phases,
            trajectory_file: name,
        });
    }
    let fixed_points = find_fixed_points(&model, &fixed_point_search(seed))?;
    let stable = fixed_points.iter().filter(|p| p.stability.is_stable()).count();
    #[derive(Serialize)]
    struct SimResult<'a> {
        model: ModelSummary<'a>,
        fixed_points: &'a [FixedPoint],
        stable_fixed_points: usize,
        runs: Vec<Run>,
    }
    let summary = format!(
        "{}: {} run(s), classes [{}], {} stable fixed point(s)",
        model.id,
        runs.len(),
        runs.iter()
            .map(|r| format!("{:?}", r.classification.overall))
            .collect::<Vec<_>>()
            .join(", "),
        stable
    );
    let result = SimResult {
        model: ModelSummary {
            id: &model.id,
            variables: &model.variables,
            equations: model.equations(),
        },
        fixed_points: &fixed_points,
        stable_fixed_points: stable,
        runs,
    };
    out.write(&format!("simulate_{stem}.json"), &envelope("simulate", seed, args, &result)?)?;
    Ok(summary)
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidArgument(format!("range `{s}` is not lo:hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn cmd_portrait(args: &PortraitArgs, seed: u64, out: &mut Output) -> Result<String> {
    let model = load_model(&args.model)?;
    let mut cfg = PortraitConfig::for_model(&model, args.grid)?;
    let top = model.max_production();
    if let Some(x) = &args.x {
        cfg.x_var = model.variable_index(x)?;
        cfg.x_range = (0.0, 1.1 * top[cfg.x_var].max(1e-3));
    }
    if let Some(y) = &args.y {
        cfg.y_var = model.variable_index(y)?;
        cfg.y_range = (0.0, 1.1 * top[cfg.y_var].max(1e-3));
    }
    if let Some(r) = &args.x_range {
        cfg.x_range = parse_range(r)?;
    }
    if let Some(r) = &args.y_range {
        cfg.y_range = parse_range(r)?;
    }
    if let Some(f) = &args.freeze {
        cfg.frozen = parse_initial(&model, f, 0.0)?;
    }
    let portrait = phase_portrait(&model, &cfg)?;
    let dx = (cfg.x_range.1 - cfg.x_range.0) / (cfg.nx.max(2) - 1) as f64;
    let intersections = portrait.intersections(2.0 * dx);
    let fixed_points: Vec<FixedPoint> = if model.dim() == 2 {
        find_fixed_points(&model, &fixed_point_search(seed))?
    } else {
        Vec::new()
    };
    let stem = file_stem(&model.id);
    out.write(&format!("portrait_{stem}_field.csv"), &portrait.field_csv())?;
    out.write(&format!("portrait_{stem}_nullclines.csv"), &portrait.nullcline_csv())?;
    #[derive(Serialize)]
    struct PortraitResult<'a> {
        model: ModelSummary<'a>,
        grid: &'a PortraitConfig,
        nullcline_intersections: &'a [(f64, f64)],
        fixed_points: &'a [FixedPoint],
    }
    let result = PortraitResult {
        model: ModelSummary {
            id: &model.id,
            variables: &model.variables,
            equations: model.equations(),
        },
        grid: &cfg,
        nullcline_intersections: &intersections,
        fixed_points: &fixed_points,
    };
    out.write(&format!("portrait_{stem}.json"), &envelope("portrait", seed, args, &result)?)?;
    Ok(format!("{}: {} nullcline intersection(s)", model.id, intersections.len()))
}

fn cmd_downsample(args: &DownsampleArgs, seed: u64, out: &mut Output) -> Result<String> {
    let (g, load) = load_network(&args.network)?;
    let cfg = DownsampleConfig {
        walk_probability: args.walk_probability,
        ..DownsampleConfig::new(args.sz, derive_seed(seed, STREAM_DOWNSAMPLE))
    };
    let r = downsample(&g, &cfg)?;
    let validation_cfg = ValidationConfig {
        motifs: MotifSearchConfig {
            ensemble_size: args.motif_ensemble,
            seed: derive_seed(seed, STREAM_VALIDATION),
            ..Default::default()
        },
    };
    let validation = if args.validate { Some(validate_downsample(&g, &r.graph, &validation_cfg)?) } else { None };
    #[derive(Serialize)]
    struct DownsampleResult<'a> {
        load: LoadReport,
        nodes: usize,
        edges: usize,
        anchor_draws: usize,
        warnings: &'a [String],
        sample: &'a [String],
        validation: Option<ValidationReport>,
    }
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        args: &'a DownsampleArgs,
        walk: &'a DownsampleConfig,
        validation: Option<&'a ValidationConfig>,
    }
    let summary = format!(
        "sampled {} of {} nodes ({} edges){}",
        r.graph.node_count(),
        g.node_count(),
        r.graph.edge_count(),
        validation
            .as_ref()
            .map(|v| format!(", KS distance {:.4}, same motifs: {}", v.ks_distance, v.same_motifs))
            .unwrap_or_default()
    );
    let result = DownsampleResult {
        load,
        nodes: r.graph.node_count(),
        edges: r.graph.edge_count(),
        anchor_draws: r.anchor_draws,
        warnings: &r.warnings,
        sample: &r.sample,
        validation,
    };
    out.write("downsample.tsv", &write_edge_list(&r.graph))?;
    let config = Config {
        args,
        walk: &cfg,
        validation: args.validate.then_some(&validation_cfg),
    };
    out.write("downsample.json", &envelope("downsample", seed, config, &result)?)?;
    Ok(summary)
}

fn cmd_catalog(seed: u64, out: Option<&mut Output>) -> Result<String> {
    let json = envelope("catalog", seed, serde_json::json!({}), catalog_listing())?;
    match out {
        Some(out) => {
            out.write("catalog.json", &json)?;
            Ok(format!("{} models", catalog_listing().len()))
        }
        None => Ok(json.trim_end().to_string()),
    }
}

fn execute(cli: &Cli) -> Result<String> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let seed = cli.seed;
    let run = || -> Result<String> {
        match &cli.command {
            Command::Census(a) => cmd_census(a, seed, &mut Output::new(&dir)?),
            Command::Detect(a) => cmd_detect(a, seed, &mut Output::new(&dir)?),
            Command::Simulate(a) => cmd_simulate(a, seed, &mut Output::new(&dir)?),
            Command::Portrait(a) => cmd_portrait(a, seed, &mut Output::new(&dir)?),
            Command::Downsample(a) => cmd_downsample(a, seed, &mut Output::new(&dir)?),
            Command::Enumerate(a) => match &cli.out {
                Some(d) => cmd_enumerate(a, seed, Some(&mut Output::new(d)?)),
                None => cmd_enumerate(a, seed, None),
            },
            Command::Catalog => match &cli.out {
                Some(d) => cmd_catalog(seed, Some(&mut Output::new(d)?)),
                None => cmd_catalog(seed, None),
            },
        }
    };
    match cli.jobs {
        Some(0) => Err(Error::InvalidArgument("--jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {j} worker threads: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Process exit code for an error category.
pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Usage => 1,
        ErrorKind::Data => 2,
        ErrorKind::Numeric => 3,
    }
}

/// Parses arguments, runs the command and returns the exit code:
/// 0 success, 1 usage error, 2 data error, 3 numeric failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    match execute(&cli) {
        Ok(summary) => {
            use std::io::Write;
            // A closed pipe downstream is not a failure of the command.
            let _ = writeln!(std::io::stdout().lock(), "{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.kind())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["hypermotif", "detect", "net.txt", "--seed", "7", "--ensemble", "20", "--jobs", "2"]).unwrap();
        assert_eq!(cli.seed, 7);
        assert_eq!(cli.jobs, Some(2));
        match cli.command {
            Command::Detect(a) => assert_eq!(a.ensemble, 20),
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn enumerate_counts() {
        let args = |a: &str, b: &str, mode| EnumerateArgs {
            motif_a: a.into(),
            motif_b: b.into(),
            mode,
            count_only: true,
            extensions: false,
            undirected: false,
        };
        match enumerate_result(&args("FFL", "FFL", EnumerateMode::Combine)).unwrap() {
            EnumerateResult::Combine { count, .. } => assert_eq!(count, 12),
            _ => panic!(),
        }
        match enumerate_result(&args("SL", "FFL", EnumerateMode::Combine)).unwrap() {
            EnumerateResult::Combine { count, .. } => assert_eq!(count, 3),
            _ => panic!(),
        }
        match enumerate_result(&args("FFL", "FFL", EnumerateMode::Interact)).unwrap() {
            EnumerateResult::Interact { counts, .. } => assert_eq!(counts.labeled.to_string(), "262144"),
            _ => panic!(),
        }
    }

    #[test]
    fn model_overrides() {
        let args = ModelArgs {
            model: Some("M3".into()),
            topology: None,
            params: vec!["k_xx=0.4".into()],
            n: Some(1.0),
            k: None,
        };
        let m = load_model(&args).unwrap();
        assert_eq!(m.equations()[0], "X' = X^1/(0.4^1 + X^1) - X");
        let bad = ModelArgs { params: vec!["k_xx".into()], ..args };
        assert!(load_model(&bad).is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1.5").unwrap(), (0.0, 1.5));
        assert!(parse_range("1").is_err());
    }
}
