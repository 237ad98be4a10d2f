//! mpqw: multi-particle quantum-walk graph distinguishers.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 resource-guard
//! refusal, 3 numerical non-convergence.

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mpqw_core::cfi::{build_cai_pair, build_morris_pair, CfiPair};
use mpqw_core::evolve::EvolveError;
use mpqw_core::experiments::{
    default_theta_grid, run_localized, run_mhop_comparison, run_superposition, ExperimentError,
    ExperimentSpec, InputMode, PinfMode,
};
use mpqw_core::graph::{
    parse_edge_list, parse_graph6, write_edge_list, write_graph6, Graph, IsoError,
};
use mpqw_core::occupation::{build_occupation_graph_with_limit, OccupationError};
use mpqw_core::srg::{
    occupation_degree_profile, petersen, rooks_4x4, shrikhande, srg_params,
    verify_closed_algebra, PairType,
};
use mpqw_core::stats::ParticleStatistics;
use mpqw_core::wl::{compare as wl_compare, WlError};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "mpqw", version, about = "Multi-particle quantum walks that distinguish WL-hard graph pairs")]
struct Cli {
    /// TOML config file; flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (flag > MPQW_THREADS > config file > all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON/CSV document here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate graphs
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Occupation-graph inspection
    Occ {
        #[command(subcommand)]
        what: OccCommand,
    },
    /// Weisfeiler-Leman comparison of a pair
    Wl {
        /// Pair spec: `morris:K`, `cai:K`, `srg16`, or `FILE,FILE`
        #[arg(long)]
        pair: String,
        /// 1 = color refinement, >= 2 = oblivious k-WL
        #[arg(long, default_value_t = 1)]
        arity: usize,
        /// Cap on total ordered tuples for k-WL
        #[arg(long, default_value_t = mpqw_core::wl::DEFAULT_TUPLE_GUARD)]
        tuple_guard: usize,
    },
    /// Walk-based Δ between the two graphs of a pair
    Delta(DeltaArgs),
    /// Exact integer hop-count comparison (first m where A^m data differ)
    Mhop {
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 1)]
        walk_k: usize,
        #[arg(long, default_value_t = 8)]
        m_max: usize,
    },
    /// Strongly-regular graph checks
    Srg {
        #[command(subcommand)]
        what: SrgCommand,
    },
    /// Reproduce a results table (1-4)
    ReproduceTable {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        table: u8,
        /// Include the long-running large-k columns (dense eigensolves,
        /// k=3 boson/fermion sweeps)
        #[arg(long)]
        full: bool,
        /// Emit CSV instead of JSON
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        thetas: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Generate a rival CFI pair; writes two graph files plus
    /// `<file>.labels.json` sidecars with the node labels
    Cfi {
        #[arg(long, value_enum)]
        construction: Construction,
        #[arg(long)]
        k: usize,
        /// Two output paths (`.g6` for graph6, anything else edge list)
        #[arg(long, num_args = 2)]
        out: Vec<PathBuf>,
    },
    /// Write a named strongly regular graph
    Srg {
        #[arg(long, value_enum)]
        which: NamedSrg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert between graph6 and edge-list formats (by extension)
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum OccCommand {
    /// Summarize the k-particle occupation graph of a base graph
    Dump {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = mpqw_core::occupation::DEFAULT_BASIS_LIMIT)]
        basis_limit: usize,
        /// Include the full occupation edge list in the output
        #[arg(long)]
        edges: bool,
    },
}

#[derive(Subcommand, Debug)]
enum SrgCommand {
    /// Verify SRG parameters, the closed algebra, and the G^(2)
    /// degree profiles
    Verify {
        #[arg(long)]
        graph: String,
    },
}

#[derive(Args, Debug)]
struct DeltaArgs {
    /// Pair spec: `morris:K`, `cai:K`, `srg16`, or `FILE,FILE`
    #[arg(long)]
    pair: String,
    #[arg(long, default_value_t = 1)]
    walk_k: usize,
    #[arg(long, value_enum, default_value_t = InputArg::Superposition)]
    input: InputArg,
    #[arg(long, value_enum, default_value_t = StatsArg::Hardcore)]
    stats: StatsArg,
    /// Number of θ grid points on (0.1, 2π)
    #[arg(long)]
    thetas: Option<usize>,
    /// Also compute the θ-independent limiting distribution
    #[arg(long, value_enum)]
    pinf: Option<PinfArg>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    dense_threshold: Option<usize>,
    #[arg(long)]
    basis_limit: Option<usize>,
    #[arg(long)]
    entry_limit: Option<usize>,
    /// Flat multiset amplitudes instead of the product-state boson input
    #[arg(long)]
    boson_multiset_basis: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum Construction {
    Morris,
    Cai,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum NamedSrg {
    Rooks4x4,
    Shrikhande,
    Petersen,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum, Serialize)]
enum InputArg {
    Superposition,
    Localized,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum, Serialize)]
enum StatsArg {
    Hardcore,
    Boson,
    Fermion,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum, Serialize)]
enum PinfArg {
    Projector,
    TimeAverage,
}

/// Optional defaults loadable from a TOML file; flags override.
#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    threads: Option<usize>,
    thetas: Option<usize>,
    dense_threshold: Option<usize>,
    basis_limit: Option<usize>,
    entry_limit: Option<usize>,
    t_max: Option<f64>,
    samples: Option<usize>,
}

/// Fully-resolved knobs, embedded in every output document.
#[derive(Debug, Serialize)]
struct ResolvedConfig {
    threads: Option<usize>,
    thetas: usize,
    dense_threshold: usize,
    basis_limit: usize,
    entry_limit: usize,
    t_max: f64,
    samples: usize,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError { code: 1, message: format!("{e:#}") }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        let code = match &e {
            ExperimentError::FlattenedTooLarge { .. }
            | ExperimentError::LocalizedBeyondThreshold { .. }
            | ExperimentError::Occupation(OccupationError::BasisTooLarge { .. })
            | ExperimentError::Evolve(EvolveError::BeyondDenseThreshold { .. }) => 2,
            ExperimentError::Evolve(EvolveError::KrylovNoConvergence { .. }) => 3,
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<OccupationError> for CliError {
    fn from(e: OccupationError) -> Self {
        let code = if matches!(e, OccupationError::BasisTooLarge { .. }) { 2 } else { 1 };
        CliError { code, message: e.to_string() }
    }
}

impl From<WlError> for CliError {
    fn from(e: WlError) -> Self {
        let code = if matches!(e, WlError::GuardExceeded { .. }) { 2 } else { 1 };
        CliError { code, message: e.to_string() }
    }
}

impl From<IsoError> for CliError {
    fn from(e: IsoError) -> Self {
        CliError { code: 2, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, everything else is
            // a usage error
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| CliError::usage(format!("config parse error: {e}")))?
        }
        None => FileConfig::default(),
    };
    let threads = cli
        .threads
        .or_else(|| std::env::var("MPQW_THREADS").ok().and_then(|v| v.parse().ok()))
        .or(file_config.threads);
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    }

    let (document, csv): (serde_json::Value, Option<String>) = match &cli.command {
        Command::Gen { what } => (run_gen(what)?, None),
        Command::Occ { what } => (run_occ(what)?, None),
        Command::Wl { pair, arity, tuple_guard } => (run_wl(pair, *arity, *tuple_guard)?, None),
        Command::Delta(args) => (run_delta(args, &file_config, threads)?, None),
        Command::Mhop { pair, walk_k, m_max } => (run_mhop(pair, *walk_k, *m_max)?, None),
        Command::Srg { what } => (run_srg(what)?, None),
        Command::ReproduceTable { table, full, csv, thetas } => {
            let (doc, csv_text) =
                run_table(*table, *full, thetas.or(file_config.thetas), &file_config, threads)?;
            (doc, if *csv { Some(csv_text) } else { None })
        }
    };

    let text = match csv {
        Some(csv) => csv,
        None => {
            let mut s = serde_json::to_string_pretty(&document).expect("serializable");
            s.push('\n');
            s
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn envelope(command: &str, config: serde_json::Value, result: serde_json::Value) -> serde_json::Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
    })
}

// ---- graph loading -------------------------------------------------

fn read_graph_file(path: &Path) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let g = if path.extension().is_some_and(|e| e == "g6") {
        parse_graph6(text.trim()).map_err(|e| CliError::usage(e.to_string()))?
    } else {
        parse_edge_list(&text).map_err(|e| CliError::usage(e.to_string()))?
    };
    Ok(g)
}

fn write_graph_file(g: &Graph, path: &Path) -> Result<(), CliError> {
    let text = if path.extension().is_some_and(|e| e == "g6") {
        let mut s = write_graph6(g).map_err(|e| CliError::usage(e.to_string()))?;
        s.push('\n');
        s
    } else {
        write_edge_list(g)
    };
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn load_graph(src: &str) -> Result<Graph, CliError> {
    match src {
        "rooks4x4" => Ok(rooks_4x4()),
        "shrikhande" => Ok(shrikhande()),
        "petersen" => Ok(petersen()),
        _ => read_graph_file(Path::new(src.strip_prefix("file:").unwrap_or(src))),
    }
}

fn load_pair(spec: &str) -> Result<(Graph, Graph, String), CliError> {
    if let Some(k) = spec.strip_prefix("morris:") {
        let k: usize = k.parse().map_err(|_| CliError::usage("bad k in pair spec"))?;
        let pair = build_morris_pair(k).map_err(|e| CliError::usage(e.to_string()))?;
        return Ok((pair.p, pair.q, format!("morris:{k}")));
    }
    if let Some(k) = spec.strip_prefix("cai:") {
        let k: usize = k.parse().map_err(|_| CliError::usage("bad k in pair spec"))?;
        let pair = build_cai_pair(k).map_err(|e| CliError::usage(e.to_string()))?;
        return Ok((pair.p, pair.q, format!("cai:{k}")));
    }
    if spec == "srg16" {
        return Ok((rooks_4x4(), shrikhande(), "srg16".into()));
    }
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::usage(
            "pair spec must be morris:K, cai:K, srg16, or two comma-separated graph sources",
        ));
    }
    Ok((load_graph(parts[0])?, load_graph(parts[1])?, spec.to_string()))
}

// ---- subcommands ---------------------------------------------------

fn build_pair(construction: Construction, k: usize) -> Result<CfiPair, CliError> {
    let r = match construction {
        Construction::Morris => build_morris_pair(k),
        Construction::Cai => build_cai_pair(k),
    };
    r.map_err(|e| CliError::usage(e.to_string()))
}

fn run_gen(cmd: &GenCommand) -> Result<serde_json::Value, CliError> {
    match cmd {
        GenCommand::Cfi { construction, k, out } => {
            let pair = build_pair(*construction, *k)?;
            for (g, path) in [(&pair.p, &out[0]), (&pair.q, &out[1])] {
                write_graph_file(g, path)?;
                let labels: Vec<String> =
                    (0..g.n()).map(|i| g.label(i).to_string()).collect();
                let sidecar = path.with_extension(format!(
                    "{}labels.json",
                    path.extension().map(|e| format!("{}.", e.to_string_lossy())).unwrap_or_default()
                ));
                let doc = json!({ "schema_version": SCHEMA_VERSION, "labels": labels });
                std::fs::write(&sidecar, serde_json::to_string_pretty(&doc).unwrap())
                    .with_context(|| format!("writing {}", sidecar.display()))?;
            }
            Ok(envelope(
                "gen cfi",
                json!({ "construction": construction, "k": k }),
                json!({
                    "nodes": pair.p.n(),
                    "edges": pair.p.num_edges(),
                    "files": [out[0], out[1]],
                }),
            ))
        }
        GenCommand::Srg { which, out } => {
            let g = match which {
                NamedSrg::Rooks4x4 => rooks_4x4(),
                NamedSrg::Shrikhande => shrikhande(),
                NamedSrg::Petersen => petersen(),
            };
            write_graph_file(&g, out)?;
            Ok(envelope(
                "gen srg",
                json!({ "which": which }),
                json!({ "nodes": g.n(), "edges": g.num_edges(), "file": out }),
            ))
        }
        GenCommand::Convert { input, out } => {
            let g = read_graph_file(input)?;
            write_graph_file(&g, out)?;
            Ok(envelope(
                "gen convert",
                json!({ "input": input, "out": out }),
                json!({ "nodes": g.n(), "edges": g.num_edges() }),
            ))
        }
    }
}

fn run_occ(cmd: &OccCommand) -> Result<serde_json::Value, CliError> {
    let OccCommand::Dump { graph, k, basis_limit, edges } = cmd;
    let g = load_graph(graph)?;
    let og = build_occupation_graph_with_limit(&g, *k, *basis_limit)?;
    let degrees: Vec<usize> = (0..og.dim()).map(|i| og.degree(i)).collect();
    let mut result = json!({
        "base_nodes": g.n(),
        "k": k,
        "dim": og.dim(),
        "num_edges": og.num_edges(),
        "min_degree": degrees.iter().min(),
        "max_degree": degrees.iter().max(),
    });
    if *edges {
        result["edges"] = json!(og.edges_iter().collect::<Vec<_>>());
    }
    Ok(envelope(
        "occ dump",
        json!({ "graph": graph, "k": k, "basis_limit": basis_limit }),
        result,
    ))
}

fn run_wl(pair: &str, arity: usize, tuple_guard: usize) -> Result<serde_json::Value, CliError> {
    let (g1, g2, label) = load_pair(pair)?;
    let cmp = if arity == 1 {
        wl_compare(&g1, &g2, 1)?
    } else {
        // joint run with an explicit guard
        let mut colorings = mpqw_core::wl::k_wl_joint_with_guard(&[&g1, &g2], arity, tuple_guard)?;
        let b = colorings.pop().unwrap();
        let a = colorings.pop().unwrap();
        let equal = mpqw_core::wl::histograms_equal(&a, &b)?;
        mpqw_core::wl::WlComparison {
            arity,
            rounds_a: a.rounds,
            rounds_b: b.rounds,
            classes_a: a.num_classes(),
            classes_b: b.num_classes(),
            histograms_equal: equal,
        }
    };
    Ok(envelope(
        "wl",
        json!({ "pair": label, "arity": arity, "tuple_guard": tuple_guard }),
        serde_json::to_value(&cmp).unwrap(),
    ))
}

fn resolve_spec(
    walk_k: usize,
    input: InputArg,
    stats: StatsArg,
    thetas: Option<usize>,
    file: &FileConfig,
) -> (ExperimentSpec, ResolvedConfig) {
    let input_mode = match input {
        InputArg::Superposition => InputMode::Superposition,
        InputArg::Localized => InputMode::Localized,
    };
    let statistics = match stats {
        StatsArg::Hardcore => ParticleStatistics::Hardcore,
        StatsArg::Boson => ParticleStatistics::Boson,
        StatsArg::Fermion => ParticleStatistics::Fermion,
    };
    let mut spec = ExperimentSpec::new(walk_k, input_mode, statistics);
    let n_thetas = thetas.or(file.thetas).unwrap_or(32);
    spec.theta_grid = default_theta_grid(n_thetas);
    if let Some(d) = file.dense_threshold {
        spec.dense_threshold = d;
    }
    if let Some(b) = file.basis_limit {
        spec.basis_limit = b;
    }
    if let Some(e) = file.entry_limit {
        spec.flattened_entry_limit = e;
    }
    let resolved = ResolvedConfig {
        threads: None,
        thetas: n_thetas,
        dense_threshold: spec.dense_threshold,
        basis_limit: spec.basis_limit,
        entry_limit: spec.flattened_entry_limit,
        t_max: file.t_max.unwrap_or(2000.0),
        samples: file.samples.unwrap_or(10_000),
    };
    (spec, resolved)
}

fn run_delta(
    args: &DeltaArgs,
    file: &FileConfig,
    threads: Option<usize>,
) -> Result<serde_json::Value, CliError> {
    let (g1, g2, label) = load_pair(&args.pair)?;
    let (mut spec, mut resolved) =
        resolve_spec(args.walk_k, args.input, args.stats, args.thetas, file);
    resolved.threads = threads;
    if let Some(d) = args.dense_threshold {
        spec.dense_threshold = d;
        resolved.dense_threshold = d;
    }
    if let Some(b) = args.basis_limit {
        spec.basis_limit = b;
        resolved.basis_limit = b;
    }
    if let Some(e) = args.entry_limit {
        spec.flattened_entry_limit = e;
        resolved.entry_limit = e;
    }
    if let Some(t) = args.t_max {
        resolved.t_max = t;
    }
    if let Some(s) = args.samples {
        resolved.samples = s;
    }
    spec.boson_multiset_basis = args.boson_multiset_basis;
    spec.pinf = args.pinf.map(|p| match p {
        PinfArg::Projector => PinfMode::Projector,
        PinfArg::TimeAverage => {
            PinfMode::TimeAverage { t_max: resolved.t_max, samples: resolved.samples }
        }
    });
    let result = match spec.input {
        InputMode::Superposition => run_superposition(&g1, &g2, &spec)?,
        InputMode::Localized => run_localized(&g1, &g2, &spec)?,
    };
    Ok(envelope(
        "delta",
        json!({
            "pair": label,
            "walk_k": args.walk_k,
            "input": args.input,
            "stats": args.stats,
            "pinf": args.pinf,
            "boson_multiset_basis": args.boson_multiset_basis,
            "resolved": resolved,
        }),
        json!({
            "max_delta": result.max_theta_delta(),
            "detail": result,
        }),
    ))
}

fn run_mhop(pair: &str, walk_k: usize, m_max: usize) -> Result<serde_json::Value, CliError> {
    let (g1, g2, label) = load_pair(pair)?;
    let cmp = run_mhop_comparison(&g1, &g2, walk_k, m_max)?;
    Ok(envelope(
        "mhop",
        json!({ "pair": label, "walk_k": walk_k, "m_max": m_max }),
        serde_json::to_value(cmp).unwrap(),
    ))
}

fn run_srg(cmd: &SrgCommand) -> Result<serde_json::Value, CliError> {
    let SrgCommand::Verify { graph } = cmd;
    let g = load_graph(graph)?;
    let params = srg_params(&g).map_err(|e| CliError::usage(e.to_string()))?;
    let residual = verify_closed_algebra(&g, &params);
    let edge_profile =
        occupation_degree_profile(&g, PairType::Edge).map_err(|e| CliError::usage(e.to_string()))?;
    let non_edge_profile = occupation_degree_profile(&g, PairType::NonEdge)
        .map_err(|e| CliError::usage(e.to_string()))?;
    Ok(envelope(
        "srg verify",
        json!({ "graph": graph }),
        json!({
            "params": params,
            "closed_algebra_residual": residual,
            "edge_profile": edge_profile,
            "non_edge_profile": non_edge_profile,
        }),
    ))
}

// ---- reproduce-table -----------------------------------------------

#[derive(Serialize)]
struct TableRow {
    k: usize,
    base_nodes: usize,
    occupation_dim: usize,
    delta: f64,
    delta_pinf: Option<f64>,
    delta_boson: Option<f64>,
    delta_fermion: Option<f64>,
    method: String,
}

fn pair_for(table: u8, k: usize) -> Result<CfiPair, CliError> {
    match table {
        1 | 3 => build_pair(Construction::Morris, k),
        2 | 4 => build_pair(Construction::Cai, k),
        _ => Err(CliError::usage("table must be 1-4")),
    }
}

fn superposition_row(
    pair: &CfiPair,
    walk_k: usize,
    thetas: usize,
    full: bool,
    file: &FileConfig,
) -> Result<TableRow, CliError> {
    let n = pair.p.n();
    let dim = mpqw_core::occupation::binomial(n, walk_k) as usize;
    let heavy = dim > 500;
    let mut spec = ExperimentSpec::new(
        walk_k,
        InputMode::Superposition,
        ParticleStatistics::Hardcore,
    );
    spec.theta_grid = default_theta_grid(thetas);
    if let Some(b) = file.basis_limit {
        spec.basis_limit = b;
    }
    if heavy && !full {
        // cheap path: Krylov per θ, no dense eigensolve, no p_inf
        spec.dense_threshold = 0;
    } else if full {
        spec.dense_threshold = spec.dense_threshold.max(dim);
        spec.pinf = Some(PinfMode::Projector);
    } else {
        spec.pinf = Some(PinfMode::Projector);
    }
    let hardcore = run_superposition(&pair.p, &pair.q, &spec)?;
    let (boson, fermion) = if heavy && !full {
        (None, None)
    } else {
        let mut free = spec.clone();
        free.pinf = None;
        free.theta_grid = default_theta_grid(thetas.min(4));
        free.stats = ParticleStatistics::Boson;
        let b = run_superposition(&pair.p, &pair.q, &free)?.max_theta_delta();
        free.stats = ParticleStatistics::Fermion;
        let f = run_superposition(&pair.p, &pair.q, &free)?.max_theta_delta();
        (Some(b), Some(f))
    };
    Ok(TableRow {
        k: pair.k,
        base_nodes: n,
        occupation_dim: dim,
        delta: hardcore.max_theta_delta(),
        delta_pinf: hardcore.pinf.map(|p| p.delta),
        delta_boson: boson,
        delta_fermion: fermion,
        method: hardcore.method,
    })
}

fn localized_row(pair: &CfiPair, thetas: usize, file: &FileConfig) -> Result<TableRow, CliError> {
    let walk_k = pair.k - 1;
    let n = pair.p.n();
    let dim = mpqw_core::occupation::binomial(n, walk_k) as usize;
    let mut spec = ExperimentSpec::new(walk_k, InputMode::Localized, ParticleStatistics::Hardcore);
    spec.theta_grid = default_theta_grid(thetas);
    spec.pinf = Some(PinfMode::Projector);
    if let Some(e) = file.entry_limit {
        spec.flattened_entry_limit = e;
    }
    let hardcore = run_localized(&pair.p, &pair.q, &spec)?;
    let mut free = spec.clone();
    free.pinf = None;
    free.stats = ParticleStatistics::Boson;
    let boson = run_localized(&pair.p, &pair.q, &free)?.max_theta_delta();
    free.stats = ParticleStatistics::Fermion;
    let fermion = run_localized(&pair.p, &pair.q, &free)?.max_theta_delta();
    Ok(TableRow {
        k: pair.k,
        base_nodes: n,
        occupation_dim: dim,
        delta: hardcore.max_theta_delta(),
        delta_pinf: hardcore.pinf.map(|p| p.delta),
        delta_boson: Some(boson),
        delta_fermion: Some(fermion),
        method: hardcore.method,
    })
}

fn run_table(
    table: u8,
    full: bool,
    thetas: Option<usize>,
    file: &FileConfig,
    threads: Option<usize>,
) -> Result<(serde_json::Value, String), CliError> {
    let thetas = thetas.unwrap_or(32);
    let rows: Vec<TableRow> = match table {
        1 | 2 => {
            let ks: &[usize] = &[1, 2, 3];
            ks.iter()
                .map(|&k| superposition_row(&pair_for(table, k)?, k, thetas, full, file))
                .collect::<Result<_, _>>()?
        }
        3 | 4 => [2usize, 3]
            .iter()
            .map(|&k| localized_row(&pair_for(table, k)?, thetas, file))
            .collect::<Result<_, _>>()?,
        _ => return Err(CliError::usage("table must be 1-4")),
    };
    let mut csv = String::from("k,base_nodes,occupation_dim,delta,delta_pinf,delta_boson,delta_fermion\n");
    for r in &rows {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{:.6e},{},{},{}\n",
            r.k,
            r.base_nodes,
            r.occupation_dim,
            r.delta,
            opt(r.delta_pinf),
            opt(r.delta_boson),
            opt(r.delta_fermion),
        ));
    }
    let doc = envelope(
        &format!("reproduce-table {table}"),
        json!({
            "table": table,
            "full": full,
            "thetas": thetas,
            "threads": threads,
            "theta_grid": default_theta_grid(thetas),
        }),
        serde_json::to_value(&rows).unwrap(),
    );
    Ok((doc, csv))
}
