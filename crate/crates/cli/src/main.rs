//! `bva` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 too many boundary
//! nodes whose walks did not converge.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use bva_core::community::{
    detect_communities_traced, DEFAULT_MIN_MODULARITY_GAIN, DEFAULT_Q_THRESHOLD,
};
use bva_core::generators::{self, PlantedNetwork};
use bva_core::graph::{load_edge_list, LoadedGraph};
use bva_core::output;
use bva_core::pipeline::{self, PipelineConfig};
use bva_core::temporal::{self, bin_events, control_series, detect_spikes};
use bva_core::walker::{ScoreStatus, WalkConfig};
use bva_core::{
    betweenness_brandes, betweenness_bruteforce, boundary_edges, connected_components,
    rank_overlap, CommunityLabeling,
};

#[derive(Parser, Debug)]
#[command(
    name = "bva",
    version,
    about = "Rank nodes by their vicinity to community boundaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Components, communities, boundary extraction and vicinity scores.
    Pipeline(PipelineArgs),
    /// Connected components as `node_id,component_id`.
    Components(InputArgs),
    /// Louvain communities as `node_id,community_id` plus a JSON summary.
    Communities(CommunityArgs),
    /// Boundary edges and boundary nodes of a labeled graph.
    Boundary(BoundaryArgs),
    /// Shortest-path betweenness as `node_id,betweenness`.
    Betweenness(BetweennessArgs),
    /// Top-k overlap curve between two score tables.
    Overlap(OverlapArgs),
    /// Synthetic networks.
    Generate(GenerateArgs),
    /// Windowed boundary activity against a random control set.
    Temporal(TemporalArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Edge-list file (two ids per line, whitespace or comma separated).
    #[arg(long)]
    input: PathBuf,
    /// Output directory; tables go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CommunityArgs {
    #[command(flatten)]
    io: InputArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MIN_MODULARITY_GAIN)]
    min_gain: f64,
}

#[derive(Args, Debug)]
struct BoundaryArgs {
    #[command(flatten)]
    io: InputArgs,
    /// `node_id,community_id` table; Louvain runs when omitted.
    #[arg(long)]
    communities: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BetweennessArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Use the brute-force reference implementation (at most 200 nodes).
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
struct WalkArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_Q_THRESHOLD)]
    q_threshold: f64,
    #[arg(long, default_value_t = WalkConfig::DEFAULT_WALKNUM)]
    walknum: usize,
    /// Steps per walk; defaults to the typical path length of each component.
    #[arg(long)]
    stepnum: Option<usize>,
    /// Multiplier on the default step count.
    #[arg(long, default_value_t = 1.0)]
    step_fraction: f64,
    #[arg(long, default_value_t = WalkConfig::DEFAULT_PSRF_LOW)]
    psrf_low: f64,
    #[arg(long, default_value_t = WalkConfig::DEFAULT_PSRF_HIGH)]
    psrf_high: f64,
    #[arg(long, default_value_t = WalkConfig::DEFAULT_MAX_BATCHES)]
    max_batches: usize,
    #[arg(long)]
    threads: Option<usize>,
}

impl WalkArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            seed: self.seed,
            q_threshold: self.q_threshold,
            min_modularity_gain: DEFAULT_MIN_MODULARITY_GAIN,
            walknum: self.walknum,
            stepnum: self.stepnum,
            step_fraction: self.step_fraction,
            psrf_low: self.psrf_low,
            psrf_high: self.psrf_high,
            max_batches: self.max_batches,
            threads: self.threads,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    Dot,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[command(flatten)]
    walk: WalkArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Exit with status 3 when more than this fraction of boundary nodes
    /// end unconverged.
    #[arg(long, default_value_t = 0.1)]
    max_unconverged: f64,
}

#[derive(Args, Debug)]
struct OverlapArgs {
    /// Score table whose last column is the score, keyed by `node_id`.
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Comma-separated k values; defaults to 1..=N.
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GenKind,
    /// Nodes (per community for `planted`).
    #[arg(long, default_value_t = generators::DEFAULT_COMMUNITY_SIZE)]
    n: usize,
    #[arg(long, default_value_t = generators::DEFAULT_ER_P)]
    p: f64,
    #[arg(long, default_value_t = generators::DEFAULT_PA_M)]
    m: usize,
    /// Number of communities for `planted`.
    #[arg(long, default_value_t = 3)]
    parts: usize,
    /// Cross-linking nodes for `planted`.
    #[arg(long, default_value_t = generators::DEFAULT_CROSS_LINKS)]
    k: usize,
    /// Community model for `planted`.
    #[arg(long, value_enum, default_value_t = PartModel::Er)]
    model: PartModel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GenKind {
    Er,
    Pa,
    Planted,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PartModel {
    Er,
    Pa,
}

#[derive(Args, Debug)]
struct TemporalArgs {
    /// Edge list of the replayed network.
    #[arg(long)]
    input: PathBuf,
    /// `epoch_seconds,node_id` event table.
    #[arg(long)]
    events: PathBuf,
    #[arg(long, default_value_t = 60)]
    window: u64,
    #[arg(long, default_value_t = temporal::DEFAULT_Z_THRESHOLD)]
    z: f64,
    /// Seed for Louvain and for the control sample.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_Q_THRESHOLD)]
    q_threshold: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// An error paired with the process exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn input_error(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn usage_error(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Components(a) => cmd_components(a),
        Command::Communities(a) => cmd_communities(a),
        Command::Boundary(a) => cmd_boundary(a),
        Command::Betweenness(a) => cmd_betweenness(a),
        Command::Overlap(a) => cmd_overlap(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Temporal(a) => cmd_temporal(a),
    }
}

fn load_graph(path: &Path) -> Result<LoadedGraph, Failure> {
    let file = File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))
        .map_err(input_error)?;
    load_edge_list(BufReader::new(file))
        .with_context(|| format!("cannot parse {}", path.display()))
        .map_err(input_error)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .and_then(|_| fs::write(dir.join(name), contents))
        .with_context(|| format!("cannot write {}", dir.join(name).display()))
        .map_err(input_error)
}

/// Writes named tables into `out`, or prints the first one when `out` is
/// unset.
fn emit(out: Option<&Path>, tables: &[(&str, String)]) -> Result<(), Failure> {
    match out {
        Some(dir) => tables
            .iter()
            .try_for_each(|(name, body)| write_file(dir, name, body)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(tables[0].1.as_bytes())
                .context("cannot write to stdout")
                .map_err(input_error)
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn manifest(command: &str, parameters: serde_json::Value, extra: serde_json::Value) -> String {
    let mut m = json!({
        "tool": "bva",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "parameters": parameters,
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (m.as_object_mut(), extra) {
        obj.extend(more);
    }
    to_json(&m)
}

fn cmd_pipeline(a: PipelineArgs) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&a.max_unconverged) {
        return Err(usage_error(anyhow!("--max-unconverged must lie in [0, 1]")));
    }
    let cfg = a.walk.config();
    cfg.validate().map_err(|e| usage_error(e.into()))?;

    let t = Instant::now();
    let lg = load_graph(&a.input)?;
    let load_ms = t.elapsed().as_secs_f64() * 1e3;
    let t = Instant::now();
    let result = pipeline::run(&lg.graph, &cfg).map_err(|e| input_error(e.into()))?;
    let run_ms = t.elapsed().as_secs_f64() * 1e3;

    let scores = &result.scores;
    let mut files: Vec<(&str, String)> = Vec::new();
    match a.format {
        Format::Csv => files.push(("scores.csv", output::scores_csv(&lg.labels, scores))),
        Format::Json => {
            let rows: Vec<_> = (0..lg.graph.num_nodes())
                .map(|v| {
                    json!({
                        "node_id": lg.labels[v],
                        "raw_score": scores.raw[v],
                        "normalized_score": scores.normalized[v],
                    })
                })
                .collect();
            files.push((
                "scores.json",
                to_json(&json!({ "seed": cfg.seed, "scores": rows })),
            ));
        }
        Format::Dot => files.push((
            "scores.dot",
            output::dot(
                &lg.graph,
                &lg.labels,
                &scores.normalized,
                Some(&result.boundary),
            ),
        )),
    }
    files.push((
        "communities.csv",
        output::communities_csv(&lg.labels, &result.labeling),
    ));
    files.push((
        "boundary_edges.csv",
        output::boundary_edges_csv(&lg.labels, &result.boundary, &result.labeling),
    ));
    files.push((
        "boundary_nodes.csv",
        output::boundary_nodes_csv(&lg.labels, &result.boundary),
    ));

    let walks: BTreeMap<&str, _> = scores
        .origins
        .iter()
        .map(|(&b, r)| (lg.labels[b].as_str(), r))
        .collect();
    let unconverged = scores.unconverged();
    let unconverged_fraction = if scores.origins.is_empty() {
        0.0
    } else {
        unconverged as f64 / scores.origins.len() as f64
    };
    let mut warnings = Vec::new();
    if scores.status == ScoreStatus::NoBoundary {
        warnings
            .push("no component passed the modularity threshold; all scores are zero".to_string());
    }
    if lg.dropped.self_loops + lg.dropped.duplicates > 0 {
        warnings.push(format!(
            "dropped {} self-loops and {} duplicate edges",
            lg.dropped.self_loops, lg.dropped.duplicates
        ));
    }
    if unconverged > 0 {
        warnings.push(format!("{unconverged} boundary nodes did not converge"));
    }
    let outputs: Vec<&str> = files
        .iter()
        .map(|(n, _)| *n)
        .chain(["manifest.json"])
        .collect();
    let m = manifest(
        "pipeline",
        json!({
            "input": a.input,
            "seed": cfg.seed,
            "format": a.format,
            "max_unconverged": a.max_unconverged,
            "pipeline": cfg,
        }),
        json!({
            "status": scores.status,
            "warnings": warnings,
            "num_nodes": lg.graph.num_nodes(),
            "num_edges": lg.graph.num_edges(),
            "modularity": result.labeling.modularity,
            "num_communities": result.labeling.num_communities,
            "components": result.components,
            "boundary_nodes": result.boundary.num_nodes(),
            "boundary_edges": result.boundary.boundary_edges.len(),
            "walks": walks,
            "unconverged": unconverged,
            "timings_ms": { "load": load_ms, "pipeline": run_ms },
            "outputs": outputs,
        }),
    );
    files.push(("manifest.json", m));
    for (name, body) in &files {
        write_file(&a.out, name, body)?;
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if unconverged_fraction > a.max_unconverged {
        return Err(Failure {
            code: 3,
            error: anyhow!(
                "{unconverged} of {} boundary nodes unconverged (limit {:.0}%)",
                scores.origins.len(),
                a.max_unconverged * 100.0
            ),
        });
    }
    Ok(())
}

fn cmd_components(a: InputArgs) -> Result<(), Failure> {
    let lg = load_graph(&a.input)?;
    let partition = connected_components(&lg.graph);
    let csv = output::components_csv(&lg.labels, &partition);
    let m = manifest(
        "components",
        json!({ "input": a.input }),
        json!({ "num_components": partition.components.len() }),
    );
    emit(
        a.out.as_deref(),
        &[("components.csv", csv), ("manifest.json", m)],
    )
}

fn cmd_communities(a: CommunityArgs) -> Result<(), Failure> {
    let lg = load_graph(&a.io.input)?;
    let (labeling, trace) = detect_communities_traced(&lg.graph, a.seed, a.min_gain);
    let csv = output::communities_csv(&lg.labels, &labeling);
    let summary = to_json(&json!({
        "num_communities": labeling.num_communities,
        "modularity": labeling.modularity,
        "passes": trace.passes(),
        "modularity_per_pass": trace.modularity_per_pass,
        "seed": a.seed,
    }));
    let m = manifest(
        "communities",
        json!({ "input": a.io.input, "seed": a.seed, "min_gain": a.min_gain }),
        json!({}),
    );
    emit(
        a.io.out.as_deref(),
        &[
            ("communities.csv", csv),
            ("communities.json", summary),
            ("manifest.json", m),
        ],
    )
}

/// Reads a `node_id,<...>,value` table into per-node values, resolving ids
/// through `index`. The first line is a header.
fn read_node_table(
    path: &Path,
    index: &HashMap<&str, usize>,
    n: usize,
) -> anyhow::Result<Vec<String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut values = vec![String::new(); n];
    let mut seen = vec![false; n];
    for (i, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            bail!("{}:{}: expected at least 2 columns", path.display(), i + 1);
        }
        let v = *index
            .get(fields[0])
            .ok_or_else(|| anyhow!("{}:{}: unknown node {:?}", path.display(), i + 1, fields[0]))?;
        values[v] = fields[fields.len() - 1].to_string();
        seen[v] = true;
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        bail!("{}: no row for node index {v}", path.display());
    }
    Ok(values)
}

fn cmd_boundary(a: BoundaryArgs) -> Result<(), Failure> {
    let lg = load_graph(&a.io.input)?;
    let labeling = match &a.communities {
        Some(path) => {
            let index = lg.label_index();
            let raw = read_node_table(path, &index, lg.graph.num_nodes()).map_err(input_error)?;
            let labels: Vec<usize> = raw
                .iter()
                .map(|s| s.parse::<usize>())
                .collect::<Result<_, _>>()
                .context("community ids must be nonnegative integers")
                .map_err(input_error)?;
            CommunityLabeling::from_labels(&lg.graph, &labels).map_err(|e| input_error(e.into()))?
        }
        None => detect_communities_traced(&lg.graph, a.seed, DEFAULT_MIN_MODULARITY_GAIN).0,
    };
    let bset = boundary_edges(&lg.graph, &labeling);
    let m = manifest(
        "boundary",
        json!({ "input": a.io.input, "communities": a.communities, "seed": a.seed }),
        json!({
            "boundary_edges": bset.boundary_edges.len(),
            "boundary_nodes": bset.num_nodes(),
            "modularity": labeling.modularity,
        }),
    );
    emit(
        a.io.out.as_deref(),
        &[
            (
                "boundary_edges.csv",
                output::boundary_edges_csv(&lg.labels, &bset, &labeling),
            ),
            (
                "boundary_nodes.csv",
                output::boundary_nodes_csv(&lg.labels, &bset),
            ),
            ("manifest.json", m),
        ],
    )
}

fn cmd_betweenness(a: BetweennessArgs) -> Result<(), Failure> {
    let lg = load_graph(&a.io.input)?;
    let scores = if a.oracle {
        betweenness_bruteforce(&lg.graph).map_err(|e| input_error(e.into()))?
    } else {
        betweenness_brandes(&lg.graph)
    };
    let m = manifest(
        "betweenness",
        json!({ "input": a.io.input, "oracle": a.oracle }),
        json!({}),
    );
    emit(
        a.io.out.as_deref(),
        &[
            (
                "betweenness.csv",
                output::betweenness_csv(&lg.labels, &scores),
            ),
            ("manifest.json", m),
        ],
    )
}

fn read_scores(path: &Path) -> anyhow::Result<Vec<(String, f64)>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            bail!("{}:{}: expected at least 2 columns", path.display(), i + 1);
        }
        let score: f64 = fields[fields.len() - 1]
            .parse()
            .with_context(|| format!("{}:{}: bad score", path.display(), i + 1))?;
        rows.push((fields[0].to_string(), score));
    }
    Ok(rows)
}

fn cmd_overlap(a: OverlapArgs) -> Result<(), Failure> {
    let ra = read_scores(&a.a).map_err(input_error)?;
    let rb = read_scores(&a.b).map_err(input_error)?;
    let order: Vec<&str> = ra.iter().map(|(id, _)| id.as_str()).collect();
    let index: HashMap<&str, usize> = order.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    if rb.len() != ra.len() {
        return Err(input_error(anyhow!(
            "score tables cover different node sets"
        )));
    }
    let sa: Vec<f64> = ra.iter().map(|(_, s)| *s).collect();
    let mut sb = vec![f64::NAN; sa.len()];
    for (id, s) in &rb {
        let i = *index
            .get(id.as_str())
            .ok_or_else(|| input_error(anyhow!("node {id:?} missing from {}", a.a.display())))?;
        sb[i] = *s;
    }
    let ks = a.ks.clone().unwrap_or_else(|| (1..=sa.len()).collect());
    let curve = rank_overlap(&sa, &sb, &ks).map_err(|e| usage_error(e.into()))?;
    let m = manifest(
        "overlap",
        json!({ "a": a.a, "b": a.b, "ks": ks }),
        json!({}),
    );
    emit(
        a.out.as_deref(),
        &[
            ("overlap.csv", output::overlap_csv(&curve)),
            ("manifest.json", m),
        ],
    )
}

fn cmd_generate(a: GenerateArgs) -> Result<(), Failure> {
    let core = |e: bva_core::Error| usage_error(e.into());
    let params = json!({
        "kind": a.kind, "n": a.n, "p": a.p, "m": a.m, "parts": a.parts,
        "k": a.k, "model": a.model, "seed": a.seed,
    });
    let mut files: Vec<(&str, String)> = Vec::new();
    match a.kind {
        GenKind::Er => {
            let g = generators::erdos_renyi(a.n, a.p, a.seed).map_err(core)?;
            files.push(("edges.txt", g.to_edge_list()));
        }
        GenKind::Pa => {
            let g = generators::preferential_attachment(a.n, a.m, a.seed).map_err(core)?;
            files.push(("edges.txt", g.to_edge_list()));
        }
        GenKind::Planted => {
            let parts = match a.model {
                PartModel::Er => generators::connected_er_parts(a.parts, a.n, a.p, a.seed),
                PartModel::Pa => generators::pa_parts(a.parts, a.n, a.m, a.seed),
            }
            .map_err(core)?;
            let net: PlantedNetwork =
                generators::connect_communities(&parts, a.k, a.seed).map_err(core)?;
            files.push(("edges.txt", net.graph.to_edge_list()));
            let mut labels = String::from("node_id,community_id\n");
            for (v, c) in net.planted_labels.iter().enumerate() {
                labels.push_str(&format!("{v},{c}\n"));
            }
            files.push(("planted_labels.csv", labels));
            let mut boundary = String::from("node_id\n");
            for v in &net.planted_boundary {
                boundary.push_str(&format!("{v}\n"));
            }
            files.push(("planted_boundary.csv", boundary));
        }
    }
    files.push(("manifest.json", manifest("generate", params, json!({}))));
    for (name, body) in &files {
        write_file(&a.out, name, body)?;
    }
    Ok(())
}

fn cmd_temporal(a: TemporalArgs) -> Result<(), Failure> {
    let lg = load_graph(&a.input)?;
    let mut index: HashMap<String, usize> = lg
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    let n = lg.graph.num_nodes();
    // authors outside the network still count towards the totals
    let mut next = n;
    let file = File::open(&a.events)
        .with_context(|| format!("cannot open {}", a.events.display()))
        .map_err(input_error)?;
    let events = temporal::load_events(BufReader::new(file), |label| {
        *index.entry(label.to_string()).or_insert_with(|| {
            next += 1;
            next - 1
        })
    })
    .map_err(|e| input_error(e.into()))?;

    let cfg = PipelineConfig {
        seed: a.seed,
        q_threshold: a.q_threshold,
        ..Default::default()
    };
    let result = pipeline::run(&lg.graph, &cfg).map_err(|e| input_error(e.into()))?;
    let boundary: BTreeSet<usize> = result.boundary.boundary_nodes().collect();
    let population: BTreeSet<usize> = (0..n).collect();

    let all = bin_events(&events, a.window, None).map_err(|e| usage_error(e.into()))?;
    let bseries =
        bin_events(&events, a.window, Some(&boundary)).map_err(|e| usage_error(e.into()))?;
    let (cseries, control) = control_series(&events, &boundary, &population, a.window, a.seed)
        .map_err(|e| input_error(e.into()))?;

    let as_f = |xs: &[u64]| xs.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let spikes = |xs: &[u64]| detect_spikes(&as_f(xs), a.z).map_err(|e| input_error(e.into()));
    let report = json!({
        "window_seconds": a.window,
        "t0": all.t0,
        "z_threshold": a.z,
        "boundary_nodes": boundary.len(),
        "control_nodes": control.iter().map(|&v| lg.labels[v].as_str()).collect::<Vec<_>>(),
        "total": spikes(&all.totals)?,
        "boundary_active": spikes(&bseries.actives)?,
        "control_active": spikes(&cseries.actives)?,
    });
    let m = manifest(
        "temporal",
        json!({
            "input": a.input, "events": a.events, "window": a.window, "z": a.z,
            "seed": a.seed, "q_threshold": a.q_threshold,
        }),
        json!({ "num_events": events.len(), "num_windows": all.num_windows() }),
    );
    let files = [
        (
            "temporal.csv",
            output::temporal_csv(&all, &bseries, &cseries),
        ),
        ("spikes.json", to_json(&report)),
        ("manifest.json", m),
    ];
    for (name, body) in &files {
        write_file(&a.out, name, body)?;
    }
    Ok(())
}
