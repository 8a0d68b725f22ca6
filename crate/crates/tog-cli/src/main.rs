//! `tog`: command-line front end for the tog-core kernels.
//!
//! Every command reads JSON (a file, or stdin when the path is `-` or
//! missing) and writes one JSON document with sorted keys and a
//! `"schema": "tog/1"` field. Exit status: 0 on success, 1 on invalid or
//! rejected input (the reasons go to stdout as JSON), 2 when the copy cap
//! stops an expansion.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tog_core::graph::{components, is_two_connected, to_dot, EdgeId, Multigraph, PointLocus, VertexId};
use tog_core::jsj::{golden, synthesize, JsjInput};
use tog_core::rcs::{
    analyze_point, ExpandConfig, GraphicalConnectingSystem, PartialUnion, RcsError, RcsJson, VertexKey,
};
use tog_core::twin::{essential_twin, is_twin_graph, verified_decomposition};
use tog_core::vsystem::{VSystemJson, Violation, ViolationCode};
use tog_core::words::{extended_whitehead_graph, whitehead_graph, CyclicWord, Letter, PeripheralSpec, WhiteheadGraph};
use tog_core::{Execution, SCHEMA};

#[derive(Parser)]
#[command(
    name = "tog",
    version,
    about = "Surgery on graphs, twin decompositions, Whitehead graphs and connecting systems"
)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Connectivity and twin report for a graph.
    Graph {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
    },
    /// Split a twin graph into thick θ-graphs.
    TwinDecompose { input: Option<PathBuf> },
    /// Whitehead graph of a list of cyclic words.
    Whitehead {
        #[arg(long)]
        rank: usize,
        /// Comma-separated words; upper case letters are inverses.
        #[arg(long, value_delimiter = ',', required = true)]
        words: Vec<String>,
        /// One label per word (defaults to the words themselves).
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
        /// One multiplicity per word (default 2 for all).
        #[arg(long, value_delimiter = ',')]
        multiplicities: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
    },
    /// Lines of a V-system.
    Vsystem { input: Option<PathBuf> },
    /// Connecting systems and their finite approximations.
    Rcs {
        #[command(subcommand)]
        cmd: RcsCmd,
    },
    /// Connecting systems from reduced JSJ data.
    Jsj {
        #[command(subcommand)]
        cmd: JsjCmd,
    },
}

#[derive(Subcommand)]
enum RcsCmd {
    Validate {
        input: Option<PathBuf>,
    },
    Expand {
        input: Option<PathBuf>,
        #[command(flatten)]
        expand: ExpandArgs,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
    },
    /// Follow a point of the root copy through depths 0..=d.
    Analyze {
        input: Option<PathBuf>,
        #[command(flatten)]
        expand: ExpandArgs,
        /// `v<vertex>` or `e<edge>[@<num>/<den>]`.
        #[arg(long)]
        point: PointLocus,
        /// Second point for complement counts.
        #[arg(long)]
        partner: Option<PointLocus>,
    },
}

#[derive(Subcommand)]
enum JsjCmd {
    Synth {
        input: Option<PathBuf>,
        /// Use a built-in fixture instead of an input file.
        #[arg(long, value_parser = ["g2", "racg1"], conflicts_with = "input")]
        golden: Option<String>,
    },
    /// Print a built-in fixture as input JSON.
    Golden {
        #[arg(value_parser = ["g2", "racg1"])]
        name: String,
    },
}

#[derive(Args, Clone, Copy)]
struct ExpandArgs {
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    resolution: u64,
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[arg(long, default_value_t = 10_000)]
    cap: usize,
    /// Expand each level with rayon. The output is identical.
    #[arg(long)]
    parallel: bool,
}

impl ExpandArgs {
    fn config(self) -> ExpandConfig {
        ExpandConfig {
            resolution: self.resolution as usize,
            cap: self.cap,
            exec: if self.parallel { Execution::Parallel } else { Execution::Sequential },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Dot,
}

enum Failure {
    /// Input rejected; the document explains why.
    Rejected(Value),
    Cap(String),
    Error(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = Result<Output, Failure>;

enum Output {
    Json(Value),
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.cmd);
    let (output, code) = match result {
        Ok(o) => (Some(o), 0),
        Err(Failure::Rejected(doc)) => (Some(Output::Json(doc)), 1),
        Err(Failure::Cap(msg)) => {
            eprintln!("tog: {msg}");
            (Some(Output::Json(json!({ "error": { "kind": "CapExceeded", "message": msg } }))), 2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("tog: {e:#}");
            (None, 1)
        }
    };
    if let Some(o) = output {
        if let Err(e) = write_output(cli.out.as_ref(), o) {
            eprintln!("tog: {e:#}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}

fn write_output(path: Option<&PathBuf>, o: Output) -> anyhow::Result<()> {
    let text = match o {
        Output::Json(mut v) => {
            if let Value::Object(m) = &mut v {
                m.insert("schema".into(), Value::String(SCHEMA.into()));
            }
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Output::Text(s) => s,
    };
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Graph { input, emit } => graph_cmd(input, emit),
        Cmd::TwinDecompose { input } => twin_cmd(input),
        Cmd::Whitehead { rank, words, labels, multiplicities, emit } => {
            whitehead_cmd(rank, &words, &labels, &multiplicities, emit)
        }
        Cmd::Vsystem { input } => vsystem_cmd(input),
        Cmd::Rcs { cmd } => match cmd {
            RcsCmd::Validate { input } => rcs_validate(input),
            RcsCmd::Expand { input, expand, emit } => rcs_expand(input, expand, emit),
            RcsCmd::Analyze { input, expand, point, partner } => rcs_analyze(input, expand, point, partner),
        },
        Cmd::Jsj { cmd } => match cmd {
            JsjCmd::Synth { input, golden: name } => jsj_synth(input, name),
            JsjCmd::Golden { name } => Ok(Output::Json(to_value(&golden(&name).expect("checked by clap"))?)),
        },
    }
}

fn read_input(path: Option<PathBuf>) -> anyhow::Result<String> {
    let mut s = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            s = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
        }
        _ => {
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        }
    }
    Ok(s)
}

fn violations_doc(v: &[Violation]) -> Value {
    json!({ "valid": false, "violations": v })
}

fn malformed(e: impl std::fmt::Display) -> Failure {
    Failure::Rejected(violations_doc(&[Violation::new(ViolationCode::MalformedInput, e.to_string())]))
}

fn rejected(e: &(impl std::fmt::Display + std::fmt::Debug)) -> Failure {
    let debug = format!("{e:?}");
    let kind: String = debug.chars().take_while(|c| c.is_alphanumeric()).collect();
    Failure::Rejected(json!({ "error": { "kind": kind, "message": e.to_string() } }))
}

fn to_value(x: &impl Serialize) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(malformed)
}

fn graph_cmd(input: Option<PathBuf>, emit: Emit) -> Outcome {
    let g: Multigraph = parse(&read_input(input)?)?;
    if emit == Emit::Dot {
        return Ok(Output::Text(to_dot(&g, "graph", |_| vec![], |_| vec![])));
    }
    let two = is_two_connected(&g);
    let twins: Vec<Value> = if two {
        g.vertices()
            .filter(|&v| g.degree(v) >= 3)
            .map(|v| json!({ "vertex": v, "twin": essential_twin(&g, v).ok().flatten() }))
            .collect()
    } else {
        Vec::new()
    };
    Ok(Output::Json(json!({
        "graph": g,
        "vertex_count": g.vertex_count(),
        "edge_count": g.edge_count(),
        "components": components(&g),
        "degrees": g.degrees(),
        "two_connected": two,
        "twin_graph": is_twin_graph(&g),
        "essential_twins": twins,
    })))
}

fn twin_cmd(input: Option<PathBuf>) -> Outcome {
    let g: Multigraph = parse(&read_input(input)?)?;
    let (tree, replay_ok) = verified_decomposition(&g).map_err(|e| rejected(&e))?;
    Ok(Output::Json(json!({
        "summands": tree.sorted_sizes(),
        "tree": tree,
        "replay_homeomorphic": replay_ok,
    })))
}

fn whitehead_cmd(rank: usize, words: &[String], labels: &[String], mults: &[u32], emit: Emit) -> Outcome {
    let arity = |what: &str, n: usize| -> Result<(), Failure> {
        if n != 0 && n != words.len() {
            return Err(Failure::Error(anyhow::anyhow!("{n} {what} given for {} words", words.len())));
        }
        Ok(())
    };
    arity("labels", labels.len())?;
    arity("multiplicities", mults.len())?;
    let mut specs = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let word = CyclicWord::parse(w).map_err(|e| rejected(&e))?;
        let label = labels.get(i).cloned().unwrap_or_else(|| w.clone());
        specs.push(PeripheralSpec::new(word, label, mults.get(i).copied().unwrap_or(2)));
    }
    let plain = specs.iter().all(|s| s.multiplicity == 2);
    let (wg, vsys) = if plain {
        let named: Vec<(CyclicWord, String)> = specs.iter().map(|s| (s.word.clone(), s.label.clone())).collect();
        let wg = whitehead_graph(rank, &named).map_err(|e| rejected(&e))?;
        let vs = extended_whitehead_graph(rank, &specs).map(|x| x.1);
        (wg, vs)
    } else {
        let (wg, vs) = extended_whitehead_graph(rank, &specs).map_err(|e| rejected(&e))?;
        (wg, Ok(vs))
    };
    let dot = whitehead_dot(&wg);
    if emit == Emit::Dot {
        return Ok(Output::Text(dot));
    }
    let (vsystem, vsystem_error) = match vsys {
        Ok(vs) => (Some(VSystemJson::from(&vs)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let names: std::collections::BTreeMap<VertexId, String> =
        wg.graph.vertices().map(|v| (v, WhiteheadGraph::vertex_name(v).to_string())).collect();
    let labels: Vec<Value> = wg
        .labels
        .iter()
        .map(|(e, l)| {
            let occ = wg.occurrences[e];
            json!({ "edge": e, "label": l.label, "word": l.word, "copy": l.copy, "position": occ.position })
        })
        .collect();
    Ok(Output::Json(json!({
        "rank": rank,
        "words": specs.iter().map(|s| s.word.to_string()).collect::<Vec<_>>(),
        "graph": wg.graph,
        "vertex_names": names,
        "edge_labels": labels,
        "rigidity_proxy": tog_core::words::check_rigidity_proxy(&wg),
        "vsystem": vsystem,
        "vsystem_error": vsystem_error,
        "dot": dot,
    })))
}

fn whitehead_dot(wg: &WhiteheadGraph) -> String {
    to_dot(
        &wg.graph,
        "whitehead",
        |v| vec![("label".into(), Letter::from_vertex(v).to_char().to_string())],
        |e: EdgeId| {
            let l = &wg.labels[&e];
            let text = if l.copy > 1 || wg.specs[l.word].multiplicity > 2 {
                format!("{}.{}", l.label, l.copy)
            } else {
                l.label.clone()
            };
            vec![("label".into(), text)]
        },
    )
}

fn vsystem_cmd(input: Option<PathBuf>) -> Outcome {
    let json: VSystemJson = parse(&read_input(input)?)?;
    let vs = json.into_system().map_err(|v| Failure::Rejected(violations_doc(&v)))?;
    let violations = vs.validate();
    if !violations.is_empty() {
        return Err(Failure::Rejected(violations_doc(&violations)));
    }
    let lines = vs.lines_with(Execution::default());
    let groups = vs.lines_sharing_ends(&lines);
    let report: Vec<Value> = lines
        .iter()
        .map(|l| json!({ "orbit": l.orbit, "period": l.period(), "orientable": l.orientable, "edge_class": l.edge_class }))
        .collect();
    Ok(Output::Json(json!({
        "valid": true,
        "line_count": lines.len(),
        "lines": report,
        "end_groups": groups,
        "has_nonorientable_line": vs.has_nonorientable_line(),
    })))
}

/// Accepts a connecting system, or the output of `jsj synth` (which carries
/// one under `system`).
fn read_rcs(input: Option<PathBuf>) -> Result<GraphicalConnectingSystem, Failure> {
    let mut v: Value = parse(&read_input(input)?)?;
    if v.get("vsystem").is_none() {
        if let Some(inner) = v.get_mut("system") {
            v = inner.take();
        }
    }
    let json: RcsJson = serde_json::from_value(v).map_err(malformed)?;
    json.into_system().map_err(|v| Failure::Rejected(violations_doc(&v)))
}

fn rcs_validate(input: Option<PathBuf>) -> Outcome {
    let rcs = read_rcs(input)?;
    let violations = rcs.validate();
    let doc = json!({
        "valid": violations.is_empty(),
        "violations": violations,
        "component_count": rcs.component_count(),
        "components": rcs.components(),
    });
    if violations.is_empty() {
        Ok(Output::Json(doc))
    } else {
        Err(Failure::Rejected(doc))
    }
}

fn expand_err(e: RcsError) -> Failure {
    match e {
        RcsError::CapExceeded { .. } => Failure::Cap(e.to_string()),
        RcsError::Invalid(v) => Failure::Rejected(violations_doc(&v)),
        other => rejected(&other),
    }
}

fn rcs_expand(input: Option<PathBuf>, args: ExpandArgs, emit: Emit) -> Outcome {
    let rcs = read_rcs(input)?;
    let mut pu = PartialUnion::init(rcs, args.root, args.config()).map_err(expand_err)?;
    pu.expand_to_depth(args.depth).map_err(expand_err)?;
    let real = pu.realize();
    if emit == Emit::Dot {
        let dot = to_dot(
            &real.graph,
            "approximation",
            |v| {
                let key = real.vertex_keys[v as usize];
                let label = match key {
                    VertexKey::Original { node, vertex } => format!("{node}:{vertex}"),
                    VertexKey::Junction { link, k } => format!("j{link}.{k}"),
                };
                vec![("label".into(), label), ("copy".into(), key.node().to_string())]
            },
            |e| {
                let k = real.edge_keys[e as usize];
                vec![
                    ("copy".into(), k.node.to_string()),
                    ("source_edge".into(), k.edge.to_string()),
                    ("span".into(), format!("{}..{}", k.lo, k.hi)),
                ]
            },
        );
        return Ok(Output::Text(dot));
    }
    let warnings: Vec<&str> = pu.warnings().collect();
    Ok(Output::Json(json!({
        "config": { "depth": args.depth, "resolution": args.resolution, "root": args.root, "cap": args.cap },
        "copies": pu.copy_count(),
        "nodes": pu.nodes(),
        "frontier_size": pu.frontier().len(),
        "warnings": warnings,
        "graph": real.graph,
        "vertex_keys": real.vertex_keys,
        "edge_keys": real.edge_keys,
        "two_connected": is_two_connected(&real.graph),
    })))
}

fn rcs_analyze(input: Option<PathBuf>, args: ExpandArgs, point: PointLocus, partner: Option<PointLocus>) -> Outcome {
    let rcs = read_rcs(input)?;
    let mut pu = PartialUnion::init(rcs, args.root, args.config()).map_err(expand_err)?;
    let mut stages = vec![pu.clone()];
    for d in 1..=args.depth {
        pu.expand_to_depth(d).map_err(expand_err)?;
        stages.push(pu.clone());
    }
    let a = analyze_point(&stages, point, partner).map_err(expand_err)?;
    Ok(Output::Json(to_value(&a)?))
}

fn jsj_synth(input: Option<PathBuf>, name: Option<String>) -> Outcome {
    let data: JsjInput = match name {
        Some(n) => golden(&n).expect("checked by clap"),
        None => parse(&read_input(input)?)?,
    };
    let s = synthesize(&data).map_err(|e| rejected(&e))?;
    Ok(Output::Json(json!({
        "input": data,
        "system": RcsJson::from(&s.system),
        "ledger": s.ledger,
        "components": s.components,
        "bunches": s.bunches,
        "warnings": s.warnings,
    })))
}
