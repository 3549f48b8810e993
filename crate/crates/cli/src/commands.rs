//! Command-line dispatch. `run` returns the exit code and captured output so it can be tested in-process.

use std::path::{Path, PathBuf};

use atf_core::atbd::{mutate, validate, AlmostToricBase};
use atf_core::diophantine::{brute_force_solutions, is_solution, solution_tree, MarkovConfig, MarkovTriple};
use atf_core::lattice::{rational_to_f64, LatticeVector};
use atf_core::quiver::{markov_interleaving, maslov_sequence, recipe_run, RecipeConfig};
use atf_core::staircase::{staircase_table, symington_sequence, ManifoldPreset, PresetName};
use atf_core::tropical::{build_dimer, build_edge_tripod, tripod_weights, validate_dimer, validate_stc, verify_chain, ChainCase, Relation};
use atf_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::json::{jvec, rat, record_json, stc_report_json, surd_json, triple_json, validation_json, AtbdJson, JInt, StcJson};
use crate::render::{atbd_svg, staircase_svg, stc_svg, RenderOptions};

pub const PORT_ENV: &str = "ATF_PORT";
pub const DEFAULT_PORT: u16 = 8737;

#[derive(Parser, Debug)]
#[command(name = "atf", version, about = "Almost-toric bases, staircases and tropical curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in manifolds.
    Presets {
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Check a base file.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Mutate a base file at one vertex.
    Mutate {
        file: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        order: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Staircase table of a preset.
    Staircase {
        #[arg(long)]
        preset: PresetName,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Solutions of a Markov-type equation.
    Dioph {
        /// `c0,c1,c2,m`
        #[arg(long)]
        config: String,
        #[arg(long, conflicts_with = "brute", required_unless_present = "brute")]
        tree: bool,
        #[arg(long)]
        brute: bool,
        #[arg(long)]
        bound: u64,
        /// Root of the tree, `p,q,r`; defaults to the preset seed of the same equation.
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Tropical curves.
    Stc {
        #[command(subcommand)]
        command: StcCommand,
    },
    /// Quiver mutation runs.
    Quiver {
        #[command(subcommand)]
        command: QuiverCommand,
    },
    /// Draw a base or a graph file as SVG.
    Render {
        file: PathBuf,
        /// `svg` for standard output, otherwise a file path.
        #[arg(long, default_value = "svg")]
        out: String,
        #[arg(long)]
        frozen: Option<usize>,
        #[arg(long)]
        no_cuts: bool,
        #[arg(long)]
        no_nodes: bool,
        #[arg(long)]
        no_labels: bool,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, env = PORT_ENV, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Directory holding one file per session.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum StcCommand {
    /// Check a graph file.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Edge tripod of a staircase solution.
    Tripod {
        #[arg(long)]
        preset: PresetName,
        #[arg(long)]
        triple: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Dimer model of a balanced set of classes.
    Dimer {
        /// `m:x,y;m:x,y;...`
        #[arg(long, allow_hyphen_values = true)]
        classes: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Chain compatibility certificate.
    Chain {
        #[arg(long)]
        case: ChainCase,
        #[arg(long)]
        q: BigInt,
        #[arg(long)]
        r: BigInt,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Sequence,
    Seeds,
    Quotients,
}

#[derive(Args, Debug)]
struct Weights {
    /// Maslov weight at odd positions.
    #[arg(long, default_value_t = 2)]
    odd_weight: u64,
    /// Maslov weight at even positions.
    #[arg(long, default_value_t = 3)]
    even_weight: u64,
}

#[derive(Subcommand, Debug)]
enum QuiverCommand {
    /// Mutation recipe on the quiver of a fan; vertex numbers are 1-based.
    Run {
        /// `dp3` or a JSON file holding a list of rays.
        #[arg(long)]
        fan: String,
        #[arg(long)]
        pre: Option<String>,
        #[arg(long)]
        t1: Option<String>,
        #[arg(long)]
        t2: Option<String>,
        #[arg(long)]
        frozen: Option<String>,
        #[arg(long, default_value_t = 18)]
        rounds: usize,
        #[arg(long, value_enum, default_value = "sequence")]
        emit: Emit,
        #[command(flatten)]
        weights: Weights,
    },
    /// Interleaved `q, r` entries along the Vieta chain of an equation.
    Markov {
        #[arg(long, default_value = "1,2,3,6")]
        config: String,
        #[arg(long, default_value = "1,1,1")]
        seed: String,
        #[arg(long, default_value_t = 19)]
        len: usize,
        #[arg(long, value_enum, default_value = "sequence")]
        emit: Emit,
        #[command(flatten)]
        weights: Weights,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    /// Set by `serve`; the caller starts the service.
    pub serve: Option<ServeRequest>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServeRequest {
    pub bind: String,
    pub port: u16,
    pub data_dir: Option<PathBuf>,
}

enum Fail {
    /// Exit 1 with a report on standard output.
    Invalid(String),
    /// Exit 2.
    Malformed(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Malformed(_) | Error::NotPrimitive(_) | Error::VertexOutOfRange { .. } | Error::InvalidConfig(_) => Fail::Malformed(e.to_string()),
            _ => Fail::Invalid(format!("error: {e}\n")),
        }
    }
}

type Out = Result<String, Fail>;

fn malformed(msg: impl Into<String>) -> Fail {
    Fail::Malformed(msg.into())
}

fn ints(s: &str, what: &str) -> Result<Vec<BigInt>, Fail> {
    s.split(',').map(|t| t.trim().parse::<BigInt>().map_err(|_| malformed(format!("{what}: not an integer list: {s:?}")))).collect()
}

fn u64s(s: &str, what: &str) -> Result<Vec<u64>, Fail> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse::<u64>().map_err(|_| malformed(format!("{what}: not a list of naturals: {s:?}")))).collect()
}

fn triple(s: &str) -> Result<MarkovTriple, Fail> {
    match ints(s, "triple")?.as_slice() {
        [p, q, r] => Ok(MarkovTriple([p.clone(), q.clone(), r.clone()])),
        _ => Err(malformed(format!("triple needs three entries: {s:?}"))),
    }
}

fn config(s: &str) -> Result<MarkovConfig, Fail> {
    match u64s(s, "config")?.as_slice() {
        &[c0, c1, c2, m] => Ok(MarkovConfig::new(c0, c1, c2, m)?),
        _ => Err(malformed(format!("config needs c0,c1,c2,m: {s:?}"))),
    }
}

fn read_json(path: &Path) -> Result<Value, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(v: Value, path: &Path) -> Result<T, Fail> {
    serde_json::from_value(v).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn read_base(path: &Path) -> Result<AlmostToricBase, Fail> {
    let j: AtbdJson = parse(read_json(path)?, path)?;
    Ok(j.to_base()?)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn no_svg(cmd: &str) -> Fail {
    malformed(format!("{cmd} has no svg output"))
}

fn presets(format: Format) -> Out {
    let all = ManifoldPreset::all();
    match format {
        Format::Json => Ok(pretty(&json!(all
            .iter()
            .map(|p| json!({
                "name": p.name.as_str(),
                "config": [p.markov.c[0], p.markov.c[1], p.markov.c[2], p.markov.m],
                "seed": triple_json(&p.seed),
                "frozen_vertex": p.frozen_vertex,
                "base": AtbdJson::from_base(&p.initial_base),
            }))
            .collect::<Vec<_>>()))),
        Format::Table => {
            let mut rows = vec![vec!["name".to_string(), "equation".into(), "seed".into(), "vertices".into()]];
            for p in &all {
                rows.push(vec![p.name.to_string(), p.markov.to_string(), p.seed.to_string(), p.initial_base.len().to_string()]);
            }
            Ok(table(&rows))
        }
        Format::Svg => Err(no_svg("presets")),
    }
}

fn validation_table(r: &atf_core::atbd::ValidationReport) -> String {
    let mut rows = vec![vec!["vertex".to_string(), "consistent".into(), "contained".into(), "disjoint".into(), "notes".into()]];
    for v in &r.vertices {
        rows.push(vec![v.index.to_string(), v.consistent.to_string(), v.contained.to_string(), v.disjoint.to_string(), v.notes.join("; ")]);
    }
    format!("convex: {}\n{}valid: {}\n", r.convex, table(&rows), r.is_valid())
}

fn validate_cmd(file: &Path, format: Format) -> Out {
    let base = read_base(file)?;
    let report = validate(&base)?;
    let text = match format {
        Format::Json => pretty(&validation_json(&report)),
        Format::Table => validation_table(&report),
        Format::Svg => return Err(no_svg("validate")),
    };
    if report.is_valid() {
        Ok(text)
    } else {
        Err(Fail::Invalid(text))
    }
}

fn mutate_cmd(file: &Path, vertex: usize, order: u64, format: Format) -> Out {
    let base = read_base(file)?;
    let report = validate(&base)?;
    if !report.is_valid() {
        return Err(Fail::Invalid(match format {
            Format::Json => pretty(&validation_json(&report)),
            _ => validation_table(&report),
        }));
    }
    let (next, record) = mutate(&base, vertex, order)?;
    match format {
        Format::Json => Ok(pretty(&json!({ "base": AtbdJson::from_base(&next), "record": record_json(&record) }))),
        Format::Table => {
            let mut rows = vec![vec!["vertex".to_string(), "position".into(), "nodes".into()]];
            for (i, v) in next.vertices.iter().enumerate() {
                rows.push(vec![i.to_string(), format!("({}, {})", v.x, v.y), next.cuts[i].nodes.to_string()]);
            }
            Ok(format!("{}new vertex: {}\n", table(&rows), record.new_vertex_index))
        }
        Format::Svg => Ok(atbd_svg(&next, &RenderOptions::default())?),
    }
}

fn staircase_cmd(preset: PresetName, steps: usize, format: Format) -> Out {
    let p = ManifoldPreset::get(preset);
    match format {
        Format::Table => {
            let report = staircase_table(&p, steps)?;
            Ok(format!("{}: {}\n{}accumulation: {} = {:.12}\n", preset, p.markov, report.to_text(), report.accumulation, report.accumulation.to_f64()))
        }
        Format::Json => {
            let report = staircase_table(&p, steps)?;
            Ok(pretty(&json!({
                "preset": preset.as_str(),
                "config": p.markov.to_string(),
                "accumulation": surd_json(&report.accumulation),
                "rows": report.rows.iter().map(|r| json!({
                    "n": r.n,
                    "triple": triple_json(&r.triple),
                    "weights": r.weights.iter().cloned().map(JInt).collect::<Vec<_>>(),
                    "ellipsoid": [rat(&r.ellipsoid.0), rat(&r.ellipsoid.1)],
                    "sharp_point": rat(&r.sharp_point),
                    "value": rational_to_f64(&r.sharp_point),
                    "volume_bound": r.volume_bound,
                    "accumulation_gap": r.accumulation_gap,
                })).collect::<Vec<_>>(),
            })))
        }
        Format::Svg => Ok(staircase_svg(&symington_sequence(&p, steps)?)?),
    }
}

fn dioph_cmd(cfg_s: &str, tree: bool, bound: u64, seed: Option<&str>, format: Format) -> Out {
    let cfg = config(cfg_s)?;
    let set = if tree {
        let root = match seed {
            Some(s) => triple(s)?,
            None => ManifoldPreset::all()
                .into_iter()
                .find(|p| p.markov == cfg)
                .map(|p| p.seed)
                .ok_or_else(|| malformed(format!("no preset seed for {cfg}; pass --seed")))?,
        };
        if !is_solution(&cfg, &root) {
            return Err(Fail::Invalid(format!("error: seed {root} does not solve {cfg}\n")));
        }
        solution_tree(&cfg, &root, bound)?
    } else {
        brute_force_solutions(&cfg, bound)
    };
    match format {
        Format::Json => Ok(pretty(&json!({
            "config": cfg.to_string(),
            "method": if tree { "tree" } else { "brute" },
            "bound": bound,
            "solutions": set.iter().map(triple_json).collect::<Vec<_>>(),
        }))),
        Format::Table => {
            let mut out: String = set.iter().map(|t| format!("{t}\n")).collect();
            out.push_str(&format!("{} solutions of {cfg} with entries <= {bound}\n", set.len()));
            Ok(out)
        }
        Format::Svg => Err(no_svg("dioph")),
    }
}

fn stc_report_table(r: &atf_core::tropical::StcReport) -> String {
    let mut rows = vec![vec!["condition".to_string(), "name".into(), "pass".into(), "notes".into()]];
    for c in &r.conditions {
        rows.push(vec![c.id.to_string(), c.name.to_string(), c.pass.to_string(), c.notes.join("; ")]);
    }
    format!("host valid: {}\n{}valid: {}\n", r.host_valid, table(&rows), r.is_valid())
}

fn stc_validate_cmd(file: &Path, format: Format) -> Out {
    let j: StcJson = parse(read_json(file)?, file)?;
    let g = j.to_graph(None)?;
    let report = validate_stc(&g)?;
    let text = match format {
        Format::Json => pretty(&stc_report_json(&report)),
        Format::Table => stc_report_table(&report),
        Format::Svg => stc_svg(&g, &RenderOptions::default())?,
    };
    if report.is_valid() {
        Ok(text)
    } else {
        Err(Fail::Invalid(text))
    }
}

fn tripod_cmd(preset: PresetName, t: &str, format: Format) -> Out {
    let cfg = ManifoldPreset::get(preset).markov;
    let t = triple(t)?;
    let g = build_edge_tripod(&cfg, &t)?;
    let report = validate_stc(&g)?;
    let weights = tripod_weights(&g);
    let text = match format {
        Format::Json => pretty(&json!({
            "graph": StcJson::from_graph(&g),
            "weights": weights.map(|w| [w.0, w.1, w.2]),
            "report": stc_report_json(&report),
        })),
        Format::Table => {
            let w = weights.map(|w| format!("({},{},{})", w.0, w.1, w.2)).unwrap_or_else(|| "-".into());
            format!("tripod {t} in {preset}\nweights: {w}\n{}", stc_report_table(&report))
        }
        Format::Svg => stc_svg(&g, &RenderOptions::default())?,
    };
    if report.is_valid() {
        Ok(text)
    } else {
        Err(Fail::Invalid(text))
    }
}

/// `m:x,y;m:x,y;...` into weighted classes.
pub fn parse_classes(s: &str) -> Result<Vec<(u64, LatticeVector)>, String> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (m, v) = t.split_once(':').ok_or_else(|| format!("expected m:x,y, got {t:?}"))?;
            let m: u64 = m.trim().parse().map_err(|_| format!("bad multiplicity in {t:?}"))?;
            let (x, y) = v.split_once(',').ok_or_else(|| format!("expected x,y in {t:?}"))?;
            let x: i64 = x.trim().parse().map_err(|_| format!("bad x in {t:?}"))?;
            let y: i64 = y.trim().parse().map_err(|_| format!("bad y in {t:?}"))?;
            Ok((m, LatticeVector::new(x, y)))
        })
        .collect()
}

fn dimer_cmd(classes: &str, format: Format) -> Out {
    let inputs = parse_classes(classes).map_err(Fail::Malformed)?;
    let model = build_dimer(&inputs)?;
    let report = validate_dimer(&model)?;
    let class_list = |v: &[LatticeVector]| v.iter().map(jvec).collect::<Vec<_>>();
    let text = match format {
        Format::Json => pretty(&json!({
            "vertices": model.vertices.iter().map(|v| json!({
                "color": format!("{:?}", v.color).to_lowercase(),
                "position": [rat(&v.position.0), rat(&v.position.1)],
                "edges": v.edges,
            })).collect::<Vec<_>>(),
            "edges": model.edges.iter().map(|e| json!({
                "white": e.white,
                "black": e.black,
                "displacement": [rat(&e.displacement().0), rat(&e.displacement().1)],
            })).collect::<Vec<_>>(),
            "faces": model.faces,
            "report": {
                "valid": report.is_valid(),
                "bipartite": report.bipartite,
                "triangular": report.triangular,
                "euler": report.euler,
                "zigzag_classes": class_list(&report.zigzag_classes),
                "expected_classes": class_list(&report.expected_classes),
            },
        })),
        Format::Table => {
            let whites = model.vertices.iter().filter(|v| v.color == atf_core::tropical::Color::White).count();
            let zz: Vec<String> = report.zigzag_classes.iter().map(|c| format!("({},{})", c.x, c.y)).collect();
            format!(
                "vertices: {} ({} white, {} black)\nedges: {}\nfaces: {}\nbipartite: {}\ntriangular: {}\neuler: {}\nzigzag classes: {}\nclasses match: {}\nvalid: {}\n",
                model.vertices.len(),
                whites,
                model.vertices.len() - whites,
                model.edges.len(),
                model.faces.len(),
                report.bipartite,
                report.triangular,
                report.euler,
                zz.join(" "),
                report.classes_match(),
                report.is_valid()
            )
        }
        Format::Svg => return Err(no_svg("stc dimer")),
    };
    if report.is_valid() {
        Ok(text)
    } else {
        Err(Fail::Invalid(text))
    }
}

fn chain_cmd(case: ChainCase, q: &BigInt, r: &BigInt, format: Format) -> Out {
    let c = verify_chain(case, q, r)?;
    let rel = |r: Relation| if r == Relation::Eq { "=" } else { "<" };
    let text = match format {
        Format::Json => pretty(&json!({
            "case": format!("{:?}", c.case).to_lowercase(),
            "q": JInt(c.q.clone()),
            "r": JInt(c.r.clone()),
            "a": JInt(c.a.clone()),
            "b": c.b.clone().map(JInt),
            "u": c.u.as_ref().map(jvec),
            "linking": c.linking,
            "classes": c.classes,
            "intersection_count": c.intersection_count,
            "identities": c.identities.iter().map(|i| json!({
                "name": i.name,
                "left": JInt(i.left.clone()),
                "relation": rel(i.relation),
                "right": JInt(i.right.clone()),
                "pass": i.pass,
            })).collect::<Vec<_>>(),
            "valid": c.is_valid(),
        })),
        Format::Table => {
            let mut rows = vec![vec!["identity".to_string(), "left".into(), "".into(), "right".into(), "pass".into()]];
            for i in &c.identities {
                rows.push(vec![i.name.clone(), i.left.to_string(), rel(i.relation).into(), i.right.to_string(), i.pass.to_string()]);
            }
            format!("chain {:?} q={} r={} a={}\n{}valid: {}\n", c.case, c.q, c.r, c.a, table(&rows), c.is_valid())
        }
        Format::Svg => return Err(no_svg("stc chain")),
    };
    if c.is_valid() {
        Ok(text)
    } else {
        Err(Fail::Invalid(text))
    }
}

fn zero_based(s: &str, what: &str) -> Result<Vec<usize>, Fail> {
    u64s(s, what)?.into_iter().map(|v| if v == 0 { Err(malformed(format!("{what}: vertices are numbered from 1"))) } else { Ok(v as usize - 1) }).collect()
}

fn emit_values(values: &[BigInt], emit: Emit, w: &Weights) -> String {
    match emit {
        Emit::Quotients => {
            let m = maslov_sequence(values, w.odd_weight, w.even_weight);
            m.quotients.iter().enumerate().map(|(i, q)| format!("{} {q:.12}\n", i + 1)).collect()
        }
        _ => values.iter().map(|v| format!("{v}\n")).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn quiver_run_cmd(fan: &str, pre: Option<&str>, t1: Option<&str>, t2: Option<&str>, frozen: Option<&str>, rounds: usize, emit: Emit, w: &Weights) -> Out {
    let mut cfg = if fan == "dp3" {
        RecipeConfig::dp3()
    } else {
        let path = PathBuf::from(fan);
        let rays: Vec<[i64; 2]> = parse(read_json(&path)?, &path)?;
        let rays = rays.into_iter().map(|[x, y]| LatticeVector::new(x, y)).collect();
        RecipeConfig { rays, pre_mutations: Vec::new(), t1: Vec::new(), t2: Vec::new(), frozen: Vec::new(), ..RecipeConfig::dp3() }
    };
    if let Some(s) = pre {
        cfg.pre_mutations = zero_based(s, "pre")?;
    }
    if let Some(s) = t1 {
        cfg.t1 = zero_based(s, "t1")?;
    }
    if let Some(s) = t2 {
        cfg.t2 = zero_based(s, "t2")?;
    }
    if let Some(s) = frozen {
        cfg.frozen = zero_based(s, "frozen")?;
    }
    let run = recipe_run(&cfg, rounds)?;
    Ok(match emit {
        Emit::Seeds => run
            .seeds
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let vars: Vec<String> = s.variables.iter().map(|v| v.to_string()).collect();
                format!("{} {}\n", i, vars.join(" "))
            })
            .collect(),
        _ => emit_values(&run.sequence, emit, w),
    })
}

fn quiver_markov_cmd(cfg: &str, seed: &str, len: usize, emit: Emit, w: &Weights) -> Out {
    let cfg = config(cfg)?;
    let seed = triple(seed)?;
    let values = markov_interleaving(&cfg, &seed, len)?;
    if emit == Emit::Seeds {
        return Err(malformed("markov emits sequence or quotients"));
    }
    Ok(emit_values(&values, emit, w))
}

fn render_cmd(file: &Path, opts: &RenderOptions) -> Out {
    let v = read_json(file)?;
    let is_graph = v.get("edges").is_some() || v.get("host").is_some();
    if is_graph {
        let j: StcJson = parse(v, file)?;
        Ok(stc_svg(&j.to_graph(None)?, opts)?)
    } else {
        let j: AtbdJson = parse(v, file)?;
        Ok(atbd_svg(&j.to_base()?, opts)?)
    }
}

fn dispatch(cli: Cli) -> Result<(String, Option<ServeRequest>), Fail> {
    let out = match cli.command {
        Command::Presets { format } => presets(format)?,
        Command::Validate { file, format } => validate_cmd(&file, format)?,
        Command::Mutate { file, vertex, order, format } => mutate_cmd(&file, vertex, order, format)?,
        Command::Staircase { preset, steps, format } => staircase_cmd(preset, steps, format)?,
        Command::Dioph { config, tree, brute: _, bound, seed, format } => dioph_cmd(&config, tree, bound, seed.as_deref(), format)?,
        Command::Stc { command } => match command {
            StcCommand::Validate { file, format } => stc_validate_cmd(&file, format)?,
            StcCommand::Tripod { preset, triple, format } => tripod_cmd(preset, &triple, format)?,
            StcCommand::Dimer { classes, format } => dimer_cmd(&classes, format)?,
            StcCommand::Chain { case, q, r, format } => chain_cmd(case, &q, &r, format)?,
        },
        Command::Quiver { command } => match command {
            QuiverCommand::Run { fan, pre, t1, t2, frozen, rounds, emit, weights } => {
                quiver_run_cmd(&fan, pre.as_deref(), t1.as_deref(), t2.as_deref(), frozen.as_deref(), rounds, emit, &weights)?
            }
            QuiverCommand::Markov { config, seed, len, emit, weights } => quiver_markov_cmd(&config, &seed, len, emit, &weights)?,
        },
        Command::Render { file, out, frozen, no_cuts, no_nodes, no_labels } => {
            let opts = RenderOptions { cuts: !no_cuts, nodes: !no_nodes, labels: !no_labels, frozen };
            let svg = render_cmd(&file, &opts)?;
            if out == "svg" || out == "-" {
                svg
            } else {
                std::fs::write(&out, svg).map_err(|e| malformed(format!("{out}: {e}")))?;
                format!("wrote {out}\n")
            }
        }
        Command::Serve { port, bind, data_dir } => return Ok((format!("listening on {bind}:{port}\n"), Some(ServeRequest { bind, port, data_dir }))),
    };
    Ok((out, None))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { Outcome { code, stdout: text, ..Outcome::default() } } else { Outcome { code, stderr: text, ..Outcome::default() } };
        }
    };
    match dispatch(cli) {
        Ok((stdout, serve)) => Outcome { code: 0, stdout, stderr: String::new(), serve },
        Err(Fail::Invalid(stdout)) => Outcome { code: 1, stdout, ..Outcome::default() },
        Err(Fail::Malformed(msg)) => Outcome { code: 2, stderr: format!("error: {msg}\n"), ..Outcome::default() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atf(args: &[&str]) -> Outcome {
        run(std::iter::once("atf").chain(args.iter().copied()))
    }

    fn weight_column(table: &str) -> Vec<String> {
        table.lines().skip(2).take_while(|l| !l.starts_with("accumulation")).map(|l| l.split_whitespace().nth(2).unwrap().to_string()).collect()
    }

    #[test]
    fn cp2_staircase_weights() {
        let o = atf(&["staircase", "--preset", "cp2", "--steps", "4", "--format", "table"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(weight_column(&o.stdout), ["(1,1,4)", "(1,4,25)", "(1,25,169)", "(1,169,1156)"]);
    }

    #[test]
    fn tree_equals_brute_force() {
        let tree = atf(&["dioph", "--config", "1,1,1,3", "--tree", "--bound", "34", "--format", "json"]);
        let brute = atf(&["dioph", "--config", "1,1,1,3", "--brute", "--bound", "34", "--format", "json"]);
        assert_eq!((tree.code, brute.code), (0, 0));
        let sols = |o: &Outcome| serde_json::from_str::<Value>(&o.stdout).unwrap()["solutions"].clone();
        assert_eq!(sols(&tree), sols(&brute));
        assert!(sols(&tree).as_array().unwrap().contains(&json!(["2", "5", "29"])));
    }

    #[test]
    fn mutate_reports_invalid_bases() {
        let dir = std::env::temp_dir().join(format!("atf-mutate-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        // the projective plane triangle with two nodes on the first cut
        let path = dir.join("two_nodes.json");
        std::fs::write(
            &path,
            r#"{"vertices":[[-1,-1],[2,-1],[-1,2]],"cuts":[{"direction":[1,1],"nodes":2},{"direction":[-2,1],"nodes":1},{"direction":[1,-2],"nodes":1}]}"#,
        )
        .unwrap();
        let o = atf(&["mutate", path.to_str().unwrap(), "--vertex", "1", "--order", "1", "--format", "table"]);
        assert_eq!(o.code, 1);
        assert!(o.stdout.contains("valid: false"));
        assert!(o.stdout.lines().nth(2).unwrap().starts_with("0       false"));
        let bad = dir.join("bad.json");
        std::fs::write(&bad, "{\"vertices\": 3}").unwrap();
        assert_eq!(atf(&["mutate", bad.to_str().unwrap(), "--vertex", "0", "--order", "1"]).code, 2);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(atf(&["frobnicate"]).code, 2);
        assert_eq!(atf(&["staircase", "--preset", "nowhere", "--steps", "2"]).code, 2);
        assert_eq!(atf(&["--help"]).code, 0);
    }

    #[test]
    fn chain_and_dimer_commands() {
        let o = atf(&["stc", "chain", "--case", "bl4", "--q", "7", "--r", "2"]);
        assert_eq!(o.code, 0, "{}{}", o.stdout, o.stderr);
        let o = atf(&["stc", "dimer", "--classes", "1:1,-1;3:0,1;1:-1,-2"]);
        assert_eq!(o.code, 0, "{}{}", o.stdout, o.stderr);
        assert!(o.stdout.contains("edges: 9"));
        assert_eq!(atf(&["stc", "dimer", "--classes", "1:1,0;1:0,1;1:1,1"]).code, 1);
        assert_eq!(atf(&["stc", "dimer", "--classes", "1:1,0;1:0,1"]).code, 2);
        assert_eq!(atf(&["stc", "dimer", "--classes", "x"]).code, 2);
    }

    #[test]
    fn quiver_commands() {
        let o = atf(&["quiver", "markov", "--len", "8"]);
        assert_eq!(o.stdout.split_whitespace().collect::<Vec<_>>(), ["1", "1", "1", "2", "3", "7", "11", "26"]);
        let o = atf(&["quiver", "run", "--fan", "dp3", "--pre", "1,5,2", "--t1", "3,5", "--t2", "1,2,4", "--frozen", "6", "--rounds", "2"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(o.stdout.lines().next(), Some("2"));
    }

    #[test]
    fn tripod_and_render() {
        let o = atf(&["stc", "tripod", "--preset", "cp2", "--triple", "1,5,2"]);
        assert_eq!(o.code, 0, "{}{}", o.stdout, o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        let dir = std::env::temp_dir().join(format!("atf-render-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.json");
        std::fs::write(&path, serde_json::to_string(&v["graph"]).unwrap()).unwrap();
        let r = atf(&["render", path.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert!(r.stdout.starts_with("<svg") && r.stdout.contains("<polyline"));
        assert_eq!(atf(&["stc", "validate", path.to_str().unwrap()]).code, 0);
        std::fs::remove_dir_all(&dir).ok();
    }
}
