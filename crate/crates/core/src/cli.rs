//! Command-line front end of the `cbraid` binary.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or resource error.

use std::collections::BTreeMap;
use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::braid::{presentation_from_wqp, BraidWord};
use crate::coxeter::{classify_finite, CoxeterContext, CoxeterGraph, CoxeterType};
use crate::error::{Error, Result};
use crate::exchange::{build_ceg, enumerate_polygons, face_counts, h1_of, ExchangeGraph, DEFAULT_BUDGET};
use crate::folding::{lookup, Folding};
use crate::garside::{Garside, DEFAULT_WORD_CAP};
use crate::quiver::Seed;
use crate::verify::{
    build_twist_labeling, random_sequences, twist_quiver, verify_diagram, verify_garside_engine, verify_iota,
    verify_lem_surj, verify_local_twist_decomposition, verify_presentations, verify_theta_invariance,
    VerificationReport,
};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "cbraid", version, about = "Cluster exchange graphs and braid groups of finite Coxeter type")]
pub struct Cli {
    /// Worker threads for parallel suites (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Identify a Coxeter graph given as `1-2:5,2-3` or as a JSON file or string.
    Classify { graph: String },
    /// Build the exchange graph and print statistics, optionally exporting it.
    Ceg {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value = "summary")]
        format: CegFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Presentation of the braid group at a vertex of the exchange graph.
    Presentation {
        #[command(flatten)]
        target: Target,
        /// Comma-separated 1-based weighted mutations from the initial vertex.
        #[arg(long, default_value = "")]
        mutations: String,
        /// A vertex id of the exchange graph, or `triple-heptagon`.
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: TextFormat,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        target: Target,
        /// Single value or inclusive range `a..b`.
        #[arg(long, default_value = "2..30")]
        m: String,
        /// Maximal mutation-sequence length.
        #[arg(long, default_value_t = 8)]
        len: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// BFS radius of the twist labelling; whole graph when absent.
        #[arg(long)]
        radius: Option<usize>,
        /// Random vertices for the diagram suite.
        #[arg(long, default_value_t = 10)]
        vertices: usize,
        /// Cases per property for the garside suite.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_WORD_CAP)]
        word_cap: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: TextFormat,
    },
    /// Decide whether two words are equal in the braid group.
    Wp {
        #[arg(long = "type")]
        ty: String,
        lhs: String,
        rhs: String,
        #[arg(long, default_value_t = DEFAULT_WORD_CAP)]
        word_cap: usize,
    },
}

#[derive(clap::Args, Debug, Clone, Serialize)]
pub struct Target {
    /// Type label such as `A3`, `B4`, `H3`, `I2:7`.
    #[arg(long = "type")]
    #[serde(rename = "type")]
    pub ty: Option<String>,
    /// Folding selector `Delta:Lambda`, e.g. `H4:E8`.
    #[arg(long)]
    pub folding: Option<String>,
}

impl Target {
    fn resolve(&self) -> Result<Arc<Folding>> {
        match (&self.folding, &self.ty) {
            (Some(sel), _) => lookup(sel),
            (None, Some(ty)) => lookup(ty),
            (None, None) => Err(Error::Parse("one of --type or --folding is required".into())),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CegFormat {
    Summary,
    Dot,
    DotOriented,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LemSurj,
    Theta,
    Iota,
    LocalTwist,
    Labeling,
    Presentations,
    Diagram,
    Homology,
    Garside,
}

/// Graph input in JSON: an edge list `{"vertices": n, "edges": [[i, j, m], ...]}`
/// or a weighted quiver `{"vertices": n, "arrows": [{"src", "dst", "weight"}]}`,
/// vertices 1-based.
#[derive(Deserialize)]
#[serde(untagged)]
enum GraphInput {
    Edges { vertices: usize, edges: Vec<(usize, usize, u32)> },
    Quiver { vertices: usize, arrows: Vec<ArrowInput> },
}

#[derive(Deserialize)]
struct ArrowInput {
    src: usize,
    dst: usize,
    weight: u32,
}

fn parse_graph(input: &str) -> Result<CoxeterGraph> {
    let text = if input.trim_start().starts_with('{') || input.contains('-') {
        input.to_string()
    } else {
        fs::read_to_string(input)?
    };
    if !text.trim_start().starts_with('{') {
        return CoxeterGraph::parse_edge_list(&text, None);
    }
    let one_based = |v: usize| v.checked_sub(1).ok_or_else(|| Error::Parse("vertices are 1-based".into()));
    let (n, edges) = match serde_json::from_str::<GraphInput>(&text)? {
        GraphInput::Edges { vertices, edges } => (vertices, edges),
        GraphInput::Quiver { vertices, arrows } => (vertices, arrows.into_iter().map(|a| (a.src, a.dst, a.weight)).collect()),
    };
    let edges = edges.into_iter().map(|(a, b, m)| Ok((one_based(a)?, one_based(b)?, m))).collect::<Result<Vec<_>>>()?;
    CoxeterGraph::from_edges(n, &edges)
}

fn parse_m_range(s: &str) -> Result<RangeInclusive<u32>> {
    let num = |x: &str| x.trim().parse::<u32>().map_err(|e| Error::Parse(format!("--m {:?}: {}", s, e)));
    let r = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
        None => {
            let m = num(s)?;
            m..=m
        }
    };
    if *r.start() < 2 || r.is_empty() {
        return Err(Error::Parse(format!("--m {:?}: need 2 <= a <= b", s)));
    }
    Ok(r)
}

fn parse_mutations(s: &str, rank: usize) -> Result<Vec<usize>> {
    s.split([',', ' '])
        .filter(|x| !x.is_empty())
        .map(|x| {
            let i: usize = x.trim().parse().map_err(|e| Error::Parse(format!("mutation {:?}: {}", x, e)))?;
            if i == 0 || i > rank {
                return Err(Error::GeneratorOutOfRange(i));
            }
            Ok(i - 1)
        })
        .collect()
}

fn garside_for(t: CoxeterType, cap: usize) -> Result<Garside> {
    Ok(Garside::with_cap(CoxeterContext::from_type(t)?, cap))
}

fn build(f: &Arc<Folding>, budget: usize) -> Result<ExchangeGraph> {
    build_ceg(Seed::initial(f.clone(), None)?, budget)
}

fn polygon_name(size: usize) -> String {
    match size {
        4 => "squares".into(),
        5 => "pentagons".into(),
        6 => "hexagons".into(),
        7 => "heptagons".into(),
        8 => "octagons".into(),
        _ => format!("{}-gons", size),
    }
}

/// Output and exit code of one command.
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

fn pass(stdout: String) -> Outcome {
    Outcome { stdout, code: EXIT_PASS }
}

fn cmd_classify(graph: &str) -> Result<Outcome> {
    let g = parse_graph(graph)?;
    Ok(match classify_finite(&g)? {
        Some(t) => pass(format!("{}\n", t)),
        None => Outcome { stdout: "not finite\n".into(), code: EXIT_FAIL },
    })
}

fn cmd_ceg(target: &Target, format: CegFormat, out: Option<&PathBuf>, budget: usize) -> Result<Outcome> {
    let f = target.resolve()?;
    let g = build(&f, budget)?;
    let polys = enumerate_polygons(&g)?;
    let by_size: BTreeMap<usize, usize> = face_counts(&polys).into_iter().map(|(m, c)| (m as usize + 2, c)).collect();
    let faces: Vec<String> = by_size.iter().map(|(&s, &c)| format!("{} {}", c, polygon_name(s))).collect();
    let mut text = format!(
        "type {} (folding {})\nvertices {}\nedges {}\npolygons {}\nfaces: {}\n",
        f.target_type(),
        f.label(),
        g.num_vertices(),
        g.num_edges(),
        polys.len(),
        faces.join(", ")
    );
    let export = match format {
        CegFormat::Summary => None,
        CegFormat::Dot => Some(g.to_dot(false)),
        CegFormat::DotOriented => Some(g.to_dot(true)),
        CegFormat::Json => Some(serde_json::to_string_pretty(&g.to_json(&polys))? + "\n"),
    };
    match (export, out) {
        (Some(e), Some(path)) => {
            fs::write(path, e)?;
            text.push_str(&format!("wrote {}\n", path.display()));
        }
        (Some(e), None) => text = e,
        (None, _) => {}
    }
    Ok(pass(text))
}

/// Vertices lying on three polygons of the largest size.
fn triple_polygon_vertices(g: &ExchangeGraph) -> Result<Vec<usize>> {
    let polys = enumerate_polygons(g)?;
    let top = polys.iter().map(|p| p.m).max().unwrap_or(0);
    let mut count = vec![0usize; g.num_vertices()];
    for p in polys.iter().filter(|p| p.m == top) {
        for &v in &p.vertices {
            count[v] += 1;
        }
    }
    Ok((0..g.num_vertices()).filter(|&v| count[v] >= 3).collect())
}

fn cmd_presentation(target: &Target, mutations: &str, vertex: Option<&str>, format: TextFormat) -> Result<Outcome> {
    let f = target.resolve()?;
    let (quiver, words, place) = match vertex {
        None => {
            let mut seed = Seed::initial(f.clone(), None)?;
            let seq = parse_mutations(mutations, f.target().rank())?;
            for &i in &seq {
                seed = seed.weighted_mutate(i)?;
            }
            let place = serde_json::json!({ "mutations": seq.iter().map(|i| i + 1).collect::<Vec<_>>() });
            (twist_quiver(&seed.quiver()?), None, place)
        }
        Some(sel) => {
            let g = build(&f, DEFAULT_BUDGET)?;
            let v = if sel == "triple-heptagon" {
                let cands = triple_polygon_vertices(&g)?;
                // prefer the vertex whose cycle starts at generator 1 in increasing order
                let preferred = cands.iter().copied().find(|&v| {
                    presentation_from_wqp(&twist_quiver(&g.vertex(v).quiver))
                        .map(|p| p.relators.iter().any(|r| r.text == "Co(b1,b2^{b3b2})"))
                        .unwrap_or(false)
                });
                preferred.or(cands.first().copied()).ok_or_else(|| Error::Parse("no vertex lies on three largest polygons".into()))?
            } else {
                sel.parse::<usize>()
                    .ok()
                    .filter(|&v| v < g.num_vertices())
                    .ok_or_else(|| Error::Parse(format!("--vertex {:?}: expected an id below {}", sel, g.num_vertices())))?
            };
            let gd = garside_for(f.target_type(), DEFAULT_WORD_CAP)?;
            let radius = g.distances()[v];
            let lab = build_twist_labeling(&g, &gd, Some(radius))?;
            let place = serde_json::json!({ "vertex": v, "path": lab.path_to(v).iter().map(|i| i + 1).collect::<Vec<_>>() });
            (twist_quiver(&g.vertex(v).quiver), lab.words[v].clone(), place)
        }
    };
    let p = presentation_from_wqp(&quiver)?;
    let stdout = match format {
        TextFormat::Json => {
            let doc = serde_json::json!({
                "type": f.target_type().to_string(),
                "folding": f.label(),
                "at": place,
                "quiver": quiver,
                "presentation": p,
                "twist_words": words,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        TextFormat::Text => {
            let mut s = format!("type {} (folding {})\nat {}\nquiver {}\n", f.target_type(), f.label(), place, quiver.describe());
            if let Some(ws) = &words {
                for (i, w) in ws.iter().enumerate() {
                    s.push_str(&format!("t{} = {}\n", i + 1, if w.is_empty() { "1".to_string() } else { w.to_string() }));
                }
            }
            s + &p.to_text() + "\n"
        }
    };
    Ok(pass(stdout))
}

#[derive(Serialize)]
struct VerifyConfig<'a> {
    suite: Suite,
    #[serde(rename = "type")]
    ty: String,
    folding: String,
    seed: u64,
    #[serde(flatten)]
    extra: BTreeMap<&'a str, serde_json::Value>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: Suite,
    target: &Target,
    m: &str,
    len: usize,
    samples: usize,
    seed: u64,
    radius: Option<usize>,
    vertices: usize,
    cases: usize,
    budget: usize,
    word_cap: usize,
    format: TextFormat,
) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extra: BTreeMap<&str, serde_json::Value> = BTreeMap::new();
    let (ty, folding, report) = if suite == Suite::LemSurj {
        let range = parse_m_range(m)?;
        extra.insert("m", serde_json::json!([range.start(), range.end()]));
        let mut rep = VerificationReport::new("lem-surj");
        for m in range {
            rep.merge(verify_lem_surj(m)?);
        }
        ("-".to_string(), "-".to_string(), rep)
    } else {
        let f = target.resolve()?;
        let gd = garside_for(f.target_type(), word_cap)?;
        let gl = || garside_for(f.source_type(), word_cap);
        let rep = match suite {
            Suite::LemSurj => unreachable!("handled above"),
            Suite::Theta => {
                extra.insert("len", len.into());
                extra.insert("samples", samples.into());
                let seqs = random_sequences(&mut rng, f.target().rank(), samples, len);
                verify_theta_invariance(&f, &seqs, &gd)?
            }
            Suite::Iota => verify_iota(&f, &gl()?, 100_000)?,
            Suite::LocalTwist => verify_local_twist_decomposition(&f, &gl()?)?,
            Suite::Labeling | Suite::Presentations => {
                extra.insert("radius", serde_json::json!(radius));
                let g = build(&f, budget)?;
                match build_twist_labeling(&g, &gd, radius) {
                    Ok(lab) => {
                        let mut rep = verify_presentations(&g, &lab, &gd)?;
                        rep.suite = if suite == Suite::Labeling { "labeling" } else { "presentations" }.into();
                        rep.stat("consistency_checks", lab.consistency_checks);
                        rep
                    }
                    Err(Error::PathDependence(detail)) => {
                        let mut rep = VerificationReport::new("labeling");
                        rep.fail_with("path independence", serde_json::json!({ "folding": f.label(), "detail": detail }));
                        rep
                    }
                    Err(e) => return Err(e),
                }
            }
            Suite::Diagram => {
                extra.insert("vertices", vertices.into());
                let g = build(&f, budget)?;
                let nv = g.num_vertices();
                let mut chosen = vec![g.initial()];
                chosen.extend(sample(&mut rng, nv, vertices.min(nv)).into_iter().filter(|&v| v != g.initial()));
                let dist = g.distances();
                let r = chosen.iter().map(|&v| dist[v]).max();
                let lab = build_twist_labeling(&g, &gd, r)?;
                let mut rep = verify_diagram(&g, &lab, &chosen, &gl()?)?;
                rep.stat("checked_vertices", &chosen);
                rep
            }
            Suite::Homology => {
                let g = build(&f, budget)?;
                let polys = enumerate_polygons(&g)?;
                let h1 = h1_of(&g, &polys);
                let mut rep = VerificationReport::new("homology");
                rep.check("H1 of the polygon complex is trivial", h1.is_empty(), Some(format!("invariant factors {:?}", h1)));
                rep.stat("vertices", g.num_vertices());
                rep.stat("edges", g.num_edges());
                rep.stat("polygons", polys.len());
                rep
            }
            Suite::Garside => {
                extra.insert("cases", cases.into());
                verify_garside_engine(&gd, cases, &mut rng)?
            }
        };
        (f.target_type().to_string(), f.label(), rep)
    };
    let code = if report.passed() { EXIT_PASS } else { EXIT_FAIL };
    let config = VerifyConfig { suite, ty, folding, seed, extra };
    let stdout = match format {
        TextFormat::Json => serde_json::to_string_pretty(&serde_json::json!({ "config": config, "report": report }))? + "\n",
        TextFormat::Text => format!("config {}\n{}", serde_json::to_string(&config)?, report.to_text()),
    };
    Ok(Outcome { stdout, code })
}

fn cmd_wp(ty: &str, lhs: &str, rhs: &str, cap: usize) -> Result<Outcome> {
    let t: CoxeterType = ty.parse()?;
    let g = garside_for(t, cap)?;
    let (u, v) = (BraidWord::parse(lhs)?, BraidWord::parse(rhs)?);
    Ok(if g.equal(&u, &v)? {
        pass("equal\n".into())
    } else {
        Outcome { stdout: "unequal\n".into(), code: EXIT_FAIL }
    })
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Classify { graph } => cmd_classify(graph),
        Command::Ceg { target, format, out, budget } => cmd_ceg(target, *format, out.as_ref(), *budget),
        Command::Presentation { target, mutations, vertex, format } => {
            cmd_presentation(target, mutations, vertex.as_deref(), *format)
        }
        Command::Verify { suite, target, m, len, samples, seed, radius, vertices, cases, budget, word_cap, format } => {
            cmd_verify(*suite, target, m, *len, *samples, *seed, *radius, *vertices, *cases, *budget, *word_cap, *format)
        }
        Command::Wp { ty, lhs, rhs, word_cap } => cmd_wp(ty, lhs, rhs, *word_cap),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {}", e);
            return EXIT_USAGE;
        }
    }
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(Error::PathDependence(detail)) => {
            eprintln!("verification failed: path dependence: {}", detail);
            EXIT_FAIL
        }
        Err(e) => {
            eprintln!("error: {}", e);
            EXIT_USAGE
        }
    }
}
