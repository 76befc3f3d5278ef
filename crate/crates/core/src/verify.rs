//! Verification suites over exchange graphs, presentations and foldings.
//! Every equality claimed in a braid group is decided by Garside normal forms.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::sync::Arc;

use itertools::Itertools;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::braid::{
    alternating, coxeter_check, identity_expression, iota_f, presentation_from_wqp, theta_flat, theta_sharp, BraidWord,
    GeneratorExpression,
};
use crate::coxeter::CoxeterContext;
use crate::error::{Error, Result};
use crate::exchange::ExchangeGraph;
use crate::folding::{Folding, WeightedQuiver};
use crate::garside::{parse_torus_word, torus_equal, Garside, TorusLetter};
use crate::quiver::{Pattern, Seed};

/// Expressions longer than this are replaced by a shorter equal word.
pub const RENORMALIZE_LEN: usize = 512;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub counterexample: Option<serde_json::Value>,
    pub stats: BTreeMap<String, serde_json::Value>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport { suite: suite.into(), checks: Vec::new(), counterexample: None, stats: BTreeMap::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: Option<String>) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    pub fn fail_with(&mut self, name: impl Into<String>, payload: serde_json::Value) {
        let name = name.into();
        self.check(name, false, Some(payload.to_string()));
        if self.counterexample.is_none() {
            self.counterexample = Some(payload);
        }
    }

    pub fn stat(&mut self, key: &str, value: impl Serialize) {
        self.stats.insert(key.to_string(), serde_json::to_value(value).expect("serializable stat"));
    }

    pub fn merge(&mut self, other: VerificationReport) {
        let prefix = other.suite.clone();
        for c in other.checks {
            self.checks.push(Check { name: format!("{}/{}", prefix, c.name), ..c });
        }
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
        for (k, v) in other.stats {
            self.stats.insert(format!("{}/{}", prefix, k), v);
        }
    }

    pub fn to_text(&self) -> String {
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let mut s = format!(
            "suite {}: {} ({} checks, {} failed)\n",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed
        );
        for (k, v) in &self.stats {
            s.push_str(&format!("  {} = {}\n", k, v));
        }
        for c in self.checks.iter().filter(|c| !c.passed) {
            s.push_str(&format!("  FAILED {}: {}\n", c.name, c.detail.as_deref().unwrap_or("")));
        }
        s
    }
}

fn renormalize(g: &Garside, expr: &mut [BraidWord]) -> Result<()> {
    for w in expr.iter_mut() {
        if w.len() > RENORMALIZE_LEN {
            *w = g.shorten(w)?;
        }
    }
    Ok(())
}

/// Quiver of the endomorphism algebra of a seed: the exchange-matrix quiver
/// (`b_ij > 0` gives `i -> j`) with all arrows reversed. Twist transport and
/// presentations are read off this quiver.
pub fn twist_quiver(q: &WeightedQuiver) -> WeightedQuiver {
    q.opposite()
}

/// Quiver `q` read through `rho`: arrow `j -> k` iff `q` has `rho[j] -> rho[k]`.
fn pull_back(q: &WeightedQuiver, rho: &[usize]) -> WeightedQuiver {
    let n = rho.len();
    let mut out = WeightedQuiver::new(n);
    for j in 0..n {
        for k in 0..n {
            if let Some(w) = q.arrow(rho[j], rho[k]) {
                out.add_arrow(j, k, w).expect("pull-back of a quiver");
            }
        }
    }
    out
}

/// In `Br Lambda`, the generators of each fiber commute and their product
/// does not depend on the order.
pub fn verify_local_twist_decomposition(f: &Folding, g: &Garside) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("local-twist");
    for (i, fib) in f.fibers().iter().enumerate() {
        for (&a, &b) in fib.iter().tuple_combinations() {
            let ab = BraidWord::positive(&[a, b]);
            let ba = BraidWord::positive(&[b, a]);
            let ok = g.equal(&ab, &ba)?;
            rep.check(format!("fiber {}: b{} b{} = b{} b{}", i + 1, a + 1, b + 1, b + 1, a + 1), ok, None);
        }
        let base = BraidWord::positive(fib);
        let ok = fib
            .iter()
            .copied()
            .permutations(fib.len())
            .map(|p| g.equal(&BraidWord::positive(&p), &base))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|x| x);
        rep.check(format!("fiber {}: product independent of order", i + 1), ok, None);
    }
    Ok(rep)
}

/// Local-twist words `t_i^Y` in the standard generators of `Br Delta`.
#[derive(Clone, Debug)]
pub struct TwistLabeling {
    /// `None` outside the labelled ball.
    pub words: Vec<Option<GeneratorExpression>>,
    /// BFS-tree parent and the label at the parent.
    pub parent: Vec<Option<(usize, usize)>>,
    /// Number of edges along which transported words were compared.
    pub consistency_checks: usize,
}

impl TwistLabeling {
    pub fn labelled(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.words.len()).filter(|&v| self.words[v].is_some())
    }

    /// Labels along the BFS tree from the initial vertex to `v`.
    pub fn path_to(&self, v: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some((p, l)) = self.parent[cur] {
            path.push(l);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// Transports twist words along one mutation edge: conjugation by `t_i` on
/// a green edge, by `t_i^{-1}` on a red one. Result is in the labels of `dst`.
fn transport(g_ceg: &ExchangeGraph, v: usize, label: usize, words: &[BraidWord]) -> Result<GeneratorExpression> {
    let e = g_ceg.edge(v, label);
    let q_here = twist_quiver(&g_ceg.vertex(v).quiver);
    let q_there = twist_quiver(&pull_back(&g_ceg.vertex(e.dst).quiver, &e.rho));
    let moved = if e.green {
        theta_sharp(words, label, &q_here, &q_there)?
    } else {
        theta_flat(words, label, &q_there, &q_here)?
    };
    let mut out = vec![BraidWord::empty(); moved.len()];
    for (j, w) in moved.into_iter().enumerate() {
        out[e.rho[j]] = w;
    }
    Ok(out)
}

/// BFS transport of twist words from the initial vertex, within `radius`
/// when given. Every edge between labelled vertices is checked for
/// agreement in `Br Delta`.
pub fn build_twist_labeling(g_ceg: &ExchangeGraph, g: &Garside, radius: Option<usize>) -> Result<TwistLabeling> {
    let nv = g_ceg.num_vertices();
    let n = g_ceg.rank();
    let mut words: Vec<Option<GeneratorExpression>> = vec![None; nv];
    let mut parent = vec![None; nv];
    let mut dist = vec![usize::MAX; nv];
    words[0] = Some(identity_expression(n));
    dist[0] = 0;
    let mut queue = VecDeque::from([0]);
    let mut checks = 0;
    while let Some(v) = queue.pop_front() {
        let here = words[v].clone().expect("queued vertices are labelled");
        for label in 0..n {
            let e = g_ceg.edge(v, label);
            let dst = e.dst;
            if words[dst].is_none() && radius.is_none_or(|r| dist[v] < r) {
                let mut moved = transport(g_ceg, v, label, &here)?;
                renormalize(g, &mut moved)?;
                words[dst] = Some(moved);
                parent[dst] = Some((v, label));
                dist[dst] = dist[v] + 1;
                queue.push_back(dst);
                continue;
            }
            let Some(stored) = words[dst].as_ref() else { continue };
            if parent[dst] == Some((v, label)) {
                continue;
            }
            let moved = transport(g_ceg, v, label, &here)?;
            for j in 0..n {
                if !g.equal(&moved[j], &stored[j])? {
                    return Err(Error::PathDependence(format!(
                        "t{} at vertex {}: via path {:?} then edge ({} -> {}, label {}) gives [{}], stored [{}] via path {:?}",
                        j + 1,
                        dst,
                        labels_1based(&path(&parent, v)),
                        v,
                        dst,
                        label + 1,
                        moved[j],
                        stored[j],
                        labels_1based(&path(&parent, dst)),
                    )));
                }
            }
            checks += 1;
        }
    }
    Ok(TwistLabeling { words, parent, consistency_checks: checks })
}

fn path(parent: &[Option<(usize, usize)>], v: usize) -> Vec<usize> {
    let mut p = Vec::new();
    let mut cur = v;
    while let Some((u, l)) = parent[cur] {
        p.push(l);
        cur = u;
    }
    p.reverse();
    p
}

fn labels_1based(p: &[usize]) -> Vec<usize> {
    p.iter().map(|l| l + 1).collect()
}

/// Per-vertex presentation check: every relator of the presentation of the
/// folded quiver dies in `W` and in `Br Delta` under the twist words.
pub fn verify_presentations(g_ceg: &ExchangeGraph, labeling: &TwistLabeling, g: &Garside) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("presentations");
    let ctx = g.context();
    let vertices: Vec<usize> = labeling.labelled().collect();
    type Outcome = (usize, Vec<(String, bool)>, Vec<Pattern>);
    let results: Vec<Outcome> = vertices
        .par_iter()
        .map(|&v| -> Result<Outcome> {
            let words = labeling.words[v].as_ref().unwrap();
            let p = presentation_from_wqp(&twist_quiver(&g_ceg.vertex(v).quiver))?;
            let mut out = Vec::new();
            if !coxeter_check(&p, ctx, Some(words))? {
                out.push(("coxeter quotient".to_string(), false));
            }
            for r in &p.relators {
                let ok = g.is_trivial(&r.word.substitute(words)?)?;
                out.push((r.text.clone(), ok));
            }
            let mut patterns: Vec<Pattern> = p
                .relators
                .iter()
                .filter_map(|r| match r.provenance {
                    crate::braid::Provenance::Potential { pattern } => Some(pattern),
                    _ => None,
                })
                .collect();
            patterns.dedup();
            Ok((v, out, patterns))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut coverage = [0usize; 4];
    let mut relators = 0;
    for (v, out, patterns) in results {
        for p in patterns {
            coverage[p.index()] += 1;
        }
        let failed: Vec<&String> = out.iter().filter(|(_, ok)| !ok).map(|(t, _)| t).collect();
        relators += out.len();
        if failed.is_empty() {
            rep.check(format!("vertex {}", v), true, None);
        } else {
            let payload = serde_json::json!({
                "vertex": v,
                "path": labels_1based(&labeling.path_to(v)),
                "quiver": g_ceg.vertex(v).quiver.describe(),
                "failed_relators": failed,
                "twist_words": labeling.words[v].as_ref().unwrap().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            });
            rep.fail_with(format!("vertex {}", v), payload);
        }
    }
    rep.stat("vertices", vertices.len());
    rep.stat("relators", relators);
    rep.stat("pattern_vertices", Pattern::ALL.iter().map(|p| (p.to_string(), coverage[p.index()])).collect::<BTreeMap<_, _>>());
    Ok(rep)
}

/// Pattern coverage recorded by [`verify_presentations`].
pub fn pattern_coverage(rep: &VerificationReport) -> [usize; 4] {
    let mut out = [0; 4];
    for (k, v) in &rep.stats {
        if k.ends_with("pattern_vertices") {
            for p in Pattern::ALL {
                out[p.index()] += v[p.to_string()].as_u64().unwrap_or(0) as usize;
            }
        }
    }
    out
}

/// Transports generator expressions along `seq` by the sharp maps, checking the
/// flat maps undo each step, then checks the endpoint presentation.
pub fn verify_theta_sequence(f: &Arc<Folding>, seq: &[usize], g: &Garside) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut seed = Seed::initial(f.clone(), None)?;
    let mut q = twist_quiver(&seed.quiver()?);
    let mut expr = identity_expression(q.num_vertices());
    for (step, &i) in seq.iter().enumerate() {
        let next = seed.weighted_mutate(i)?;
        let q2 = twist_quiver(&next.quiver()?);
        let moved = theta_sharp(&expr, i, &q, &q2)?;
        let back = theta_flat(&moved, i, &q, &q2)?;
        checks.push(Check {
            name: format!("step {} (mu_{}) round trip", step + 1, i + 1),
            passed: back == expr,
            detail: None,
        });
        expr = moved;
        renormalize(g, &mut expr)?;
        seed = next;
        q = q2;
    }
    let p = presentation_from_wqp(&q)?;
    for r in &p.relators {
        let ok = g.is_trivial(&r.word.substitute(&expr)?)?;
        checks.push(Check { name: format!("endpoint relator {}", r.text), passed: ok, detail: None });
    }
    Ok(checks)
}

/// Seeded random sequences of length `1..=max_len` (0 allowed when `max_len` is 0).
pub fn random_sequences(rng: &mut ChaCha8Rng, rank: usize, samples: usize, max_len: usize) -> Vec<Vec<usize>> {
    (0..samples)
        .map(|_| {
            let len = if max_len == 0 { 0 } else { rng.gen_range(1..=max_len) };
            (0..len).map(|_| rng.gen_range(0..rank)).collect()
        })
        .collect()
}

pub fn verify_theta_invariance(f: &Arc<Folding>, sequences: &[Vec<usize>], g: &Garside) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("theta");
    let results: Vec<Vec<Check>> =
        sequences.par_iter().map(|seq| verify_theta_sequence(f, seq, g)).collect::<Result<Vec<_>>>()?;
    for (seq, checks) in sequences.iter().zip(results) {
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
        let name = format!("sequence {:?}", labels_1based(seq));
        if failed.is_empty() {
            rep.check(name, true, None);
        } else {
            let payload = serde_json::json!({
                "folding": f.label(),
                "sequence": labels_1based(seq),
                "failed": failed.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
            });
            rep.fail_with(name, payload);
        }
    }
    rep.stat("sequences", sequences.len());
    Ok(rep)
}

/// Braid relations among the fiber products in `Br Lambda`, and injectivity
/// of the induced map `W(Delta) -> W(Lambda)`.
pub fn verify_iota(f: &Folding, g_lambda: &Garside, bound: usize) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("iota");
    let delta = f.target();
    let n = delta.rank();
    for i in 0..n {
        for j in i + 1..n {
            let m = delta.weight(i, j);
            let a = iota_f(f, &BraidWord::gen(i))?;
            let b = iota_f(f, &BraidWord::gen(j))?;
            let ok = g_lambda.equal(&alternating(&a, &b, m), &alternating(&b, &a, m))?;
            rep.check(format!("Br{}(iota b{}, iota b{})", m, i + 1, j + 1), ok, None);
        }
    }
    let ctx_d = CoxeterContext::new(delta)?;
    let ctx_l = g_lambda.context();
    let elements = ctx_d.enumerate_group(bound)?;
    let images: HashSet<_> = elements
        .iter()
        .map(|w| {
            let word: Vec<usize> = ctx_d.reduced_word(w).into_iter().flat_map(|s| f.fiber(s).to_vec()).collect();
            ctx_l.from_word(&word)
        })
        .collect();
    rep.check(
        format!("{} elements of W({}) have distinct images in W({})", elements.len(), f.target_type(), f.source_type()),
        images.len() == elements.len(),
        None,
    );
    rep.stat("group_order", elements.len());
    rep.stat("distinct_images", images.len());
    Ok(rep)
}

/// Unfolded quiver of a seed, as a weighted quiver with weight-3 arrows.
fn lambda_quiver(s: &Seed) -> WeightedQuiver {
    let n = s.rank();
    let mut q = WeightedQuiver::new(n);
    for k in 0..n {
        for l in 0..n {
            if s.b()[k][l] > 0 {
                q.add_arrow(k, l, 3).expect("simply laced seed");
            }
        }
    }
    q
}

/// Twist words of `Br Lambda` at the end of a path of weighted mutations,
/// each weighted step unfolded into the mutations of its fiber.
pub fn unfolded_twists(f: &Arc<Folding>, path: &[usize], g_lambda: &Garside) -> Result<(Seed, GeneratorExpression)> {
    let mut seed = Seed::initial(f.clone(), None)?;
    let mut expr = identity_expression(seed.rank());
    for &i in path {
        for &k in f.fiber(i) {
            let next = seed.mutate(k);
            let (q, q2) = (twist_quiver(&lambda_quiver(&seed)), twist_quiver(&lambda_quiver(&next)));
            expr = if seed.c_sign(k)? > 0 { theta_sharp(&expr, k, &q, &q2)? } else { theta_flat(&expr, k, &q2, &q)? };
            renormalize(g_lambda, &mut expr)?;
            seed = next;
        }
    }
    Ok((seed, expr))
}

/// `iota_f(t_i^Y) = prod_{k in f^{-1}(i)} t_k^Y` in `Br Lambda` at each vertex.
pub fn verify_diagram(
    g_ceg: &ExchangeGraph,
    labeling: &TwistLabeling,
    vertices: &[usize],
    g_lambda: &Garside,
) -> Result<VerificationReport> {
    let f = g_ceg.folding();
    let mut rep = VerificationReport::new("diagram");
    for &v in vertices {
        let words = labeling.words[v].as_ref().ok_or_else(|| Error::Parse(format!("vertex {} is not labelled", v)))?;
        let path = labeling.path_to(v);
        let (seed, lambda_words) = unfolded_twists(f, &path, g_lambda)?;
        let stored = &g_ceg.vertex(v).seed;
        // position in `seed` of each position of the stored representative
        let pos: Vec<usize> = (0..seed.rank())
            .map(|k| (0..seed.rank()).find(|&l| seed.c_vector(l) == stored.c_vector(k)))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::QuiverMismatch(format!("tree path does not reach vertex {}", v)))?;
        for i in 0..g_ceg.rank() {
            let lhs = iota_f(f, &words[i])?;
            let rhs = f.fiber(i).iter().fold(BraidWord::empty(), |acc, &k| acc.mul(&lambda_words[pos[k]]));
            let ok = g_lambda.equal(&lhs, &rhs)?;
            let name = format!("vertex {} label {}", v, i + 1);
            if ok {
                rep.check(name, true, None);
            } else {
                rep.fail_with(
                    name,
                    serde_json::json!({
                        "folding": f.label(),
                        "vertex": v,
                        "path": labels_1based(&path),
                        "label": i + 1,
                        "lhs": lhs.to_string(),
                        "rhs": rhs.to_string(),
                    }),
                );
            }
        }
    }
    Ok(rep)
}

/// In `<x, y | x^2 = y^m>` with `t1 = xy`, `t2 = yx`: the closed forms of the
/// alternating products and the braid relation.
pub fn verify_lem_surj(m: u32) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(format!("lem-surj m={}", m));
    let mi = m as i64;
    let t1 = [TorusLetter::X(1), TorusLetter::Y(1)];
    let t2 = [TorusLetter::Y(1), TorusLetter::X(1)];
    let alt = |a: &[TorusLetter], b: &[TorusLetter]| -> Vec<TorusLetter> {
        (0..m).flat_map(|k| if k % 2 == 0 { a.to_vec() } else { b.to_vec() }).collect()
    };
    let lhs1 = alt(&t1, &t2);
    let lhs2 = alt(&t2, &t1);
    let l = mi / 2;
    let power = mi * (l + 1);
    let (rhs1, rhs2) = if m.is_multiple_of(2) {
        let y = parse_torus_word(&format!("y^{}", power))?;
        (y.clone(), y)
    } else {
        (parse_torus_word(&format!("x y^{}", power))?, parse_torus_word(&format!("y^{} x", power))?)
    };
    rep.check("t1 t2 t1 ... closed form", torus_equal(&lhs1, &rhs1, mi), None);
    rep.check("t2 t1 t2 ... closed form", torus_equal(&lhs2, &rhs2, mi), None);
    rep.check("Br^m(t1, t2)", torus_equal(&lhs1, &lhs2, mi), None);
    let square = [TorusLetter::X(2)];
    rep.check("x^2 = y^m", torus_equal(&square, &[TorusLetter::Y(mi)], mi), None);
    Ok(rep)
}

fn random_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> BraidWord {
    let len = rng.gen_range(0..=max_len);
    BraidWord::new((0..len).map(|_| (rng.gen_range(0..rank), if rng.gen_bool(0.5) { 1 } else { -1 })))
}

/// Self-tests of the normal form on random words: inserting a defining
/// relator or a cancelling pair never changes it, appending one generator
/// always does, `Delta^2` is central, and the word of a normal form has
/// the same normal form.
pub fn verify_garside_engine(g: &Garside, cases: usize, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let ctx = g.context();
    let n = ctx.rank();
    let mut rep = VerificationReport::new(format!("garside {}", ctx.type_name()));
    let delta2 = g.delta_word().pow(2);
    let mut failures: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for _ in 0..cases {
        let w = random_word(rng, n, 24);
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let inserted = if a == b {
            BraidWord::new([(a, 1), (a, -1)])
        } else {
            let m = ctx.graph().weight(a, b);
            let (x, y) = (BraidWord::gen(a), BraidWord::gen(b));
            alternating(&x, &y, m).mul(&alternating(&y, &x, m).inverse())
        };
        let cut = rng.gen_range(0..=w.len());
        let (head, tail) = w.letters().split_at(cut);
        let w2 = BraidWord::new(head.iter().copied()).mul(&inserted).mul(&BraidWord::new(tail.iter().copied()));
        if !g.equal(&w, &w2)? {
            failures.entry("relator insertion").or_default().push(format!("{} vs {}", w, w2));
        }
        let s = rng.gen_range(0..n);
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        let ws = w.mul(&BraidWord::new([(s, e)]));
        if g.equal(&w, &ws)? {
            failures.entry("single-generator separation").or_default().push(format!("{} vs {}", w, ws));
        }
        if !g.equal(&delta2.mul(&w), &w.mul(&delta2))? {
            failures.entry("Delta^2 central").or_default().push(w.to_string());
        }
        let nf = g.normal_form(&w)?;
        if g.normal_form(&g.to_word(&nf))? != nf {
            failures.entry("normal form round trip").or_default().push(w.to_string());
        }
    }
    for name in ["relator insertion", "single-generator separation", "Delta^2 central", "normal form round trip"] {
        match failures.get(name) {
            None => rep.check(name, true, None),
            Some(f) => rep.fail_with(name, serde_json::json!({ "type": ctx.type_name(), "failures": f.len(), "first": f[0] })),
        }
    }
    rep.stat("cases", cases);
    Ok(rep)
}
