//! Cluster exchange graphs of weighted types, their polygons, the homology of
//! the polygon complex, and graph isomorphism.
//!
//! Vertices are identified by the multiset of c-vectors of the unfolded seed.
//! A mutation edge records the permutation `rho` that carries the `Delta`-labels
//! of the mutated seed to those of the stored representative.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{smith_normal_form, IntMatrix};
use crate::error::{Error, Result};
use crate::folding::{Folding, WeightedQuiver};
use crate::quiver::Seed;

pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Clone, Debug)]
pub struct Vertex {
    pub seed: Seed,
    pub quiver: WeightedQuiver,
}

/// The mutation of vertex `src` at label `label` (a `Delta`-vertex at `src`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: usize,
    /// `rho[j]` is the label at `dst` of the direction labelled `j` after mutating.
    pub rho: Vec<usize>,
    /// Forward (green) iff the c-vectors of the mutated fiber are positive.
    pub green: bool,
}

#[derive(Clone, Debug)]
pub struct ExchangeGraph {
    folding: Arc<Folding>,
    vertices: Vec<Vertex>,
    /// `edges[v][j]` is the mutation of `v` at label `j`.
    edges: Vec<Vec<Edge>>,
}

fn seed_key(s: &Seed) -> Vec<Vec<i64>> {
    let mut cols: Vec<Vec<i64>> = (0..s.rank()).map(|k| s.c_vector(k)).collect();
    cols.sort();
    cols
}

/// Position permutation `pi` with `a.c_vector(k) == b.c_vector(pi[k])`.
fn match_positions(a: &Seed, b: &Seed) -> Vec<usize> {
    let index: HashMap<Vec<i64>, usize> = (0..b.rank()).map(|k| (b.c_vector(k), k)).collect();
    (0..a.rank()).map(|k| index[&a.c_vector(k)]).collect()
}

/// Breadth-first construction of the exchange graph from the initial seed.
pub fn build_ceg(initial: Seed, budget: usize) -> Result<ExchangeGraph> {
    initial.check_sign_coherence()?;
    let folding = initial.folding().clone();
    let nd = folding.target().rank();
    let mut vertices = vec![Vertex { quiver: initial.quiver()?, seed: initial.clone() }];
    let mut index: HashMap<Vec<Vec<i64>>, usize> = HashMap::new();
    index.insert(seed_key(&initial), 0);
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    let mut head = 0;
    while head < vertices.len() {
        let v = head;
        head += 1;
        let mut out = Vec::with_capacity(nd);
        for label in 0..nd {
            let src_seed = &vertices[v].seed;
            let green = src_seed.fiber_sign(label)? > 0;
            let next = src_seed.weighted_mutate(label)?;
            next.check_sign_coherence()?;
            let key = seed_key(&next);
            let dst = match index.get(&key) {
                Some(&d) => d,
                None => {
                    if vertices.len() >= budget {
                        return Err(Error::BudgetExceeded(budget));
                    }
                    let d = vertices.len();
                    index.insert(key, d);
                    vertices.push(Vertex { quiver: next.quiver()?, seed: next.clone() });
                    d
                }
            };
            let rep = &vertices[dst].seed;
            let pi = match_positions(&next, rep);
            let n = next.rank();
            for k in 0..n {
                for l in 0..n {
                    if next.b()[k][l] != rep.b()[pi[k]][pi[l]] {
                        return Err(Error::QuiverMismatch(format!("equal c-vectors but different exchange matrices at vertex {}", dst)));
                    }
                }
            }
            let mut rho = vec![usize::MAX; nd];
            for k in 0..n {
                let (from, to) = (folding.image(k), folding.image(pi[k]));
                if rho[from] == usize::MAX {
                    rho[from] = to;
                } else if rho[from] != to {
                    return Err(Error::QuiverMismatch(format!("identification at vertex {} splits a fiber", dst)));
                }
            }
            out.push(Edge { src: v, dst, label, rho, green });
        }
        edges.push(out);
    }
    let g = ExchangeGraph { folding, vertices, edges };
    g.check_edges()?;
    Ok(g)
}

impl ExchangeGraph {
    pub fn folding(&self) -> &Arc<Folding> {
        &self.folding
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Number of unoriented edges.
    pub fn num_edges(&self) -> usize {
        self.unoriented_edges().len()
    }

    pub fn rank(&self) -> usize {
        self.folding.target().rank()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge(&self, v: usize, label: usize) -> &Edge {
        &self.edges[v][label]
    }

    pub fn edges_from(&self, v: usize) -> &[Edge] {
        &self.edges[v]
    }

    fn check_edges(&self) -> Result<()> {
        for out in &self.edges {
            for e in out {
                if e.dst == e.src {
                    return Err(Error::QuiverMismatch(format!("loop at vertex {}", e.src)));
                }
                let back = &self.edges[e.dst][e.rho[e.label]];
                if back.dst != e.src || back.green == e.green {
                    return Err(Error::QuiverMismatch(format!("edge {}-{} is not a consistent 2-cycle", e.src, e.dst)));
                }
                let composed: Vec<usize> = (0..self.rank()).map(|j| back.rho[e.rho[j]]).collect();
                if composed.iter().enumerate().any(|(j, &k)| j != k) {
                    return Err(Error::QuiverMismatch(format!("relabelling along {}-{} does not invert", e.src, e.dst)));
                }
            }
        }
        Ok(())
    }

    /// Unoriented edges `(a, b)` with `a < b`, sorted.
    pub fn unoriented_edges(&self) -> Vec<(usize, usize)> {
        let mut set: Vec<(usize, usize)> = self
            .edges
            .iter()
            .flatten()
            .map(|e| (e.src.min(e.dst), e.src.max(e.dst)))
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    }

    /// Green edges `(src, dst, label at src)`.
    pub fn oriented_edges(&self) -> Vec<(usize, usize, usize)> {
        self.edges.iter().flatten().filter(|e| e.green).map(|e| (e.src, e.dst, e.label)).collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for (a, b) in self.unoriented_edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    fn is_green(&self, a: usize, b: usize) -> bool {
        self.edges[a].iter().any(|e| e.dst == b && e.green)
    }

    /// BFS distances from the initial vertex.
    pub fn distances(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut dist = vec![usize::MAX; self.num_vertices()];
        dist[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn to_dot(&self, oriented: bool) -> String {
        let mut s = String::new();
        let (kind, arrow) = if oriented { ("digraph", "->") } else { ("graph", "--") };
        writeln!(s, "{} ceg {{", kind).unwrap();
        for (v, vert) in self.vertices.iter().enumerate() {
            writeln!(s, "  {} [tooltip=\"{}\"];", v, vert.quiver.describe()).unwrap();
        }
        if oriented {
            for (a, b, l) in self.oriented_edges() {
                writeln!(s, "  {} {} {} [label=\"{}\"];", a, arrow, b, l + 1).unwrap();
            }
        } else {
            for (a, b) in self.unoriented_edges() {
                let l = self.edges[a].iter().find(|e| e.dst == b).unwrap().label;
                writeln!(s, "  {} {} {} [label=\"{}\"];", a, arrow, b, l + 1).unwrap();
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self, polygons: &[Polygon]) -> serde_json::Value {
        #[derive(Serialize)]
        struct V<'a> {
            id: usize,
            quiver: &'a WeightedQuiver,
            weights: Vec<Vec<u32>>,
        }
        #[derive(Serialize)]
        struct E {
            src: usize,
            dst: usize,
            label: usize,
        }
        #[derive(Serialize)]
        struct P<'a> {
            vertices: &'a [usize],
            m: u32,
        }
        let n = self.rank();
        let vertices: Vec<V> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| V {
                id,
                quiver: &v.quiver,
                weights: (0..n).map(|i| (0..n).map(|j| if i == j { 2 } else { v.quiver.weight(i, j) }).collect()).collect(),
            })
            .collect();
        let edges: Vec<E> =
            self.edges.iter().flatten().map(|e| E { src: e.src, dst: e.dst, label: e.label + 1 }).collect();
        let polygons: Vec<P> = polygons.iter().map(|p| P { vertices: &p.vertices, m: p.m }).collect();
        serde_json::json!({ "vertices": vertices, "edges": edges, "polygons": polygons })
    }
}

/// A face of the exchange graph: the alternating-mutation cycle of a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Polygon {
    /// Vertex cycle in walking order, starting at the discovering vertex.
    pub vertices: Vec<usize>,
    /// The pair of labels at `vertices[0]`.
    pub labels: (usize, usize),
    pub m: u32,
    pub source: usize,
    pub sink: usize,
}

/// Walks `i, j, i, j, ...` from `start` until it returns.
fn walk_polygon(g: &ExchangeGraph, start: usize, i: usize, j: usize, m: u32) -> Result<Vec<usize>> {
    let len = m as usize + 2;
    let mut cycle = vec![start];
    let (mut v, mut a, mut b) = (start, i, j);
    for step in 0..len {
        let e = g.edge(v, a);
        let (na, nb) = (e.rho[b], e.rho[a]);
        v = e.dst;
        a = na;
        b = nb;
        if v == start {
            if step + 1 != len {
                return Err(Error::PolygonClosure(format!(
                    "pair ({},{}) at vertex {} closed after {} steps, expected {}",
                    i + 1, j + 1, start, step + 1, len
                )));
            }
            return Ok(cycle);
        }
        cycle.push(v);
    }
    Err(Error::PolygonClosure(format!("pair ({},{}) at vertex {} did not close in {} steps", i + 1, j + 1, start, len)))
}

/// One source and one sink, joined by oriented paths of lengths 2 and `m`.
fn source_sink(g: &ExchangeGraph, cycle: &[usize], m: u32) -> Result<(usize, usize)> {
    let l = cycle.len();
    let fwd: Vec<bool> = (0..l).map(|k| g.is_green(cycle[k], cycle[(k + 1) % l])).collect();
    let sources: Vec<usize> = (0..l).filter(|&k| fwd[k] && !fwd[(k + l - 1) % l]).collect();
    let sinks: Vec<usize> = (0..l).filter(|&k| !fwd[k] && fwd[(k + l - 1) % l]).collect();
    if sources.len() != 1 || sinks.len() != 1 {
        return Err(Error::PolygonClosure(format!("polygon {:?} has {} sources and {} sinks", cycle, sources.len(), sinks.len())));
    }
    let (s, t) = (sources[0], sinks[0]);
    let d1 = (t + l - s) % l;
    let mut lens = [d1, l - d1];
    lens.sort_unstable();
    if lens != [2, m as usize] && !(m == 2 && lens == [2, 2]) {
        return Err(Error::PolygonClosure(format!("polygon {:?} has source-sink paths of lengths {:?}", cycle, lens)));
    }
    Ok((cycle[s], cycle[t]))
}

/// All polygons, deduplicated by vertex set; each is checked to close after
/// `m + 2` steps with distinct vertices and to satisfy the source/sink rule.
pub fn enumerate_polygons(g: &ExchangeGraph) -> Result<Vec<Polygon>> {
    let n = g.rank();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for v in 0..g.num_vertices() {
        let q = &g.vertex(v).quiver;
        for i in 0..n {
            for j in i + 1..n {
                let m = q.weight(i, j);
                let cycle = walk_polygon(g, v, i, j, m)?;
                let mut key = cycle.clone();
                key.sort_unstable();
                if key.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::PolygonClosure(format!("repeated vertex in {:?}", cycle)));
                }
                if !seen.insert(key) {
                    continue;
                }
                let (source, sink) = source_sink(g, &cycle, m)?;
                out.push(Polygon { vertices: cycle, labels: (i, j), m, source, sink });
            }
        }
    }
    Ok(out)
}

/// Number of polygons with each `m`.
pub fn face_counts(polygons: &[Polygon]) -> BTreeMap<u32, usize> {
    let mut counts = BTreeMap::new();
    for p in polygons {
        *counts.entry(p.m).or_insert(0) += 1;
    }
    counts
}

/// Invariant factors of `H_1` of the 2-complex: torsion orders `> 1` followed
/// by one `0` per free summand. Empty means trivial.
pub fn h1_polygon_complex(num_vertices: usize, edges: &[(usize, usize)], polygons: &[Vec<usize>]) -> Vec<i128> {
    let index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(k, &(a, b))| ((a.min(b), a.max(b)), k)).collect();
    let mut d2 = IntMatrix::zeros(edges.len(), polygons.len());
    for (p, cycle) in polygons.iter().enumerate() {
        let l = cycle.len();
        for k in 0..l {
            let (a, b) = (cycle[k], cycle[(k + 1) % l]);
            let e = index[&(a.min(b), a.max(b))];
            d2[(e, p)] += if a < b { 1 } else { -1 };
        }
    }
    let snf = smith_normal_form(&d2);
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|&&d| d != 0).count();
    let components = {
        let mut parent: Vec<usize> = (0..num_vertices).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut c = num_vertices;
        for &(a, b) in edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                c -= 1;
            }
        }
        c
    };
    let cycle_rank = edges.len() + components - num_vertices;
    let mut out: Vec<i128> = diag.into_iter().filter(|&d| d > 1).collect();
    out.extend(std::iter::repeat_n(0, cycle_rank - rank));
    out
}

/// `H_1` of the polygon complex of an exchange graph.
pub fn h1_of(g: &ExchangeGraph, polygons: &[Polygon]) -> Vec<i128> {
    let cycles: Vec<Vec<usize>> = polygons.iter().map(|p| p.vertices.clone()).collect();
    h1_polygon_complex(g.num_vertices(), &g.unoriented_edges(), &cycles)
}

/// Isomorphism of the underlying unoriented graphs.
pub fn isomorphic(g1: &ExchangeGraph, g2: &ExchangeGraph) -> bool {
    graphs_isomorphic(&g1.adjacency(), &g2.adjacency())
}

/// Isomorphism of simple graphs given by adjacency lists, by colour
/// refinement with individualisation and backtracking.
pub fn graphs_isomorphic(a1: &[Vec<usize>], a2: &[Vec<usize>]) -> bool {
    if a1.len() != a2.len() {
        return false;
    }
    let e1: usize = a1.iter().map(Vec::len).sum();
    let e2: usize = a2.iter().map(Vec::len).sum();
    if e1 != e2 {
        return false;
    }
    let n = a1.len();
    search(a1, a2, vec![0; n], vec![0; n])
}

/// Jointly refines two colourings to the coarsest equitable ones; returns
/// `None` as soon as the colour histograms differ.
fn refine(a1: &[Vec<usize>], a2: &[Vec<usize>], mut c1: Vec<u32>, mut c2: Vec<u32>) -> Option<(Vec<u32>, Vec<u32>)> {
    loop {
        let before = c1.iter().collect::<HashSet<_>>().len();
        let sig = |adj: &[Vec<usize>], c: &[u32], v: usize| {
            let mut nb: Vec<u32> = adj[v].iter().map(|&u| c[u]).collect();
            nb.sort_unstable();
            (c[v], nb)
        };
        let s1: Vec<(u32, Vec<u32>)> = (0..a1.len()).map(|v| sig(a1, &c1, v)).collect();
        let s2: Vec<(u32, Vec<u32>)> = (0..a2.len()).map(|v| sig(a2, &c2, v)).collect();
        let mut all: Vec<&(u32, Vec<u32>)> = s1.iter().chain(&s2).collect();
        all.sort();
        all.dedup();
        let id: HashMap<&(u32, Vec<u32>), u32> = all.into_iter().zip(0..).collect();
        c1 = s1.iter().map(|s| id[s]).collect();
        c2 = s2.iter().map(|s| id[s]).collect();
        let mut h1 = c1.clone();
        let mut h2 = c2.clone();
        h1.sort_unstable();
        h2.sort_unstable();
        if h1 != h2 {
            return None;
        }
        if c1.iter().collect::<HashSet<_>>().len() == before {
            return Some((c1, c2));
        }
    }
}

fn search(a1: &[Vec<usize>], a2: &[Vec<usize>], c1: Vec<u32>, c2: Vec<u32>) -> bool {
    let Some((c1, c2)) = refine(a1, a2, c1, c2) else {
        return false;
    };
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (v, &c) in c1.iter().enumerate() {
        classes.entry(c).or_default().push(v);
    }
    let Some((&colour, members)) = classes.iter().filter(|(_, m)| m.len() > 1).min_by_key(|(_, m)| m.len()) else {
        // discrete colouring: the colour bijection must be an isomorphism
        let pos2: HashMap<u32, usize> = c2.iter().enumerate().map(|(v, &c)| (c, v)).collect();
        let phi: Vec<usize> = c1.iter().map(|c| pos2[c]).collect();
        return (0..a1.len()).all(|v| {
            let mut img: Vec<usize> = a1[v].iter().map(|&u| phi[u]).collect();
            let mut nb = a2[phi[v]].clone();
            img.sort_unstable();
            nb.sort_unstable();
            img == nb
        });
    };
    let v = members[0];
    let fresh = c1.iter().chain(&c2).max().unwrap() + 1;
    (0..a2.len()).filter(|&u| c2[u] == colour).any(|u| {
        let mut d1 = c1.clone();
        let mut d2 = c2.clone();
        d1[v] = fresh;
        d2[u] = fresh;
        search(a1, a2, d1, d2)
    })
}
