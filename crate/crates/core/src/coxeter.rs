//! Finite Coxeter graphs, their classification and the geometric reflection
//! representation.
//!
//! Group elements are stored as permutations of the (finite) root system.
//! This is a faithful representation of `W`, so the reflection matrices are
//! only needed to build the root system once; lengths and descents are then
//! table lookups, which keeps `E_8`-sized contexts cheap.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num::integer::lcm;
use serde::{Deserialize, Serialize};

use crate::algebra::{CycloReal, CycloRing};
use crate::error::{Error, Result};

/// A Coxeter graph on vertices `0..n`. Absent edges have weight 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), u32>,
}

impl CoxeterGraph {
    pub fn new(n: usize) -> Self {
        CoxeterGraph { n, edges: BTreeMap::new() }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(a, b, m) in edges {
            g.add_edge(a, b, m)?;
        }
        Ok(g)
    }

    /// Adds an edge of weight `m`; weight 2 is accepted and means "no edge".
    pub fn add_edge(&mut self, a: usize, b: usize, m: u32) -> Result<()> {
        if a >= self.n || b >= self.n {
            return Err(Error::InvalidGraph(format!("vertex out of range in edge {}-{}", a, b)));
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("loop at vertex {}", a)));
        }
        if m < 2 {
            return Err(Error::InvalidGraph(format!("weight {} < 2", m)));
        }
        let key = (a.min(b), a.max(b));
        if self.edges.contains_key(&key) {
            return Err(Error::InvalidGraph(format!("duplicate edge {}-{}", a + 1, b + 1)));
        }
        if m > 2 {
            self.edges.insert(key, m);
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn weight(&self, a: usize, b: usize) -> u32 {
        if a == b {
            return 1;
        }
        *self.edges.get(&(a.min(b), a.max(b))).unwrap_or(&2)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().map(|(&(a, b), &m)| (a, b, m))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| u != v && self.weight(u, v) > 2).collect()
    }

    /// Symmetric Coxeter matrix with the diagonal convention `m_ii = 2`.
    pub fn coxeter_matrix(&self) -> Vec<Vec<u32>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if i == j { 2 } else { self.weight(i, j) }).collect())
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn is_simply_laced(&self) -> bool {
        self.edges.values().all(|&m| m == 3)
    }

    /// Induced subgraph on `verts`, relabelled `0..verts.len()` in the given order.
    pub fn induced(&self, verts: &[usize]) -> CoxeterGraph {
        let mut g = CoxeterGraph::new(verts.len());
        for (i, &a) in verts.iter().enumerate() {
            for (j, &b) in verts.iter().enumerate().skip(i + 1) {
                let m = self.weight(a, b);
                if m > 2 {
                    g.edges.insert((i, j), m);
                }
            }
        }
        g
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut verts = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v) {
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        verts.push(u);
                        stack.push(u);
                    }
                }
            }
            verts.sort_unstable();
            out.push(verts);
        }
        out
    }

    /// Parses `"1-2:5,2-3"` (1-based vertices, default weight 3). The rank is
    /// the largest vertex mentioned unless `n` is given.
    pub fn parse_edge_list(list: &str, n: Option<usize>) -> Result<Self> {
        let mut parsed = Vec::new();
        let mut max_v = 0;
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (pair, w) = match item.split_once(':') {
                Some((p, w)) => (p, w.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{}: {}", item, e)))?),
                None => (item, 3),
            };
            let (a, b) = pair.split_once('-').ok_or_else(|| Error::Parse(format!("expected a-b in {:?}", item)))?;
            let a: usize = a.trim().parse().map_err(|e| Error::Parse(format!("{}: {}", item, e)))?;
            let b: usize = b.trim().parse().map_err(|e| Error::Parse(format!("{}: {}", item, e)))?;
            if a == 0 || b == 0 {
                return Err(Error::Parse("vertices are 1-based".into()));
            }
            max_v = max_v.max(a).max(b);
            parsed.push((a - 1, b - 1, w));
        }
        let n = n.unwrap_or(max_v);
        Self::from_edges(n, &parsed)
    }
}

/// Entries of the list of finite Coxeter graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoxeterType {
    A(usize),
    B(usize),
    D(usize),
    E(usize),
    F4,
    G2,
    H(usize),
    I2(u32),
}

impl CoxeterType {
    /// Canonical spelling of the dihedral family: `I2(3) = A2`, `I2(4) = B2`,
    /// `I2(5) = H2`, `I2(6) = G2`.
    pub fn dihedral(m: u32) -> CoxeterType {
        match m {
            2 => panic!("I2(2) is reducible"),
            3 => CoxeterType::A(2),
            4 => CoxeterType::B(2),
            5 => CoxeterType::H(2),
            6 => CoxeterType::G2,
            m => CoxeterType::I2(m),
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            CoxeterType::A(n) | CoxeterType::B(n) | CoxeterType::D(n) | CoxeterType::E(n) | CoxeterType::H(n) => n,
            CoxeterType::F4 => 4,
            CoxeterType::G2 | CoxeterType::I2(_) => 2,
        }
    }

    /// Weight of the unique edge for rank-2 types.
    pub fn dihedral_weight(&self) -> Option<u32> {
        match *self {
            CoxeterType::A(2) => Some(3),
            CoxeterType::B(2) => Some(4),
            CoxeterType::H(2) => Some(5),
            CoxeterType::G2 => Some(6),
            CoxeterType::I2(m) => Some(m),
            _ => None,
        }
    }

    pub fn coxeter_number(&self) -> u32 {
        match *self {
            CoxeterType::A(n) => n as u32 + 1,
            CoxeterType::B(n) => 2 * n as u32,
            CoxeterType::D(n) => 2 * n as u32 - 2,
            CoxeterType::E(6) => 12,
            CoxeterType::E(7) => 18,
            CoxeterType::E(_) => 30,
            CoxeterType::F4 => 12,
            CoxeterType::G2 => 6,
            CoxeterType::H(2) => 5,
            CoxeterType::H(3) => 10,
            CoxeterType::H(_) => 30,
            CoxeterType::I2(m) => m,
        }
    }

    pub fn group_order(&self) -> u128 {
        let fact = |n: usize| (1..=n as u128).product::<u128>();
        match *self {
            CoxeterType::A(n) => fact(n + 1),
            CoxeterType::B(n) => (1u128 << n) * fact(n),
            CoxeterType::D(n) => (1u128 << (n - 1)) * fact(n),
            CoxeterType::E(6) => 51_840,
            CoxeterType::E(7) => 2_903_040,
            CoxeterType::E(_) => 696_729_600,
            CoxeterType::F4 => 1152,
            CoxeterType::G2 => 12,
            CoxeterType::H(2) => 10,
            CoxeterType::H(3) => 120,
            CoxeterType::H(_) => 14_400,
            CoxeterType::I2(m) => 2 * m as u128,
        }
    }

    pub fn is_simply_laced(&self) -> bool {
        matches!(self, CoxeterType::A(_) | CoxeterType::D(_) | CoxeterType::E(_))
    }

    /// The graph in the standard numbering (0-based).
    pub fn standard_graph(&self) -> CoxeterGraph {
        let path = |n: usize| -> Vec<(usize, usize, u32)> { (1..n).map(|i| (i - 1, i, 3)).collect() };
        let edges: Vec<(usize, usize, u32)> = match *self {
            CoxeterType::A(n) => path(n),
            CoxeterType::B(n) => {
                let mut e = path(n);
                e.last_mut().unwrap().2 = 4;
                e
            }
            CoxeterType::D(n) => {
                let mut e = vec![(0, 2, 3), (1, 2, 3)];
                e.extend((3..n).map(|i| (i - 1, i, 3)));
                e
            }
            CoxeterType::E(n) => {
                let mut e = vec![(0, 1, 3), (1, 2, 3), (2, 3, 3), (2, 4, 3)];
                e.extend((5..n).map(|i| (i - 1, i, 3)));
                e
            }
            CoxeterType::F4 => vec![(0, 1, 3), (1, 2, 4), (2, 3, 3)],
            CoxeterType::G2 => vec![(0, 1, 6)],
            CoxeterType::H(n) => {
                let mut e = path(n);
                e[0].2 = 5;
                e
            }
            CoxeterType::I2(m) => vec![(0, 1, m)],
        };
        CoxeterGraph::from_edges(self.rank(), &edges).expect("standard graph")
    }

    fn validate(self) -> Result<Self> {
        let ok = match self {
            CoxeterType::A(n) => n >= 1,
            CoxeterType::B(n) => n >= 2,
            CoxeterType::D(n) => n >= 4,
            CoxeterType::E(n) => (6..=8).contains(&n),
            CoxeterType::H(n) => (2..=4).contains(&n),
            CoxeterType::I2(m) => m >= 7,
            _ => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::UnknownType(self.to_string()))
        }
    }
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoxeterType::A(n) => write!(f, "A{}", n),
            CoxeterType::B(n) => write!(f, "B{}", n),
            CoxeterType::D(n) => write!(f, "D{}", n),
            CoxeterType::E(n) => write!(f, "E{}", n),
            CoxeterType::F4 => write!(f, "F4"),
            CoxeterType::G2 => write!(f, "G2"),
            CoxeterType::H(n) => write!(f, "H{}", n),
            CoxeterType::I2(m) => write!(f, "I2:{}", m),
        }
    }
}

impl FromStr for CoxeterType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::UnknownType(s.to_string());
        if let Some(m) = s.strip_prefix("I2:").or_else(|| s.strip_prefix("I2(").and_then(|r| r.strip_suffix(')'))) {
            let m: u32 = m.parse().map_err(|_| bad())?;
            if m < 3 {
                return Err(bad());
            }
            return Ok(CoxeterType::dihedral(m));
        }
        let (head, tail) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let n: usize = tail.parse().map_err(|_| bad())?;
        let t = match head {
            "A" => CoxeterType::A(n),
            "B" | "C" => CoxeterType::B(n),
            "D" => CoxeterType::D(n),
            "E" => CoxeterType::E(n),
            "F" if n == 4 => CoxeterType::F4,
            "G" if n == 2 => CoxeterType::G2,
            "H" => CoxeterType::H(n),
            _ => return Err(bad()),
        };
        t.validate().map_err(|_| bad())
    }
}

/// Identifies a connected Coxeter graph with an entry of the finite list, or
/// returns `None` when the graph is not of finite type.
pub fn classify_finite(g: &CoxeterGraph) -> Result<Option<CoxeterType>> {
    if g.rank() == 0 {
        return Err(Error::InvalidGraph("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.rank();
    if n == 1 {
        return Ok(Some(CoxeterType::A(1)));
    }
    let edges: Vec<(usize, usize, u32)> = g.edges().collect();
    if edges.len() != n - 1 {
        return Ok(None); // contains a cycle
    }
    if n == 2 {
        return Ok(Some(CoxeterType::dihedral(edges[0].2)));
    }
    let degree: Vec<usize> = (0..n).map(|v| g.neighbors(v).len()).collect();
    let heavy: Vec<&(usize, usize, u32)> = edges.iter().filter(|e| e.2 > 3).collect();
    if !heavy.is_empty() {
        if heavy.len() > 1 || degree.iter().any(|&d| d > 2) {
            return Ok(None);
        }
        let &(a, b, m) = heavy[0];
        let at_end = degree[a] == 1 || degree[b] == 1;
        return Ok(match (m, at_end, n) {
            (4, true, _) => Some(CoxeterType::B(n)),
            (4, false, 4) => Some(CoxeterType::F4),
            (5, true, 3) => Some(CoxeterType::H(3)),
            (5, true, 4) => Some(CoxeterType::H(4)),
            _ => None,
        });
    }
    let branch: Vec<usize> = (0..n).filter(|&v| degree[v] >= 3).collect();
    if branch.is_empty() {
        return Ok(Some(CoxeterType::A(n)));
    }
    if branch.len() > 1 || degree[branch[0]] > 3 {
        return Ok(None);
    }
    let centre = branch[0];
    let mut arms: Vec<usize> = g
        .neighbors(centre)
        .into_iter()
        .map(|start| {
            let (mut prev, mut cur, mut len) = (centre, start, 1);
            loop {
                let next: Vec<usize> = g.neighbors(cur).into_iter().filter(|&u| u != prev).collect();
                match next.as_slice() {
                    [] => break len,
                    [u] => {
                        prev = cur;
                        cur = *u;
                        len += 1;
                    }
                    _ => unreachable!("single branch point"),
                }
            }
        })
        .collect();
    arms.sort_unstable();
    Ok(match arms.as_slice() {
        [1, 1, _] => Some(CoxeterType::D(n)),
        [1, 2, 2] => Some(CoxeterType::E(6)),
        [1, 2, 3] => Some(CoxeterType::E(7)),
        [1, 2, 4] => Some(CoxeterType::E(8)),
        _ => None,
    })
}

static CONTEXT_IDS: AtomicU64 = AtomicU64::new(1);

/// Element of a finite Coxeter group, stored as a permutation of the roots.
#[derive(Clone, Debug)]
pub struct GroupElement {
    ctx: u64,
    perm: Vec<u16>,
    inv: Vec<u16>,
    length: usize,
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.perm == other.perm
    }
}
impl Eq for GroupElement {}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.perm.hash(state);
    }
}

impl GroupElement {
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }
}

/// A finite Coxeter graph with its reflection representation and root system.
#[derive(Debug)]
pub struct CoxeterContext {
    id: u64,
    graph: CoxeterGraph,
    type_name: CoxeterType,
    ring: CycloRing,
    /// `cos_matrix[i][j] = 2cos(pi/m_ij)` for `i != j`.
    cos_matrix: Vec<Vec<CycloReal>>,
    /// Positive roots `0..N` (simple roots first), then `N + r = -root r`.
    roots: Vec<Vec<CycloReal>>,
    n_pos: usize,
    gen_perm: Vec<Vec<u16>>,
    w0: GroupElement,
    w0_word: Vec<usize>,
    tau: Vec<usize>,
}

pub type Matrix = Vec<Vec<CycloReal>>;

impl CoxeterContext {
    /// Builds the reflection representation of a connected finite graph.
    pub fn new(graph: &CoxeterGraph) -> Result<Arc<Self>> {
        let type_name = classify_finite(graph)?.ok_or(Error::NotFinite)?;
        let n = graph.rank();
        let level = graph.edges().fold(1u32, |acc, (_, _, m)| lcm(acc, m));
        let ring = CycloRing::new(level);
        let cos_matrix: Vec<Vec<CycloReal>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match graph.weight(i, j) {
                        _ if i == j => ring.from_int(2),
                        2 => ring.zero(),
                        m => ring.two_cos_pi_over(m).expect("weight divides level"),
                    })
                    .collect()
            })
            .collect();

        let reflect = |i: usize, v: &[CycloReal]| -> Vec<CycloReal> {
            let mut out = v.to_vec();
            let mut acc = v[i].neg();
            for j in 0..n {
                if j != i && !cos_matrix[i][j].is_zero() && !v[j].is_zero() {
                    acc = acc.add_unchecked(&cos_matrix[i][j].mul_unchecked(&v[j]));
                }
            }
            out[i] = acc;
            out
        };
        let is_positive = |v: &[CycloReal]| -> bool {
            let s = v.iter().map(|c| c.sign()).find(|&s| s != 0).expect("nonzero root");
            s > 0
        };

        let mut positive: Vec<Vec<CycloReal>> = (0..n)
            .map(|i| {
                let mut e = vec![ring.zero(); n];
                e[i] = ring.one();
                e
            })
            .collect();
        let mut index: HashMap<Vec<CycloReal>, usize> = positive.iter().cloned().zip(0..).collect();
        let mut queue: VecDeque<usize> = (0..n).collect();
        while let Some(r) = queue.pop_front() {
            for i in 0..n {
                if r == i {
                    continue;
                }
                let img = reflect(i, &positive[r]);
                if index.contains_key(&img) {
                    continue;
                }
                if !is_positive(&img) {
                    return Err(Error::NotFinite);
                }
                index.insert(img.clone(), positive.len());
                positive.push(img);
                queue.push_back(positive.len() - 1);
                if positive.len() > 1_000 {
                    return Err(Error::NotFinite);
                }
            }
        }
        let n_pos = positive.len();
        let mut roots = positive.clone();
        for r in &positive {
            let neg: Vec<CycloReal> = r.iter().map(|c| c.neg()).collect();
            index.insert(neg.clone(), roots.len());
            roots.push(neg);
        }
        let gen_perm: Vec<Vec<u16>> = (0..n)
            .map(|i| roots.iter().map(|r| index[&reflect(i, r)] as u16).collect())
            .collect();

        let id = CONTEXT_IDS.fetch_add(1, Ordering::Relaxed);
        let mut ctx = CoxeterContext {
            id,
            graph: graph.clone(),
            type_name,
            ring,
            cos_matrix,
            roots,
            n_pos,
            gen_perm,
            w0: GroupElement { ctx: id, perm: vec![], inv: vec![], length: 0 },
            w0_word: vec![],
            tau: vec![],
        };
        // longest element by greedy extension on the right
        let mut w = ctx.identity();
        let mut word = Vec::new();
        while let Some(s) = (0..n).find(|&s| !ctx.is_right_descent(&w, s)) {
            ctx.mul_gen_right_in_place(&mut w, s);
            word.push(s);
        }
        debug_assert_eq!(w.length, n_pos);
        let tau = (0..n)
            .map(|i| {
                let conj = ctx.mul(&ctx.mul(&w, &ctx.generator(i)), &w);
                (0..n).find(|&j| conj == ctx.generator(j)).expect("w0 normalises the generators")
            })
            .collect();
        ctx.w0 = w;
        ctx.w0_word = word;
        ctx.tau = tau;
        Ok(Arc::new(ctx))
    }

    pub fn from_type(t: CoxeterType) -> Result<Arc<Self>> {
        Self::new(&t.standard_graph())
    }

    pub fn graph(&self) -> &CoxeterGraph {
        &self.graph
    }

    pub fn type_name(&self) -> CoxeterType {
        self.type_name
    }

    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    pub fn ring(&self) -> &CycloRing {
        &self.ring
    }

    pub fn num_positive_roots(&self) -> usize {
        self.n_pos
    }

    pub fn positive_roots(&self) -> &[Vec<CycloReal>] {
        &self.roots[..self.n_pos]
    }

    pub fn w0(&self) -> &GroupElement {
        &self.w0
    }

    pub fn w0_word(&self) -> &[usize] {
        &self.w0_word
    }

    /// Diagram automorphism induced by conjugation with `w0`.
    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    /// Matrix of the simple reflection `sigma_i` in the simple-root basis.
    pub fn simple_reflection_matrix(&self, i: usize) -> Matrix {
        let n = self.rank();
        let mut m = vec![vec![self.ring.zero(); n]; n];
        for j in 0..n {
            if j == i {
                m[i][i] = self.ring.from_int(-1);
            } else {
                m[j][j] = self.ring.one();
                m[i][j] = self.cos_matrix[i][j].clone();
            }
        }
        m
    }

    pub fn identity(&self) -> GroupElement {
        let p: Vec<u16> = (0..self.roots.len() as u16).collect();
        GroupElement { ctx: self.id, perm: p.clone(), inv: p, length: 0 }
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut w = self.identity();
        self.mul_gen_right_in_place(&mut w, i);
        w
    }

    fn is_negative(&self, r: u16) -> bool {
        r as usize >= self.n_pos
    }

    fn check(&self, w: &GroupElement) -> Result<()> {
        if w.ctx == self.id {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// `s` is a right descent iff `w(alpha_s) < 0`.
    pub fn is_right_descent(&self, w: &GroupElement, s: usize) -> bool {
        self.is_negative(w.perm[s])
    }

    /// `s` is a left descent iff `w^{-1}(alpha_s) < 0`.
    pub fn is_left_descent(&self, w: &GroupElement, s: usize) -> bool {
        self.is_negative(w.inv[s])
    }

    pub fn left_descents(&self, w: &GroupElement) -> Vec<usize> {
        (0..self.rank()).filter(|&s| self.is_left_descent(w, s)).collect()
    }

    pub fn right_descents(&self, w: &GroupElement) -> Vec<usize> {
        (0..self.rank()).filter(|&s| self.is_right_descent(w, s)).collect()
    }

    /// Number of positive roots sent to negative roots.
    pub fn length(&self, w: &GroupElement) -> usize {
        w.perm[..self.n_pos].iter().filter(|&&r| self.is_negative(r)).count()
    }

    /// `w <- w * s`
    pub fn mul_gen_right_in_place(&self, w: &mut GroupElement, s: usize) {
        let g = &self.gen_perm[s];
        let up = !self.is_right_descent(w, s);
        let old = w.perm.clone();
        for (r, slot) in w.perm.iter_mut().enumerate() {
            *slot = old[g[r] as usize];
        }
        for (r, slot) in w.inv.iter_mut().enumerate() {
            *slot = g[*slot as usize];
            let _ = r;
        }
        if up {
            w.length += 1;
        } else {
            w.length -= 1;
        }
    }

    /// `w <- s * w`
    pub fn mul_gen_left_in_place(&self, s: usize, w: &mut GroupElement) {
        let g = &self.gen_perm[s];
        let up = !self.is_left_descent(w, s);
        for slot in w.perm.iter_mut() {
            *slot = g[*slot as usize];
        }
        let old = w.inv.clone();
        for (r, slot) in w.inv.iter_mut().enumerate() {
            *slot = old[g[r] as usize];
        }
        if up {
            w.length += 1;
        } else {
            w.length -= 1;
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let perm: Vec<u16> = b.perm.iter().map(|&r| a.perm[r as usize]).collect();
        let inv: Vec<u16> = a.inv.iter().map(|&r| b.inv[r as usize]).collect();
        let mut out = GroupElement { ctx: self.id, perm, inv, length: 0 };
        out.length = self.length(&out);
        out
    }

    /// Checked product.
    pub fn try_mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn inverse(&self, w: &GroupElement) -> GroupElement {
        GroupElement { ctx: self.id, perm: w.inv.clone(), inv: w.perm.clone(), length: w.length }
    }

    pub fn from_word(&self, word: &[usize]) -> GroupElement {
        let mut w = self.identity();
        for &s in word {
            self.mul_gen_right_in_place(&mut w, s);
        }
        w
    }

    /// A reduced word, read left to right.
    pub fn reduced_word(&self, w: &GroupElement) -> Vec<usize> {
        let mut w = w.clone();
        let mut word = Vec::with_capacity(w.length);
        while w.length > 0 {
            let s = (0..self.rank()).find(|&s| self.is_left_descent(&w, s)).unwrap();
            self.mul_gen_left_in_place(s, &mut w);
            word.push(s);
        }
        word
    }

    /// Conjugation by `w0`.
    pub fn tau_element(&self, w: &GroupElement) -> GroupElement {
        if self.tau.iter().enumerate().all(|(i, &j)| i == j) {
            return w.clone();
        }
        self.mul(&self.mul(&self.w0, w), &self.w0)
    }

    /// Matrix of `w` in the simple-root basis (column `j` is `w(alpha_j)`).
    pub fn matrix(&self, w: &GroupElement) -> Matrix {
        let n = self.rank();
        let mut m = vec![vec![self.ring.zero(); n]; n];
        for j in 0..n {
            let col = &self.roots[w.perm[j] as usize];
            for i in 0..n {
                m[i][j] = col[i].clone();
            }
        }
        m
    }

    /// Exact product of two matrices over the context's scalar ring.
    pub fn matrix_mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        let n = a.len();
        let k = b.len();
        let cols = b.first().map_or(0, |r| r.len());
        (0..n)
            .map(|i| {
                (0..cols)
                    .map(|j| {
                        (0..k).fold(self.ring.zero(), |acc, l| acc.add_unchecked(&a[i][l].mul_unchecked(&b[l][j])))
                    })
                    .collect()
            })
            .collect()
    }

    /// Breadth-first enumeration of the whole group, aborting past `bound`.
    pub fn enumerate_group(&self, bound: usize) -> Result<Vec<GroupElement>> {
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut out = vec![self.identity()];
        seen.insert(self.identity());
        let mut head = 0;
        while head < out.len() {
            let w = out[head].clone();
            head += 1;
            for s in 0..self.rank() {
                let mut v = w.clone();
                self.mul_gen_right_in_place(&mut v, s);
                if seen.insert(v.clone()) {
                    if out.len() >= bound {
                        return Err(Error::BoundExceeded(bound));
                    }
                    out.push(v);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(t: &str) -> Arc<CoxeterContext> {
        CoxeterContext::from_type(t.parse().unwrap()).unwrap()
    }

    #[test]
    fn classification_examples() {
        let g = CoxeterGraph::parse_edge_list("1-2:5", None).unwrap();
        assert_eq!(classify_finite(&g).unwrap(), Some(CoxeterType::H(2)));
        let g = CoxeterGraph::parse_edge_list("1-2:3,2-3:3", None).unwrap();
        assert_eq!(classify_finite(&g).unwrap(), Some(CoxeterType::A(3)));
        let g = CoxeterGraph::parse_edge_list("1-2:3,2-3:6", None).unwrap();
        assert_eq!(classify_finite(&g).unwrap(), None);
        let g = CoxeterGraph::parse_edge_list("1-2", Some(3)).unwrap();
        assert!(matches!(classify_finite(&g), Err(Error::Disconnected)));
        let g = CoxeterGraph::parse_edge_list("1-2,2-3,3-1", None).unwrap();
        assert_eq!(classify_finite(&g).unwrap(), None);
    }

    #[test]
    fn standard_graphs_classify_to_themselves() {
        for label in ["A1", "A5", "B2", "B4", "D4", "D6", "E6", "E7", "E8", "F4", "G2", "H2", "H3", "H4", "I2:7", "I2:12"] {
            let t: CoxeterType = label.parse().unwrap();
            assert_eq!(classify_finite(&t.standard_graph()).unwrap(), Some(t), "{}", label);
            assert_eq!(t.to_string(), label);
        }
        assert_eq!("I2:5".parse::<CoxeterType>().unwrap(), CoxeterType::H(2));
        assert_eq!("C3".parse::<CoxeterType>().unwrap(), CoxeterType::B(3));
        assert!("D3".parse::<CoxeterType>().is_err());
        assert!("X9".parse::<CoxeterType>().is_err());
    }

    #[test]
    fn reflection_matrices() {
        let a1 = ctx("A1");
        assert_eq!(a1.simple_reflection_matrix(0), vec![vec![a1.ring().from_int(-1)]]);
        // I2(3): sigma_1(alpha_1) = -alpha_1, sigma_1(alpha_2) = alpha_1 + alpha_2
        let a2 = ctx("I2:3");
        let r = a2.ring();
        let m = a2.simple_reflection_matrix(0);
        assert_eq!(m, vec![vec![r.from_int(-1), r.one()], vec![r.zero(), r.one()]]);
    }

    #[test]
    fn root_counts_and_longest_elements() {
        for (label, n) in [("A3", 6), ("B3", 9), ("H3", 15), ("H4", 60), ("F4", 24), ("E8", 120), ("I2:7", 7)] {
            let c = ctx(label);
            assert_eq!(c.num_positive_roots(), n, "{}", label);
            assert_eq!(c.w0().length(), n);
            assert_eq!(c.w0_word().len(), n);
            assert!(c.mul(c.w0(), c.w0()).is_identity());
        }
        let a2 = ctx("A2");
        assert_eq!(a2.from_word(&[0, 1, 0]).length(), 3);
        let i7 = ctx("I2:7");
        assert_eq!(i7.left_descents(i7.w0()), vec![0, 1]);
        assert_eq!(i7.length(&i7.identity()), 0);
    }

    #[test]
    fn braid_relations_hold_as_matrices() {
        for label in ["A4", "B4", "D4", "F4", "H3", "H4", "I2:5", "I2:8", "I2:12"] {
            let c = ctx(label);
            let n = c.rank();
            for i in 0..n {
                let si = c.simple_reflection_matrix(i);
                let sq = c.matrix_mul(&si, &si);
                assert_eq!(sq, c.matrix(&c.identity()));
                assert_eq!(si, c.matrix(&c.generator(i)));
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let m = c.graph().weight(i, j);
                    let sj = c.simple_reflection_matrix(j);
                    let pair = c.matrix_mul(&si, &sj);
                    let mut acc = c.matrix(&c.identity());
                    for k in 1..=m {
                        acc = c.matrix_mul(&acc, &pair);
                        if k < m {
                            assert_ne!(acc, c.matrix(&c.identity()), "{} order too small", label);
                        }
                    }
                    assert_eq!(acc, c.matrix(&c.identity()), "{} ({},{})", label, i, j);
                }
            }
        }
    }

    #[test]
    fn permutation_product_matches_matrix_product() {
        let c = ctx("H3");
        let a = c.from_word(&[0, 1, 2, 1]);
        let b = c.from_word(&[2, 0, 1]);
        assert_eq!(c.matrix(&c.mul(&a, &b)), c.matrix_mul(&c.matrix(&a), &c.matrix(&b)));
        assert_eq!(c.from_word(&c.reduced_word(&a)), a);
    }

    #[test]
    fn w0_conjugation_permutes_generators() {
        for label in ["A4", "D5", "E6", "H3", "I2:7", "I2:8"] {
            let c = ctx(label);
            for i in 0..c.rank() {
                let j = c.tau()[i];
                assert_eq!(c.tau_element(&c.generator(i)), c.generator(j));
            }
        }
        assert_eq!(ctx("A3").tau(), &[2, 1, 0]);
        assert_eq!(ctx("E6").tau(), &[5, 4, 2, 3, 1, 0]);
    }

    #[test]
    fn group_orders() {
        for (label, order) in [("A3", 24), ("H3", 120), ("B3", 48), ("D4", 192), ("F4", 1152), ("I2:9", 18)] {
            let c = ctx(label);
            assert_eq!(c.enumerate_group(100_000).unwrap().len(), order, "{}", label);
        }
        assert!(matches!(ctx("A3").enumerate_group(10), Err(Error::BoundExceeded(10))));
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = ctx("A2");
        let b = ctx("A2");
        assert!(matches!(a.try_mul(&a.identity(), &b.identity()), Err(Error::ContextMismatch)));
    }
}
