//! Weighted foldings `f: Lambda -> Delta` of a simply laced graph onto a
//! weighted one, the built-in catalog, and folding of oriented quivers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coxeter::{classify_finite, CoxeterGraph, CoxeterType};
use crate::error::{Error, Result};

/// A vertex map `Lambda_0 -> Delta_0` between two finite Coxeter graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Folding {
    source_type: CoxeterType,
    target_type: CoxeterType,
    source: CoxeterGraph,
    target: CoxeterGraph,
    vertex_map: Vec<usize>,
    fibers: Vec<Vec<usize>>,
}

/// Serialized shape of a [`Folding`]; vertices are 1-based.
#[derive(Serialize, Deserialize)]
struct FoldingJson {
    target: String,
    source: String,
    vertex_map: Vec<(usize, usize)>,
    fibers: Vec<Vec<usize>>,
}

impl Serialize for Folding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FoldingJson {
            target: self.target_type.to_string(),
            source: self.source_type.to_string(),
            vertex_map: self.vertex_map.iter().enumerate().map(|(k, &i)| (k + 1, i + 1)).collect(),
            fibers: self.fibers.iter().map(|f| f.iter().map(|k| k + 1).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Folding {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = FoldingJson::deserialize(d)?;
        let target: CoxeterType = j.target.parse().map_err(D::Error::custom)?;
        let source: CoxeterType = j.source.parse().map_err(D::Error::custom)?;
        let mut map = vec![usize::MAX; source.rank()];
        for (k, i) in j.vertex_map {
            if k == 0 || k > map.len() || i == 0 {
                return Err(D::Error::custom("vertex_map entry out of range"));
            }
            map[k - 1] = i - 1;
        }
        if map.contains(&usize::MAX) {
            return Err(D::Error::custom("vertex_map is not total"));
        }
        Folding::new(source, target, map).map_err(D::Error::custom)
    }
}

impl Folding {
    /// Builds a folding from standard graphs and a 0-based vertex map. Only
    /// shape checks are made here; see [`Folding::validate`].
    pub fn new(source: CoxeterType, target: CoxeterType, vertex_map: Vec<usize>) -> Result<Self> {
        let src = source.standard_graph();
        let tgt = target.standard_graph();
        Self::from_graphs(source, src, target, tgt, vertex_map)
    }

    fn from_graphs(
        source_type: CoxeterType,
        source: CoxeterGraph,
        target_type: CoxeterType,
        target: CoxeterGraph,
        vertex_map: Vec<usize>,
    ) -> Result<Self> {
        if vertex_map.len() != source.rank() {
            return Err(Error::InvalidGraph("vertex map length differs from source rank".into()));
        }
        let mut fibers = vec![Vec::new(); target.rank()];
        for (k, &i) in vertex_map.iter().enumerate() {
            if i >= target.rank() {
                return Err(Error::InvalidGraph(format!("vertex {} maps outside the target", k + 1)));
            }
            fibers[i].push(k);
        }
        if fibers.iter().any(Vec::is_empty) {
            return Err(Error::InvalidGraph("vertex map is not surjective".into()));
        }
        Ok(Folding { source_type, target_type, source, target, vertex_map, fibers })
    }

    /// The identity folding of a simply laced type.
    pub fn identity(t: CoxeterType) -> Self {
        Folding::new(t, t, (0..t.rank()).collect()).expect("identity map")
    }

    pub fn source(&self) -> &CoxeterGraph {
        &self.source
    }

    pub fn target(&self) -> &CoxeterGraph {
        &self.target
    }

    pub fn source_type(&self) -> CoxeterType {
        self.source_type
    }

    pub fn target_type(&self) -> CoxeterType {
        self.target_type
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn image(&self, k: usize) -> usize {
        self.vertex_map[k]
    }

    /// `f^{-1}(i)`, ascending.
    pub fn fiber(&self, i: usize) -> &[usize] {
        &self.fibers[i]
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn is_identity(&self) -> bool {
        self.fibers.iter().all(|f| f.len() == 1)
    }

    /// Selector string `Delta:Lambda`.
    pub fn label(&self) -> String {
        format!("{}:{}", self.target_type, self.source_type)
    }

    /// Checks the defining conditions of a weighted folding.
    pub fn validate(&self) -> Result<()> {
        let violation = |edge: (usize, usize), clause: &str| Error::FoldingViolation { edge, clause: clause.to_string() };
        if !self.source.is_connected() {
            return Err(violation((0, 0), "source graph is disconnected"));
        }
        for (a, b, m) in self.source.edges() {
            if m != 3 {
                return Err(violation((a + 1, b + 1), "source graph is not simply laced"));
            }
            let (i, j) = (self.vertex_map[a], self.vertex_map[b]);
            if i == j {
                return Err(violation((a + 1, b + 1), "fiber is not an independent set"));
            }
            if self.target.weight(i, j) == 2 {
                return Err(violation((a + 1, b + 1), "edge maps onto a non-edge"));
            }
        }
        for (i, j, m) in self.target.edges() {
            let edges: Vec<(usize, usize)> = self
                .source
                .edges()
                .filter(|&(a, b, _)| {
                    let (x, y) = (self.vertex_map[a], self.vertex_map[b]);
                    (x, y) == (i, j) || (x, y) == (j, i)
                })
                .map(|(a, b, _)| (a, b))
                .collect();
            let mut verts: Vec<usize> = self.fibers[i].iter().chain(&self.fibers[j]).copied().collect();
            verts.sort_unstable();
            let covered = verts.iter().all(|v| edges.iter().any(|&(a, b)| a == *v || b == *v));
            if !covered {
                return Err(violation((i + 1, j + 1), "preimage misses a fiber vertex"));
            }
            match preimage_weight(self.source.rank(), &edges) {
                Ok(w) if w == m => {}
                Ok(_) => return Err(violation((i + 1, j + 1), "Coxeter number of the preimage differs from the weight")),
                Err(_) => return Err(violation((i + 1, j + 1), "preimage is not a union of finite Coxeter graphs")),
            }
        }
        Ok(())
    }
}

impl fmt::Display for Folding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} [", self.source_type, self.target_type)?;
        for (i, fib) in self.fibers.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let names: Vec<String> = fib.iter().map(|k| (k + 1).to_string()).collect();
            write!(f, "{}: {{{}}}", i + 1, names.join(","))?;
        }
        write!(f, "]")
    }
}

fn simply_laced_coxeter_number(t: CoxeterType) -> Option<u32> {
    t.is_simply_laced().then(|| t.coxeter_number())
}

/// Common Coxeter number of the components spanned by `edges`; isolated
/// vertices are ignored and a matching of single edges gives 3.
fn preimage_weight(n: usize, edges: &[(usize, usize)]) -> Result<u32> {
    let mut involved: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    involved.sort_unstable();
    involved.dedup();
    let pos: BTreeMap<usize, usize> = involved.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut g = CoxeterGraph::new(involved.len());
    for &(a, b) in edges {
        g.add_edge(pos[&a], pos[&b], 3)
            .map_err(|_| Error::NotFoldable(format!("repeated edge {}-{}", a + 1, b + 1)))?;
    }
    debug_assert!(involved.iter().all(|&v| v < n));
    let mut weight = None;
    for comp in g.components() {
        let sub = g.induced(&comp);
        let t = classify_finite(&sub)?
            .and_then(simply_laced_coxeter_number)
            .ok_or_else(|| Error::NotFoldable("component is not a simply laced Dynkin graph".into()))?;
        match weight {
            None => weight = Some(t),
            Some(w) if w == t => {}
            Some(w) => return Err(Error::NotFoldable(format!("components with Coxeter numbers {} and {}", w, t))),
        }
    }
    weight.ok_or_else(|| Error::NotFoldable("no arrows".into()))
}

/// An oriented weighted graph; at most one arrow per vertex pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WeightedQuiver {
    n: usize,
    arrows: BTreeMap<(usize, usize), u32>,
}

#[derive(Serialize, Deserialize)]
struct ArrowJson {
    src: usize,
    dst: usize,
    weight: u32,
}

#[derive(Serialize, Deserialize)]
struct QuiverJson {
    vertices: usize,
    arrows: Vec<ArrowJson>,
}

impl Serialize for WeightedQuiver {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuiverJson {
            vertices: self.n,
            arrows: self.arrows().map(|(a, b, w)| ArrowJson { src: a + 1, dst: b + 1, weight: w }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedQuiver {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = QuiverJson::deserialize(d)?;
        let mut q = WeightedQuiver::new(j.vertices);
        for a in j.arrows {
            if a.src == 0 || a.dst == 0 {
                return Err(D::Error::custom("vertices are 1-based"));
            }
            q.add_arrow(a.src - 1, a.dst - 1, a.weight).map_err(D::Error::custom)?;
        }
        Ok(q)
    }
}

impl WeightedQuiver {
    pub fn new(n: usize) -> Self {
        WeightedQuiver { n, arrows: BTreeMap::new() }
    }

    pub fn add_arrow(&mut self, src: usize, dst: usize, weight: u32) -> Result<()> {
        if src >= self.n || dst >= self.n || src == dst || weight < 3 {
            return Err(Error::InvalidGraph(format!("bad arrow {}->{} ({})", src + 1, dst + 1, weight)));
        }
        if self.arrows.contains_key(&(dst, src)) || self.arrows.contains_key(&(src, dst)) {
            return Err(Error::InvalidGraph(format!("second arrow between {} and {}", src + 1, dst + 1)));
        }
        self.arrows.insert((src, dst), weight);
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Weight of the arrow `src -> dst`, if present.
    pub fn arrow(&self, src: usize, dst: usize) -> Option<u32> {
        self.arrows.get(&(src, dst)).copied()
    }

    /// Weight of the arrow between `a` and `b` in either direction, or 2.
    pub fn weight(&self, a: usize, b: usize) -> u32 {
        self.arrow(a, b).or_else(|| self.arrow(b, a)).unwrap_or(2)
    }

    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.arrows.iter().map(|(&(a, b), &w)| (a, b, w))
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn underlying_graph(&self) -> CoxeterGraph {
        let edges: Vec<(usize, usize, u32)> = self.arrows().collect();
        CoxeterGraph::from_edges(self.n, &edges).expect("at most one arrow per pair")
    }

    /// Orientation of a Coxeter graph with `i -> j` whenever `rank[i] < rank[j]`.
    pub fn oriented(g: &CoxeterGraph, rank: &[usize]) -> Self {
        let mut q = WeightedQuiver::new(g.rank());
        for (a, b, m) in g.edges() {
            let (s, t) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
            q.arrows.insert((s, t), m);
        }
        q
    }

    /// Same weights, every arrow reversed.
    pub fn opposite(&self) -> Self {
        WeightedQuiver { n: self.n, arrows: self.arrows.iter().map(|(&(a, b), &w)| ((b, a), w)).collect() }
    }

    /// Compact text form `1->2:5, 2->3:3`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.arrows().map(|(a, b, w)| format!("{}->{}:{}", a + 1, b + 1, w)).collect();
        if parts.is_empty() {
            "(no arrows)".into()
        } else {
            parts.join(", ")
        }
    }
}

/// All catalog foldings onto `t`. The first entry is the default one.
pub fn catalog(t: CoxeterType) -> Vec<Arc<Folding>> {
    let mk = |src: CoxeterType, one_based: &[usize]| {
        let map = one_based.iter().map(|i| i - 1).collect();
        Arc::new(Folding::new(src, t, map).expect("catalog entry"))
    };
    // Lambda-vertex 1's bipartition class goes to Delta-vertex 2
    let bipartite = |src: CoxeterType| {
        let g = src.standard_graph();
        let mut side = vec![usize::MAX; g.rank()];
        side[0] = 1;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for u in g.neighbors(v) {
                if side[u] == usize::MAX {
                    side[u] = 1 - side[v];
                    stack.push(u);
                }
            }
        }
        Arc::new(Folding::new(src, t, side).expect("bipartite catalog entry"))
    };
    match t {
        CoxeterType::A(_) | CoxeterType::D(_) | CoxeterType::E(_) => vec![Arc::new(Folding::identity(t))],
        CoxeterType::B(n) => {
            let mut out = vec![mk(CoxeterType::A(2 * n - 1), &(1..2 * n).map(|p| p.min(2 * n - p)).collect::<Vec<_>>())];
            if n >= 3 {
                let map: Vec<usize> = (1..=n + 1).map(|k| if k <= 2 { n } else { n + 2 - k }).collect();
                out.push(mk(CoxeterType::D(n + 1), &map));
            }
            out
        }
        CoxeterType::F4 => vec![mk(CoxeterType::E(6), &[4, 3, 2, 1, 3, 4])],
        CoxeterType::G2 => vec![mk(CoxeterType::D(4), &[1, 1, 2, 1]), bipartite(CoxeterType::A(5))],
        CoxeterType::H(2) => vec![bipartite(CoxeterType::A(4))],
        CoxeterType::H(3) => vec![mk(CoxeterType::D(6), &[1, 3, 2, 1, 2, 3])],
        CoxeterType::H(_) => vec![mk(CoxeterType::E(8), &[4, 3, 2, 1, 1, 2, 3, 4])],
        CoxeterType::I2(m) => {
            let mut out = vec![bipartite(CoxeterType::A(m as usize - 1))];
            if m % 2 == 0 {
                out.push(bipartite(CoxeterType::D(m as usize / 2 + 1)));
            }
            match m {
                12 => out.push(bipartite(CoxeterType::E(6))),
                18 => out.push(bipartite(CoxeterType::E(7))),
                30 => out.push(bipartite(CoxeterType::E(8))),
                _ => {}
            }
            out
        }
    }
}

/// Catalog lookup by selector `Delta` or `Delta:Lambda`.
pub fn lookup(selector: &str) -> Result<Arc<Folding>> {
    let (delta, lambda) = match selector.rsplit_once(':') {
        // `I2:m` alone contains a colon
        Some((d, l)) if l.parse::<u32>().is_err() => (d, Some(l)),
        _ => (selector, None),
    };
    let delta: CoxeterType = delta.parse()?;
    let entries = catalog(delta);
    match lambda {
        None => Ok(entries[0].clone()),
        Some(l) => {
            let lambda: CoxeterType = l.parse()?;
            entries
                .into_iter()
                .find(|f| f.source_type() == lambda)
                .ok_or_else(|| Error::UnknownType(format!("no catalog folding {}", selector)))
        }
    }
}

/// Default orientation of `Delta` (`i -> j` iff `i` precedes `j` in `order`,
/// index order when absent) and its pull-back to `Lambda` as a skew matrix.
pub fn default_orientation(f: &Folding, order: Option<&[usize]>) -> Result<(WeightedQuiver, Vec<Vec<i64>>)> {
    let n = f.target().rank();
    let rank: Vec<usize> = match order {
        None => (0..n).collect(),
        Some(ord) => {
            let mut sorted = ord.to_vec();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(Error::Parse("orientation order must be a permutation of the target vertices".into()));
            }
            let mut r = vec![0; n];
            for (pos, &v) in ord.iter().enumerate() {
                r[v] = pos;
            }
            r
        }
    };
    let qd = WeightedQuiver::oriented(f.target(), &rank);
    let nl = f.source().rank();
    let mut b = vec![vec![0i64; nl]; nl];
    for (k, l, _) in f.source().edges() {
        let (s, t) = if qd.arrow(f.image(k), f.image(l)).is_some() { (k, l) } else { (l, k) };
        b[s][t] = 1;
        b[t][s] = -1;
    }
    Ok((qd, b))
}

/// Folds an oriented simply laced quiver on `Lambda`, given as a skew matrix
/// with `b[k][l] > 0` iff `k -> l`, to a weighted quiver on `Delta`.
pub fn fold_quiver(f: &Folding, b: &[Vec<i64>]) -> Result<WeightedQuiver> {
    let nl = f.source().rank();
    if b.len() != nl || b.iter().any(|r| r.len() != nl) {
        return Err(Error::QuiverMismatch("matrix size differs from the source rank".into()));
    }
    let nd = f.target().rank();
    let mut between: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for k in 0..nl {
        for l in 0..nl {
            let v = b[k][l];
            if v <= 0 {
                continue;
            }
            if v > 1 {
                return Err(Error::NotFoldable(format!("multiple arrows {}->{}", k + 1, l + 1)));
            }
            let (i, j) = (f.image(k), f.image(l));
            if i == j {
                return Err(Error::NotFoldable(format!("arrow {}->{} inside a fiber", k + 1, l + 1)));
            }
            between.entry((i, j)).or_default().push((k, l));
        }
    }
    let mut q = WeightedQuiver::new(nd);
    for (&(i, j), arrows) in &between {
        if i > j && between.contains_key(&(j, i)) {
            continue;
        }
        if between.contains_key(&(j, i)) {
            return Err(Error::NotFoldable(format!("mixed orientation between fibers {} and {}", i + 1, j + 1)));
        }
        let w = preimage_weight(nl, arrows)?;
        q.arrows.insert((i, j), w);
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> CoxeterType {
        s.parse().unwrap()
    }

    #[test]
    fn catalog_entries_validate_and_fold_back() {
        for label in ["A3", "D5", "E7", "B2", "B3", "B4", "F4", "G2", "H2", "H3", "H4", "I2:7", "I2:8", "I2:12", "I2:18", "I2:30"] {
            let t = ty(label);
            let entries = catalog(t);
            assert!(!entries.is_empty());
            for f in entries {
                f.validate().unwrap_or_else(|e| panic!("{}: {}", f.label(), e));
                let (qd, b) = default_orientation(&f, None).unwrap();
                assert_eq!(fold_quiver(&f, &b).unwrap(), qd, "{}", f.label());
            }
        }
    }

    #[test]
    fn catalog_fibers() {
        let h4 = lookup("H4").unwrap();
        assert_eq!(h4.source_type(), ty("E8"));
        assert!(h4.fibers().iter().all(|fib| fib.len() == 2));
        let g2 = lookup("G2:D4").unwrap();
        assert_eq!(g2.fiber(0), &[0, 1, 3]);
        let h2 = lookup("H2").unwrap();
        assert_eq!(h2.fiber(1), &[0, 2]);
        assert_eq!(h2.fiber(0), &[1, 3]);
        assert_eq!(lookup("I2:12").unwrap().source_type(), ty("A11"));
        assert!(lookup("I2:12:E6").is_ok());
        assert!(lookup("H3:E8").is_err());
    }

    #[test]
    fn violations() {
        // collapse an edge
        let bad = Folding::new(ty("A3"), ty("A2"), vec![0, 0, 1]).unwrap();
        let err = bad.validate().unwrap_err();
        assert!(matches!(err, Error::FoldingViolation { ref clause, .. } if clause.contains("independent")));
        // A4 onto B2 has Coxeter number 5, not 4
        let bad = Folding::new(ty("A4"), ty("B2"), vec![1, 0, 1, 0]).unwrap();
        assert!(bad.validate().is_err());
        Folding::identity(ty("A3")).validate().unwrap();
    }

    #[test]
    fn folding_quivers() {
        let h2 = lookup("H2").unwrap();
        let (_, b) = default_orientation(&h2, None).unwrap();
        let q = fold_quiver(&h2, &b).unwrap();
        assert_eq!(q.arrow(0, 1), Some(5));

        // two parallel arrows between fibers of size 2
        let f = lookup("B3:D4").unwrap();
        let b3 = lookup("B3").unwrap();
        assert_eq!(b3.source_type(), ty("A5"));
        let (_, b) = default_orientation(&b3, None).unwrap();
        let q = fold_quiver(&b3, &b).unwrap();
        assert_eq!(q.arrow(0, 1), Some(3));
        let (_, b) = default_orientation(&f, None).unwrap();
        assert_eq!(fold_quiver(&f, &b).unwrap().arrow(1, 2), Some(4));

        // reverse one arrow of the bipartite A4
        let (_, mut b) = default_orientation(&h2, None).unwrap();
        b[0][1] = -b[0][1];
        b[1][0] = -b[1][0];
        assert!(matches!(fold_quiver(&h2, &b), Err(Error::NotFoldable(_))));
    }

    #[test]
    fn json_round_trip() {
        let f = lookup("H3").unwrap();
        let s = serde_json::to_string(&*f).unwrap();
        assert!(s.contains("\"vertex_map\":[[1,1],[2,3]"));
        let back: Folding = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, &*f);
        let q = default_orientation(&f, None).unwrap().0;
        let back: WeightedQuiver = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn orientation_override() {
        let f = lookup("A3").unwrap();
        let (q, _) = default_orientation(&f, Some(&[2, 1, 0])).unwrap();
        assert_eq!(q.arrow(2, 1), Some(3));
        assert!(default_orientation(&f, Some(&[0, 0, 1])).is_err());
    }
}
