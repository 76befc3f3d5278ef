//! Seeds with principal coefficients over the unfolded graph, weighted
//! mutation through a folding, and the potential-term patterns I-IV.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::folding::{default_orientation, fold_quiver, Folding, WeightedQuiver};

/// Exchange matrix `B` on `Lambda_0` plus principal coefficients `C`
/// (column `k` is the c-vector of position `k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    folding: Arc<Folding>,
    b: Vec<Vec<i64>>,
    c: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct SeedJson<'a> {
    folding: String,
    b: &'a [Vec<i64>],
    c: &'a [Vec<i64>],
}

impl Serialize for Seed {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeedJson { folding: self.folding.label(), b: &self.b, c: &self.c }.serialize(s)
    }
}

impl Seed {
    /// The initial seed for the default (or overridden) orientation.
    pub fn initial(folding: Arc<Folding>, order: Option<&[usize]>) -> Result<Self> {
        let (_, b) = default_orientation(&folding, order)?;
        Ok(Self::from_matrix(folding, b))
    }

    /// Seed with exchange matrix `b` and identity coefficients.
    pub fn from_matrix(folding: Arc<Folding>, b: Vec<Vec<i64>>) -> Self {
        let n = b.len();
        let c = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Seed { folding, b, c }
    }

    pub fn folding(&self) -> &Arc<Folding> {
        &self.folding
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn c(&self) -> &[Vec<i64>] {
        &self.c
    }

    pub fn rank(&self) -> usize {
        self.b.len()
    }

    pub fn c_vector(&self, k: usize) -> Vec<i64> {
        self.c.iter().map(|row| row[k]).collect()
    }

    /// `+1` / `-1` for a sign-coherent nonzero c-vector.
    pub fn c_sign(&self, k: usize) -> Result<i32> {
        let pos = self.c.iter().any(|row| row[k] > 0);
        let neg = self.c.iter().any(|row| row[k] < 0);
        match (pos, neg) {
            (true, false) => Ok(1),
            (false, true) => Ok(-1),
            _ => Err(Error::SignCoherence(format!("c-vector {:?} at position {}", self.c_vector(k), k + 1))),
        }
    }

    /// Common sign of the c-vectors in the fiber of the `Delta`-vertex `i`.
    pub fn fiber_sign(&self, i: usize) -> Result<i32> {
        let fib = self.folding.fiber(i);
        let s = self.c_sign(fib[0])?;
        for &k in &fib[1..] {
            if self.c_sign(k)? != s {
                return Err(Error::SignCoherence(format!("mixed c-vector signs in fiber {}", i + 1)));
            }
        }
        Ok(s)
    }

    pub fn check_sign_coherence(&self) -> Result<()> {
        (0..self.rank()).try_for_each(|k| self.c_sign(k).map(|_| ()))
    }

    /// Matrix mutation of the extended matrix `[B; C]` at position `k`.
    pub fn mutate(&self, k: usize) -> Seed {
        let n = self.rank();
        let step = |rows: &[Vec<i64>]| -> Vec<Vec<i64>> {
            rows.iter()
                .map(|row| {
                    (0..n)
                        .map(|j| {
                            if j == k {
                                -row[j]
                            } else {
                                let (x, y) = (row[k], self.b[k][j]);
                                row[j] + (x.abs() * y + x * y.abs()) / 2
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let mut b = step(&self.b);
        for (j, v) in b[k].iter_mut().enumerate() {
            *v = -self.b[k][j];
        }
        let c = step(&self.c);
        Seed { folding: self.folding.clone(), b, c }
    }

    /// Mutation at every position of the fiber of `i`, checked to refold.
    pub fn weighted_mutate(&self, i: usize) -> Result<Seed> {
        let mut s = self.clone();
        for &k in self.folding.fiber(i) {
            s = s.mutate(k);
        }
        s.quiver()?;
        Ok(s)
    }

    /// The folded weighted quiver `Q-bar`.
    pub fn quiver(&self) -> Result<WeightedQuiver> {
        fold_quiver(&self.folding, &self.b)
    }
}

/// Potential-term shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pattern {
    I,
    II,
    III,
    IV,
}

impl Pattern {
    pub const ALL: [Pattern; 4] = [Pattern::I, Pattern::II, Pattern::III, Pattern::IV];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pattern::I => "I",
            Pattern::II => "II",
            Pattern::III => "III",
            Pattern::IV => "IV",
        };
        f.write_str(s)
    }
}

/// A chordless oriented cycle `cycle[0] -> cycle[1] -> ... -> cycle[0]`,
/// rotated so that `cycle[0]` plays the role of vertex 1 of its pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PotentialTerm {
    pub cycle: Vec<usize>,
    pub pattern: Pattern,
}

/// Every chordless oriented cycle of `q`, classified.
pub fn chordless_cycles(q: &WeightedQuiver) -> Result<Vec<PotentialTerm>> {
    let n = q.num_vertices();
    assert!(n <= 20, "subset enumeration is meant for small quivers");
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size < 3 {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        let inside: Vec<(usize, usize, u32)> =
            q.arrows().filter(|&(a, b, _)| mask & (1 << a) != 0 && mask & (1 << b) != 0).collect();
        if inside.len() != size {
            continue;
        }
        // each vertex has exactly one outgoing and one incoming arrow
        let mut succ = vec![usize::MAX; n];
        let mut indeg = vec![0; n];
        let mut ok = true;
        for &(a, b, _) in &inside {
            if succ[a] != usize::MAX {
                ok = false;
                break;
            }
            succ[a] = b;
            indeg[b] += 1;
        }
        if !ok || verts.iter().any(|&v| indeg[v] != 1 || succ[v] == usize::MAX) {
            continue;
        }
        let mut cycle = vec![verts[0]];
        let mut cur = succ[verts[0]];
        while cur != verts[0] {
            cycle.push(cur);
            cur = succ[cur];
        }
        if cycle.len() != size {
            continue; // disjoint union of shorter cycles
        }
        out.push(classify_cycle(q, &cycle)?);
    }
    Ok(out)
}

fn rotate(cycle: &[usize], start: usize) -> Vec<usize> {
    cycle[start..].iter().chain(&cycle[..start]).copied().collect()
}

/// Classifies an oriented cycle (given in arrow order) into I-IV.
pub fn classify_cycle(q: &WeightedQuiver, cycle: &[usize]) -> Result<PotentialTerm> {
    let l = cycle.len();
    let w = |i: usize| q.arrow(cycle[i % l], cycle[(i + 1) % l]).expect("cycle arrow");
    let weights: Vec<u32> = (0..l).map(w).collect();
    let min_start = |valid: &dyn Fn(usize) -> bool| -> Option<usize> {
        (0..l).filter(|&s| valid(s)).min_by_key(|&s| cycle[s])
    };
    if weights.iter().all(|&x| x == 3) {
        let s = min_start(&|_| true).unwrap();
        return Ok(PotentialTerm { cycle: rotate(cycle, s), pattern: Pattern::I });
    }
    if l == 3 && weights.iter().all(|&x| x == 5) {
        let s = min_start(&|_| true).unwrap();
        return Ok(PotentialTerm { cycle: rotate(cycle, s), pattern: Pattern::IV });
    }
    let heavy = |m: u32| m == 4 || m == 5;
    if l == 3 {
        // 1 -> 2 (m), 2 -> 3 (3), 3 -> 1 (m)
        let valid = |s: usize| {
            let (a, b, c) = (weights[s], weights[(s + 1) % 3], weights[(s + 2) % 3]);
            heavy(a) && a == c && b == 3
        };
        if let Some(s) = min_start(&valid) {
            return Ok(PotentialTerm { cycle: rotate(cycle, s), pattern: Pattern::II });
        }
    }
    if l == 4 {
        // 1 -> 2 (3), 2 -> 3 (m), 3 -> 4 (3), 4 -> 1 (m)
        let valid = |s: usize| {
            let ws: Vec<u32> = (0..4).map(|i| weights[(s + i) % 4]).collect();
            ws[0] == 3 && ws[2] == 3 && heavy(ws[1]) && ws[1] == ws[3]
        };
        if let Some(s) = min_start(&valid) {
            return Ok(PotentialTerm { cycle: rotate(cycle, s), pattern: Pattern::III });
        }
    }
    Err(Error::UnclassifiedCycle(cycle.iter().map(|v| v + 1).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterType;
    use crate::folding::lookup;

    fn ident(label: &str) -> Arc<Folding> {
        Arc::new(Folding::identity(label.parse::<CoxeterType>().unwrap()))
    }

    fn quiver(n: usize, arrows: &[(usize, usize, u32)]) -> WeightedQuiver {
        let mut q = WeightedQuiver::new(n);
        for &(a, b, w) in arrows {
            q.add_arrow(a, b, w).unwrap();
        }
        q
    }

    #[test]
    fn a2_mutation_example() {
        let s = Seed::initial(ident("A2"), None).unwrap();
        assert_eq!(s.b()[0][1], 1);
        let t = s.mutate(0);
        assert_eq!(t.b()[1][0], 1);
        assert_eq!(t.c_vector(0), vec![-1, 0]);
        assert_eq!(t.c_vector(1), vec![1, 1]);
        assert_eq!(t.mutate(0), s);
    }

    #[test]
    fn three_cycle_mutates_to_acyclic() {
        let f = ident("A3");
        let b = vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]];
        let s = Seed::from_matrix(f, b);
        for k in 0..3 {
            let t = s.mutate(k);
            let q = t.quiver().unwrap();
            assert!(chordless_cycles(&q).unwrap().is_empty());
            assert_eq!(q.num_arrows(), 2);
        }
    }

    #[test]
    fn weighted_mutation_at_the_sink() {
        for m in ["H2", "I2:7", "I2:8"] {
            let f = lookup(m).unwrap();
            let s = Seed::initial(f, None).unwrap();
            let w = s.quiver().unwrap().arrow(0, 1).unwrap();
            let t = s.weighted_mutate(1).unwrap();
            assert_eq!(t.quiver().unwrap().arrow(1, 0), Some(w));
            assert_eq!(t.weighted_mutate(1).unwrap(), s);
        }
    }

    #[test]
    fn g2_fiber_mutation_refolds() {
        let f = lookup("G2:D4").unwrap();
        let s = Seed::initial(f, None).unwrap();
        let t = s.weighted_mutate(0).unwrap();
        let q = t.quiver().unwrap();
        assert_eq!(q.arrow(1, 0), Some(6));
        assert_eq!(t.fiber_sign(0).unwrap(), -1);
        assert_eq!(t.fiber_sign(1).unwrap(), 1);
    }

    #[test]
    fn fiber_order_is_irrelevant() {
        let f = lookup("H4").unwrap();
        let s = Seed::initial(f.clone(), None).unwrap().weighted_mutate(1).unwrap();
        for i in 0..4 {
            let fib = f.fiber(i);
            let fwd = fib.iter().fold(s.clone(), |acc, &k| acc.mutate(k));
            let bwd = fib.iter().rev().fold(s.clone(), |acc, &k| acc.mutate(k));
            assert_eq!(fwd, bwd);
        }
    }

    #[test]
    fn pattern_classification() {
        assert!(chordless_cycles(&quiver(3, &[(0, 1, 3), (1, 2, 3)])).unwrap().is_empty());
        let iv = chordless_cycles(&quiver(3, &[(1, 2, 5), (2, 0, 5), (0, 1, 5)])).unwrap();
        assert_eq!(iv, vec![PotentialTerm { cycle: vec![0, 1, 2], pattern: Pattern::IV }]);
        // 1 -> 2 (3), 2 -> 3 (5), 3 -> 4 (3), 4 -> 1 (5), written from vertex 2
        let iii = chordless_cycles(&quiver(4, &[(1, 2, 5), (2, 3, 3), (3, 0, 5), (0, 1, 3)])).unwrap();
        assert_eq!(iii, vec![PotentialTerm { cycle: vec![0, 1, 2, 3], pattern: Pattern::III }]);
        let ii = chordless_cycles(&quiver(3, &[(2, 0, 4), (0, 1, 3), (1, 2, 4)])).unwrap();
        assert_eq!(ii, vec![PotentialTerm { cycle: vec![2, 0, 1], pattern: Pattern::II }]);
        let i4 = chordless_cycles(&quiver(4, &[(3, 2, 3), (2, 1, 3), (1, 0, 3), (0, 3, 3)])).unwrap();
        assert_eq!(i4, vec![PotentialTerm { cycle: vec![0, 3, 2, 1], pattern: Pattern::I }]);
        // a chord kills the 4-cycle but leaves two triangles
        let chord = quiver(4, &[(0, 1, 3), (1, 2, 3), (2, 3, 3), (3, 0, 3), (2, 0, 3)]);
        let found = chordless_cycles(&chord).unwrap();
        assert_eq!(found.len(), 1);
        assert!(matches!(
            chordless_cycles(&quiver(3, &[(0, 1, 3), (1, 2, 5), (2, 0, 3)])),
            Err(Error::UnclassifiedCycle(_))
        ));
    }
}
