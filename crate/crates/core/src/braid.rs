//! Braid words, presentations of weighted quivers with potential, the
//! mutation transports, and the folding homomorphism.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coxeter::{CoxeterContext, GroupElement};
use crate::error::{Error, Result};
use crate::folding::{Folding, WeightedQuiver};
use crate::quiver::{chordless_cycles, Pattern};

/// A freely reduced word in generators `0..` and their inverses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BraidWord {
    letters: Vec<(usize, i8)>,
}

impl BraidWord {
    pub fn new(letters: impl IntoIterator<Item = (usize, i8)>) -> Self {
        let mut w = BraidWord::default();
        for (g, e) in letters {
            assert!(e == 1 || e == -1, "exponents are +-1");
            w.push(g, e);
        }
        w
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn gen(g: usize) -> Self {
        BraidWord { letters: vec![(g, 1)] }
    }

    /// Positive word from generator indices.
    pub fn positive(gens: &[usize]) -> Self {
        Self::new(gens.iter().map(|&g| (g, 1)))
    }

    fn push(&mut self, g: usize, e: i8) {
        if self.letters.last() == Some(&(g, -e)) {
            self.letters.pop();
        } else {
            self.letters.push((g, e));
        }
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|&(g, _)| g).max()
    }

    pub fn mul(&self, other: &BraidWord) -> BraidWord {
        let mut w = self.clone();
        for &(g, e) in &other.letters {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }

    /// `self^w = w^{-1} self w`.
    pub fn conj(&self, w: &BraidWord) -> BraidWord {
        w.inverse().mul(self).mul(w)
    }

    pub fn pow(&self, k: usize) -> BraidWord {
        (0..k).fold(BraidWord::empty(), |acc, _| acc.mul(self))
    }

    /// Replaces each generator `g` by `images[g]`.
    pub fn substitute(&self, images: &[BraidWord]) -> Result<BraidWord> {
        let mut out = BraidWord::empty();
        for &(g, e) in &self.letters {
            let img = images.get(g).ok_or(Error::GeneratorOutOfRange(g + 1))?;
            out = out.mul(&if e > 0 { img.clone() } else { img.inverse() });
        }
        Ok(out)
    }

    /// Parses whitespace-separated 1-based signed generators, e.g. `"1 2 -1"`.
    pub fn parse(s: &str) -> Result<BraidWord> {
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: i64 = tok.parse().map_err(|_| Error::Parse(format!("bad letter {:?}", tok)))?;
            if v == 0 {
                return Err(Error::Parse("generators are 1-based".into()));
            }
            letters.push((v.unsigned_abs() as usize - 1, v.signum() as i8));
        }
        Ok(BraidWord::new(letters))
    }

    /// 1-based signed integers.
    pub fn to_signed(&self) -> Vec<i64> {
        self.letters.iter().map(|&(g, e)| (g as i64 + 1) * e as i64).collect()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.to_signed().iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for BraidWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_signed().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BraidWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = Vec::<i64>::deserialize(d)?;
        if v.contains(&0) {
            return Err(D::Error::custom("generators are 1-based"));
        }
        Ok(BraidWord::new(v.into_iter().map(|x| (x.unsigned_abs() as usize - 1, x.signum() as i8))))
    }
}

/// `a b a ...` with `m` letters.
pub fn alternating(a: &BraidWord, b: &BraidWord, m: u32) -> BraidWord {
    (0..m).fold(BraidWord::empty(), |acc, k| acc.mul(if k % 2 == 0 { a } else { b }))
}

/// The relator of `Br^m(a, b)`: `(a b a ...)(b a b ...)^{-1}`.
pub fn braid_relator(m: u32, a: &BraidWord, b: &BraidWord) -> BraidWord {
    alternating(a, b, m).mul(&alternating(b, a, m).inverse())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    /// An arrow of weight `m`.
    Arrow { m: u32 },
    /// A pair of vertices without an arrow.
    Commute,
    Potential { pattern: Pattern },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relator {
    pub word: BraidWord,
    pub provenance: Provenance,
    /// `Br^m` / `Co` notation with 1-based generators.
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    /// 1-based generator names.
    pub generators: Vec<String>,
    pub relators: Vec<Relator>,
}

impl Presentation {
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("< {} |\n", self.generators.join(", "));
        for r in &self.relators {
            s.push_str("  ");
            s.push_str(&r.text);
            s.push('\n');
        }
        s.push('>');
        s
    }
}

fn name(v: usize) -> String {
    format!("b{}", v + 1)
}

fn conj_name(v: usize, by: &[usize]) -> String {
    let tail: String = by.iter().map(|&u| name(u)).collect();
    format!("{}^{{{}}}", name(v), tail)
}

fn word_of(gens: &[usize]) -> BraidWord {
    BraidWord::positive(gens)
}

/// Presentation of `Br(Q, W)` with `W` the classified chordless cycles of `q`.
pub fn presentation_from_wqp(q: &WeightedQuiver) -> Result<Presentation> {
    let n = q.num_vertices();
    let mut relators = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (BraidWord::gen(i), BraidWord::gen(j));
            match q.weight(i, j) {
                2 => relators.push(Relator {
                    word: braid_relator(2, &a, &b),
                    provenance: Provenance::Commute,
                    text: format!("Co({},{})", name(i), name(j)),
                }),
                m => relators.push(Relator {
                    word: braid_relator(m, &a, &b),
                    provenance: Provenance::Arrow { m },
                    text: format!("Br{}({},{})", m, name(i), name(j)),
                }),
            }
        }
    }
    for term in chordless_cycles(q)? {
        let c = &term.cycle;
        let g = |k: usize| BraidWord::gen(c[k]);
        let prov = Provenance::Potential { pattern: term.pattern };
        let mut push = |m: u32, a: BraidWord, b: BraidWord, text: String| {
            let label = if m == 2 { "Co".to_string() } else { "Br".to_string() };
            relators.push(Relator { word: braid_relator(m, &a, &b), provenance: prov, text: format!("{}{}", label, text) });
        };
        match term.pattern {
            Pattern::I => {
                // Co(b2, b1^{bl ... b3})
                let by: Vec<usize> = (2..c.len()).rev().map(|k| c[k]).collect();
                push(2, g(1), g(0).conj(&word_of(&by)), format!("({},{})", name(c[1]), conj_name(c[0], &by)));
            }
            Pattern::II => {
                push(2, g(0), g(2).conj(&g(1)), format!("({},{})", name(c[0]), conj_name(c[2], &[c[1]])));
            }
            Pattern::III => {
                let by = [c[0], c[3]];
                push(2, g(2), g(1).conj(&word_of(&by)), format!("({},{})", name(c[2]), conj_name(c[1], &by)));
            }
            Pattern::IV => {
                let by = [c[2], c[1]];
                push(2, g(0), g(1).conj(&word_of(&by)), format!("({},{})", name(c[0]), conj_name(c[1], &by)));
                push(3, g(0), g(2).conj(&g(1)), format!("({},{})", name(c[0]), conj_name(c[2], &[c[1]])));
            }
        }
    }
    Ok(Presentation { generators: (0..n).map(name).collect(), relators })
}

/// Generator images as words in the standard generators of `Br Delta`.
pub type GeneratorExpression = Vec<BraidWord>;

pub fn identity_expression(n: usize) -> GeneratorExpression {
    (0..n).map(BraidWord::gen).collect()
}

/// Arrows at `i` must be reversed and all others untouched between the two quivers
/// (other arrows may change, so only the incident ones are compared).
fn check_mutation_pair(i: usize, before: &WeightedQuiver, after: &WeightedQuiver) -> Result<()> {
    if before.num_vertices() != after.num_vertices() || i >= before.num_vertices() {
        return Err(Error::QuiverMismatch("vertex sets differ".into()));
    }
    for j in 0..before.num_vertices() {
        if j != i && (before.arrow(i, j) != after.arrow(j, i) || before.arrow(j, i) != after.arrow(i, j)) {
            return Err(Error::QuiverMismatch(format!("arrows between {} and {} are not reversed", i + 1, j + 1)));
        }
    }
    Ok(())
}

/// Transport along `Q -> Q' = mu_i(Q)`: `b'_j -> b_i b_j b_i^{-1}` when `Q'`
/// has an arrow `i -> j`.
pub fn theta_sharp(expr: &[BraidWord], i: usize, q_before: &WeightedQuiver, q_after: &WeightedQuiver) -> Result<GeneratorExpression> {
    check_mutation_pair(i, q_before, q_after)?;
    let bi = &expr[i];
    Ok((0..expr.len())
        .map(|j| if q_after.arrow(i, j).is_some() { expr[j].conj(&bi.inverse()) } else { expr[j].clone() })
        .collect())
}

/// Inverse transport: `b_j -> b'_i^{-1} b'_j b'_i` when `Q` has an arrow `j -> i`.
pub fn theta_flat(expr_after: &[BraidWord], i: usize, q_before: &WeightedQuiver, q_after: &WeightedQuiver) -> Result<GeneratorExpression> {
    check_mutation_pair(i, q_before, q_after)?;
    let bi = &expr_after[i];
    Ok((0..expr_after.len())
        .map(|j| if q_before.arrow(j, i).is_some() { expr_after[j].conj(bi) } else { expr_after[j].clone() })
        .collect())
}

/// `b_i -> prod_{k in f^{-1}(i)} b_k`, fibers in ascending order.
pub fn iota_f(f: &Folding, w: &BraidWord) -> Result<BraidWord> {
    let images: Vec<BraidWord> = f.fibers().iter().map(|fib| BraidWord::positive(fib)).collect();
    w.substitute(&images)
}

/// Image of a word in `W` under `b_i -> s_i`.
pub fn to_coxeter(w: &BraidWord, ctx: &CoxeterContext) -> Result<GroupElement> {
    let mut g = ctx.identity();
    for &(s, _) in w.letters() {
        if s >= ctx.rank() {
            return Err(Error::GeneratorOutOfRange(s + 1));
        }
        ctx.mul_gen_right_in_place(&mut g, s);
    }
    Ok(g)
}

/// Whether every relator dies in `W`, optionally after substituting
/// `assignment[g]` for generator `g`.
pub fn coxeter_check(p: &Presentation, ctx: &CoxeterContext, assignment: Option<&[BraidWord]>) -> Result<bool> {
    for r in &p.relators {
        let w = match assignment {
            Some(a) => r.word.substitute(a)?,
            None => r.word.clone(),
        };
        if !to_coxeter(&w, ctx)?.is_identity() {
            return Ok(false);
        }
    }
    Ok(true)
}
