//! Left-greedy Garside normal forms in spherical Artin groups, and the word
//! problem in the torus-type group `<x, y | x^2 = y^m>`.

use std::sync::Arc;

use crate::braid::BraidWord;
use crate::coxeter::{CoxeterContext, GroupElement};
use crate::error::{Error, Result};

pub const DEFAULT_WORD_CAP: usize = 10_000;

/// `Delta^delta_power * simples[0] * ... ` with the simples left-weighted,
/// none equal to `Delta` and none trivial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub delta_power: i64,
    pub simples: Vec<GroupElement>,
}

/// Garside structure of the Artin group of a finite Coxeter graph.
#[derive(Debug, Clone)]
pub struct Garside {
    ctx: Arc<CoxeterContext>,
    cap: usize,
    /// `s^{-1} = Delta^{-1} * neg_lift[s]`.
    neg_lift: Vec<GroupElement>,
    tau_trivial: bool,
}

impl Garside {
    pub fn new(ctx: Arc<CoxeterContext>) -> Self {
        Self::with_cap(ctx, DEFAULT_WORD_CAP)
    }

    pub fn with_cap(ctx: Arc<CoxeterContext>, cap: usize) -> Self {
        // Delta = s * (s w0), so s^{-1} = (s w0) Delta^{-1} = Delta^{-1} tau(s w0)
        let neg_lift = (0..ctx.rank())
            .map(|s| {
                let r = ctx.mul(&ctx.generator(s), ctx.w0());
                ctx.tau_element(&r)
            })
            .collect();
        let tau_trivial = ctx.tau().iter().enumerate().all(|(i, &j)| i == j);
        Garside { ctx, cap, neg_lift, tau_trivial }
    }

    pub fn context(&self) -> &Arc<CoxeterContext> {
        &self.ctx
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn tau(&self, w: &GroupElement) -> GroupElement {
        if self.tau_trivial {
            w.clone()
        } else {
            self.ctx.tau_element(w)
        }
    }

    /// Makes `(a, b)` left-weighted by moving left descents of `b` into `a`.
    /// Returns whether anything moved.
    fn weight_pair(&self, a: &mut GroupElement, b: &mut GroupElement) -> bool {
        let ctx = &*self.ctx;
        let mut changed = false;
        loop {
            let Some(s) = (0..ctx.rank()).find(|&s| ctx.is_left_descent(b, s) && !ctx.is_right_descent(a, s)) else {
                return changed;
            };
            ctx.mul_gen_right_in_place(a, s);
            ctx.mul_gen_left_in_place(s, b);
            changed = true;
        }
    }

    /// Appends a simple on the right of a left-weighted sequence.
    fn push_simple(&self, simples: &mut Vec<GroupElement>, x: GroupElement) {
        if x.is_identity() {
            return;
        }
        simples.push(x);
        let mut i = simples.len() - 1;
        while i > 0 {
            let (left, right) = simples.split_at_mut(i);
            let changed = self.weight_pair(&mut left[i - 1], &mut right[0]);
            if right[0].is_identity() {
                simples.remove(i);
            }
            if !changed {
                break;
            }
            i -= 1;
        }
    }

    pub fn normal_form(&self, w: &BraidWord) -> Result<NormalForm> {
        if w.len() > self.cap {
            return Err(Error::WordTooLong { len: w.len(), cap: self.cap });
        }
        let n = self.ctx.rank();
        if let Some(g) = w.max_generator().filter(|&g| g >= n) {
            return Err(Error::GeneratorOutOfRange(g + 1));
        }
        // w = Delta^{-k} y_1 ... y_r, y_p twisted once per inverse letter after it
        let letters = w.letters();
        let mut twisted = vec![false; letters.len()];
        let mut parity = false;
        let mut k = 0i64;
        for (p, &(_, e)) in letters.iter().enumerate().rev() {
            // a letter's own Delta^{-1} already sits left of its factor
            twisted[p] = parity;
            if e < 0 {
                k += 1;
                parity = !parity;
            }
        }
        let mut simples: Vec<GroupElement> = Vec::new();
        for (p, &(s, e)) in letters.iter().enumerate() {
            let y = if e > 0 { self.ctx.generator(s) } else { self.neg_lift[s].clone() };
            let y = if twisted[p] { self.tau(&y) } else { y };
            self.push_simple(&mut simples, y);
        }
        let top = self.ctx.num_positive_roots();
        let lead = simples.iter().take_while(|x| x.length() == top).count();
        simples.drain(..lead);
        Ok(NormalForm { delta_power: lead as i64 - k, simples })
    }

    pub fn equal(&self, u: &BraidWord, v: &BraidWord) -> Result<bool> {
        Ok(self.normal_form(u)? == self.normal_form(v)?)
    }

    /// Whether `w` is trivial.
    pub fn is_trivial(&self, w: &BraidWord) -> Result<bool> {
        let nf = self.normal_form(w)?;
        Ok(nf.delta_power == 0 && nf.simples.is_empty())
    }

    /// Positive word for `Delta`.
    pub fn delta_word(&self) -> BraidWord {
        BraidWord::positive(self.ctx.w0_word())
    }

    fn simple_word(&self, x: &GroupElement) -> BraidWord {
        BraidWord::positive(&self.ctx.reduced_word(x))
    }

    /// A word representing the normal form. Negative powers of `Delta` are
    /// merged into the first simples via `Delta^{-1} x = (x^{-1} Delta)^{-1}`.
    pub fn to_word(&self, nf: &NormalForm) -> BraidWord {
        let ctx = &*self.ctx;
        let mut out = BraidWord::empty();
        if nf.delta_power >= 0 {
            out = self.delta_word().pow(nf.delta_power as usize);
            for x in &nf.simples {
                out = out.mul(&self.simple_word(x));
            }
            return out;
        }
        let k = (-nf.delta_power) as usize;
        let r = nf.simples.len();
        for (i, x) in nf.simples.iter().enumerate().take(k) {
            // factor (d tau^{k-1-i}(x))^{-1}, d x = x^{-1} w0
            let t = if (k - 1 - i) % 2 == 1 { self.tau(x) } else { x.clone() };
            let comp = ctx.mul(&ctx.inverse(&t), ctx.w0());
            out = out.mul(&self.simple_word(&comp).inverse());
        }
        if k > r {
            out = out.mul(&self.delta_word().inverse().pow(k - r));
        }
        for x in nf.simples.iter().skip(k) {
            out = out.mul(&self.simple_word(x));
        }
        out
    }

    /// The shorter of `w` and the word of its normal form.
    pub fn shorten(&self, w: &BraidWord) -> Result<BraidWord> {
        let v = self.to_word(&self.normal_form(w)?);
        Ok(if v.len() < w.len() { v } else { w.clone() })
    }
}

/// Letters of words in `x` and `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusLetter {
    X(i64),
    Y(i64),
}

/// Parses `"x y^3 x^-1 y"`.
pub fn parse_torus_word(s: &str) -> Result<Vec<TorusLetter>> {
    s.split_whitespace()
        .map(|tok| {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in {:?}", tok)))?),
                None => (tok, 1),
            };
            match base {
                "x" => Ok(TorusLetter::X(exp)),
                "y" => Ok(TorusLetter::Y(exp)),
                _ => Err(Error::Parse(format!("unknown letter {:?}", tok))),
            }
        })
        .collect()
}

/// Normal form `z^central * syllables` in `<x, y | x^2 = y^m>` with `z = x^2`
/// central; syllables alternate between `x` (`false`, exponent 1) and `y^e`
/// (`true`, `1 <= e < m`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusWord {
    pub central: i64,
    pub syllables: Vec<(bool, i64)>,
}

/// Normal form of a word; `true` marks a `y` syllable.
pub fn torus_normal_form(w: &[TorusLetter], m: i64) -> TorusWord {
    assert!(m >= 2);
    let mut central = 0i64;
    let mut syl: Vec<(bool, i64)> = Vec::new();
    for &l in w {
        let (is_y, e, order) = match l {
            TorusLetter::X(e) => (false, e, 2),
            TorusLetter::Y(e) => (true, e, m),
        };
        // x^e = z^{floor(e/2)} x^{e mod 2}, likewise for y
        central += e.div_euclid(order);
        let r = e.rem_euclid(order);
        if r == 0 {
            continue;
        }
        match syl.last_mut() {
            Some((last_y, le)) if *last_y == is_y => {
                let total = *le + r;
                central += total / order;
                if total % order == 0 {
                    syl.pop();
                } else {
                    *le = total % order;
                }
            }
            _ => syl.push((is_y, r)),
        }
    }
    TorusWord { central, syllables: syl }
}

pub fn torus_equal(u: &[TorusLetter], v: &[TorusLetter], m: i64) -> bool {
    torus_normal_form(u, m) == torus_normal_form(v, m)
}
