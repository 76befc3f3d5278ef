//! Exact arithmetic in the real cyclotomic rings `Z[2cos(pi/L)]` and integer
//! Smith normal form.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::{BigRational, Rational64};
use num::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Integer polynomial, coefficients in increasing degree.
pub type IntPoly = Vec<i64>;

fn poly_trim(p: &mut IntPoly) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

/// Exact division of integer polynomials by a monic divisor.
fn poly_div_monic(num: &[i64], den: &[i64]) -> IntPoly {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert_eq!(*den.last().unwrap(), 1);
    if rem.len() <= dd {
        return vec![0];
    }
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// The cyclotomic polynomial `Phi_n`.
pub fn cyclotomic_polynomial(n: u32) -> IntPoly {
    assert!(n >= 1);
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_monic(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

/// Chebyshev-type polynomials `P_k` with `P_k(2cos a) = 2cos(k a)`.
fn chebyshev_2cos(k: usize) -> IntPoly {
    let mut prev: IntPoly = vec![2];
    if k == 0 {
        return prev;
    }
    let mut cur: IntPoly = vec![0, 1];
    for _ in 1..k {
        let mut next = vec![0i64; cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        poly_trim(&mut next);
        prev = cur;
        cur = next;
    }
    cur
}

/// Monic minimal polynomial of `2cos(pi/L)` over the rationals.
pub fn minimal_polynomial(level: u32) -> IntPoly {
    assert!(level >= 1, "level must be positive");
    match level {
        1 => return vec![2, 1],
        2 => return vec![0, 1],
        _ => {}
    }
    // Phi_{2L} is palindromic of even degree 2d; rewrite x^{-d} Phi(x) in t = x + 1/x.
    let phi = cyclotomic_polynomial(2 * level);
    let d = (phi.len() - 1) / 2;
    let mut out: IntPoly = vec![phi[d]];
    for k in 1..=d {
        let pk = chebyshev_2cos(k);
        if out.len() < pk.len() {
            out.resize(pk.len(), 0);
        }
        for (i, &c) in pk.iter().enumerate() {
            out[i] += phi[d + k] * c;
        }
    }
    poly_trim(&mut out);
    out
}

struct RingData {
    level: u32,
    modulus: IntPoly,
    /// Rational isolating interval for `2cos(pi/L)`, refined on demand.
    approx: f64,
}

/// Handle for the ring `Z[theta_L]`, `theta_L = 2cos(pi/L)`.
#[derive(Clone)]
pub struct CycloRing(Arc<RingData>);

impl fmt::Debug for CycloRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloRing(L={})", self.0.level)
    }
}

impl PartialEq for CycloRing {
    fn eq(&self, other: &Self) -> bool {
        self.0.level == other.0.level
    }
}
impl Eq for CycloRing {}

impl CycloRing {
    pub fn new(level: u32) -> Self {
        let modulus = minimal_polynomial(level);
        let approx = 2.0 * (std::f64::consts::PI / level as f64).cos();
        CycloRing(Arc::new(RingData { level, modulus, approx }))
    }

    pub fn level(&self) -> u32 {
        self.0.level
    }

    pub fn degree(&self) -> usize {
        self.0.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[i64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> CycloReal {
        CycloReal { ring: self.clone(), coeffs: vec![Rational64::zero(); self.degree()] }
    }

    pub fn from_int(&self, n: i64) -> CycloReal {
        self.from_poly(&[n])
    }

    pub fn one(&self) -> CycloReal {
        self.from_int(1)
    }

    /// `theta_L` itself.
    pub fn theta(&self) -> CycloReal {
        self.from_poly(&[0, 1])
    }

    /// `2cos(pi/m)` for `m` dividing the level.
    pub fn two_cos_pi_over(&self, m: u32) -> Result<CycloReal> {
        if m == 0 || !self.level().is_multiple_of(m) {
            return Err(Error::LevelMismatch(self.level(), m));
        }
        Ok(self.from_poly(&chebyshev_2cos((self.level() / m) as usize)))
    }

    /// Reduces an integer polynomial in `theta` modulo the minimal polynomial.
    pub fn from_poly(&self, p: &[i64]) -> CycloReal {
        let coeffs: Vec<Rational64> = p.iter().map(|&c| Rational64::from_integer(c)).collect();
        self.reduce(coeffs)
    }

    pub fn from_rational_coeffs(&self, coeffs: Vec<Rational64>) -> CycloReal {
        self.reduce(coeffs)
    }

    fn reduce(&self, mut c: Vec<Rational64>) -> CycloReal {
        let m = &self.0.modulus;
        let d = m.len() - 1;
        while c.len() > d {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = c.len() - d;
            for (i, &mi) in m.iter().take(d).enumerate() {
                c[shift + i] -= top * Rational64::from_integer(mi);
            }
        }
        c.resize(d, Rational64::zero());
        CycloReal { ring: self.clone(), coeffs: c }
    }
}

/// An element of `Z[2cos(pi/L)]` (rational coefficients allowed), stored as a
/// residue modulo the minimal polynomial.
#[derive(Clone)]
pub struct CycloReal {
    ring: CycloRing,
    coeffs: Vec<Rational64>,
}

impl fmt::Debug for CycloReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{}", c),
                1 => format!("{}*t", c),
                _ => format!("{}*t^{}", c, i),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl PartialEq for CycloReal {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.coeffs == other.coeffs
    }
}
impl Eq for CycloReal {}

impl Hash for CycloReal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ring.level().hash(state);
        self.coeffs.hash(state);
    }
}

/// Ring operation selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn arith(a: &CycloReal, b: &CycloReal, op: ArithOp) -> Result<CycloReal> {
    if a.ring != b.ring {
        return Err(Error::LevelMismatch(a.ring.level(), b.ring.level()));
    }
    Ok(match op {
        ArithOp::Add => a.add_unchecked(b),
        ArithOp::Sub => a.sub_unchecked(b),
        ArithOp::Mul => a.mul_unchecked(b),
    })
}

impl CycloReal {
    pub fn ring(&self) -> &CycloRing {
        &self.ring
    }

    pub fn level(&self) -> u32 {
        self.ring.level()
    }

    pub fn coeffs(&self) -> &[Rational64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        arith(self, other, ArithOp::Add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        arith(self, other, ArithOp::Sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        arith(self, other, ArithOp::Mul)
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        CycloReal { ring: self.ring.clone(), coeffs }
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        CycloReal { ring: self.ring.clone(), coeffs }
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.coeffs.len();
        if self.is_zero() || other.is_zero() {
            return self.ring.zero();
        }
        let mut prod = vec![Rational64::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        self.ring.reduce(prod)
    }

    pub fn neg(&self) -> Self {
        CycloReal { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Floating approximation under `theta -> 2cos(pi/L)`.
    pub fn to_f64(&self) -> f64 {
        let t = self.ring.0.approx;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact sign under the real embedding `theta -> 2cos(pi/L)`.
    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let (mut lo, mut hi) = isolate_root(&self.ring);
        let coeffs: Vec<BigRational> = self
            .coeffs
            .iter()
            .map(|c| BigRational::new(BigInt::from(*c.numer()), BigInt::from(*c.denom())))
            .collect();
        loop {
            let (vlo, vhi) = eval_interval(&coeffs, &lo, &hi);
            if vlo.is_positive() {
                return 1;
            }
            if vhi.is_negative() {
                return -1;
            }
            refine(&self.ring, &mut lo, &mut hi);
        }
    }

    pub fn cmp_real(&self, other: &Self) -> Result<Ordering> {
        Ok(match self.sub(other)?.sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }
}

fn eval_big(poly: &[i64], x: &BigRational) -> BigRational {
    poly.iter()
        .rev()
        .fold(BigRational::zero(), |acc, &c| acc * x + BigRational::from_integer(BigInt::from(c)))
}

fn to_big(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Rational interval containing `2cos(pi/L)` and no other root of the modulus.
fn isolate_root(ring: &CycloRing) -> (BigRational, BigRational) {
    let t = ring.0.approx;
    let m = ring.modulus();
    if m.len() == 2 {
        // linear modulus: the root is rational
        let r = BigRational::from_integer(BigInt::from(-m[0]));
        return (r.clone(), r);
    }
    let mut eps = 1e-9;
    loop {
        let lo = to_big(t - eps);
        let hi = to_big(t + eps);
        let slo = eval_big(m, &lo);
        let shi = eval_big(m, &hi);
        if (slo.is_negative() && shi.is_positive()) || (slo.is_positive() && shi.is_negative()) {
            return (lo, hi);
        }
        eps *= 2.0;
        assert!(eps < 1e-3, "failed to isolate 2cos(pi/{})", ring.level());
    }
}

fn refine(ring: &CycloRing, lo: &mut BigRational, hi: &mut BigRational) {
    if lo == hi {
        return;
    }
    let m = ring.modulus();
    let mid = (lo.clone() + hi.clone()) / BigRational::from_integer(BigInt::from(2));
    let slo = eval_big(m, lo).signum();
    let smid = eval_big(m, &mid).signum();
    if smid.is_zero() {
        *lo = mid.clone();
        *hi = mid;
    } else if smid == slo {
        *lo = mid;
    } else {
        *hi = mid;
    }
}

/// Interval evaluation of a polynomial over `[lo, hi]`.
fn eval_interval(coeffs: &[BigRational], lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
    let mut acc_lo = BigRational::zero();
    let mut acc_hi = BigRational::zero();
    for c in coeffs.iter().rev() {
        let cands = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
        let mn = cands.iter().min().unwrap().clone();
        let mx = cands.iter().max().unwrap().clone();
        acc_lo = mn + c;
        acc_hi = mx + c;
    }
    (acc_lo, acc_hi)
}

/// Dense integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        IntMatrix { rows: r, cols: c, data: rows.concat() }
    }

    pub fn diag(rows: usize, cols: usize, d: &[i128]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Diagonal entries `(0,0), (1,1), ...`.
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i128) {
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += k * v;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, k: i128) {
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += k * v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form: diagonal, nonnegative, each entry dividing the next.
pub fn smith_normal_form(m: &IntMatrix) -> IntMatrix {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize, i128)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = a[(i, j)].abs();
                if v != 0 && best.is_none_or(|(_, _, b)| v < b) {
                    best = Some((i, j, v));
                    if v == 1 {
                        break;
                    }
                }
            }
            if best.is_some_and(|b| b.2 == 1) {
                break;
            }
        }
        let Some((pi, pj, _)) = best else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let p = a[(t, t)];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[(i, t)] / p;
                if q != 0 {
                    a.add_row(i, t, -q);
                }
                if a[(i, t)] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = a[(t, j)] / p;
                if q != 0 {
                    a.add_col(j, t, -q);
                }
                if a[(t, j)] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // pivot must divide the remaining block
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| a[(i, j)] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        a.add_row(t, i, 1);
                        continue;
                    }
                }
            }
            // move the smallest remainder of row/column t into the pivot
            let mut best = (t, t, a[(t, t)].abs());
            for i in t + 1..rows {
                let v = a[(i, t)].abs();
                if v != 0 && v < best.2 {
                    best = (i, t, v);
                }
            }
            for j in t + 1..cols {
                let v = a[(t, j)].abs();
                if v != 0 && v < best.2 {
                    best = (t, j, v);
                }
            }
            a.swap_rows(t, best.0);
            a.swap_cols(t, best.1);
        }
        if a[(t, t)] < 0 {
            for j in 0..cols {
                a[(t, j)] = -a[(t, j)];
            }
        }
        t += 1;
    }
    a
}

/// Numeric rank of an integer matrix via its Smith form.
pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).diagonal().iter().filter(|&&d| d != 0).count()
}

/// Evaluates an integer polynomial at a real point (used by root witnesses).
pub fn eval_f64(poly: &[i64], x: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
}
