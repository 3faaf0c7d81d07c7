use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{c, C64, ONE, ZERO};
use crate::quadratic::QuadraticForm;

/// Per-mode exponents `(p_i, q_i)` of `Π_i (a_i†)^{p_i} (a_i)^{q_i}`.
pub type Monomial = Vec<(u32, u32)>;

/// Canonical normal-ordered polynomial in ladder operators.
///
/// Monomials are ordered by mode index with creators to the left inside each
/// mode. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderPolynomial {
    n_modes: usize,
    terms: BTreeMap<Monomial, C64>,
}

/// One ladder operator in a raw (not yet ordered) word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Sum of coefficient-weighted operator words, in arbitrary order.
#[derive(Debug, Clone, Default)]
pub struct RawExpr {
    pub terms: Vec<(C64, Vec<Ladder>)>,
}

impl RawExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, coeff: C64, word: Vec<Ladder>) -> Self {
        self.terms.push((coeff, word));
        self
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

pub(crate) fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// `(a†)^p a^q (a†)^r a^s` as `Σ_k coeff_k (a†)^{p+r−k} a^{q+s−k}`.
pub(crate) fn single_mode_product(p: u32, q: u32, r: u32, s: u32) -> Vec<(u128, (u32, u32))> {
    (0..=q.min(r))
        .map(|k| {
            let w = factorial(k) * binomial(q, k) * binomial(r, k);
            (w, (p + r - k, q + s - k))
        })
        .collect()
}

/// `a^p (a†)^q` in normal order.
pub(crate) fn antinormal_to_normal(p: u32, q: u32) -> Vec<(u128, (u32, u32))> {
    single_mode_product(0, p, q, 0)
}

impl LadderPolynomial {
    pub fn zero(n_modes: usize) -> Self {
        Self { n_modes, terms: BTreeMap::new() }
    }

    pub fn constant(n_modes: usize, value: C64) -> Self {
        let mut p = Self::zero(n_modes);
        p.add_term(vec![(0, 0); n_modes], value);
        p
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::constant(n_modes, ONE)
    }

    pub fn monomial(n_modes: usize, key: Monomial, coeff: C64) -> Self {
        assert_eq!(key.len(), n_modes, "monomial key length must equal the mode count");
        let mut p = Self::zero(n_modes);
        p.add_term(key, coeff);
        p
    }

    fn single(n_modes: usize, mode: usize, exps: (u32, u32)) -> Self {
        assert!(mode < n_modes, "mode {mode} out of range for {n_modes} modes");
        let mut key = vec![(0, 0); n_modes];
        key[mode] = exps;
        Self::monomial(n_modes, key, ONE)
    }

    pub fn annihilation(n_modes: usize, mode: usize) -> Self {
        Self::single(n_modes, mode, (0, 1))
    }

    pub fn creation(n_modes: usize, mode: usize) -> Self {
        Self::single(n_modes, mode, (1, 0))
    }

    pub fn number(n_modes: usize, mode: usize) -> Self {
        Self::single(n_modes, mode, (1, 1))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, C64> {
        &self.terms
    }

    pub fn coefficient(&self, key: &[(u32, u32)]) -> C64 {
        self.terms.get(key).copied().unwrap_or(ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff` to the term `key`, dropping it if the sum is exactly zero.
    pub fn add_term(&mut self, key: Monomial, coeff: C64) {
        debug_assert_eq!(key.len(), self.n_modes);
        if coeff == ZERO {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let sum = *e.get() + coeff;
                if sum == ZERO {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.n_modes);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * s);
        }
        out
    }

    /// Total degree of the highest-degree term (`None` for the zero polynomial).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.iter().map(|(p, q)| p + q).sum()).max()
    }

    /// Hermitian adjoint; normal order is preserved term by term.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for (k, v) in &self.terms {
            let key = k.iter().map(|&(p, q)| (q, p)).collect();
            out.add_term(key, v.conj());
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.n_modes);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (k, v) in &self.terms {
            d = d.max((v - other.coefficient(k)).norm());
        }
        for (k, v) in &other.terms {
            if !self.terms.contains_key(k) {
                d = d.max(v.norm());
            }
        }
        d
    }

    /// Drops terms with `|coeff| ≤ tol`.
    pub fn chop(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.n_modes);
        for (k, v) in &self.terms {
            if v.norm() > tol {
                out.add_term(k.clone(), *v);
            }
        }
        out
    }

    /// Substitutes `a_m → a_m + shift_m`, `a_m† → a_m† + conj(shift_m)` for every mode.
    pub fn displace(&self, shifts: &[C64]) -> Self {
        assert_eq!(shifts.len(), self.n_modes);
        let n = self.n_modes;
        let mut out = Self::zero(n);
        for (key, coeff) in &self.terms {
            let mut acc = Self::constant(n, *coeff);
            for (m, &(p, q)) in key.iter().enumerate() {
                if p == 0 && q == 0 {
                    continue;
                }
                let ad = &Self::creation(n, m) + &Self::constant(n, shifts[m].conj());
                let a = &Self::annihilation(n, m) + &Self::constant(n, shifts[m]);
                acc = &(&acc * &ad.pow(p)) * &a.pow(q);
            }
            out = &out + &acc;
        }
        out
    }

    /// One term per line: `coeff_re coeff_im : (p_1,q_1)...(p_N,q_N)`, sorted by key.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.terms {
            let _ = write!(s, "{:e} {:e} :", v.re, v.im);
            s.push(' ');
            for (p, q) in k {
                let _ = write!(s, "({p},{q})");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(n_modes: usize, text: &str) -> Result<Self> {
        let mut out = Self::zero(n_modes);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}: {line:?}", lineno + 1));
            let (coeffs, key) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
            let mut it = coeffs.split_whitespace();
            let re: f64 = it.next().ok_or_else(|| bad("missing real part"))?.parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = it.next().ok_or_else(|| bad("missing imaginary part"))?.parse().map_err(|_| bad("bad imaginary part"))?;
            if it.next().is_some() {
                return Err(bad("trailing coefficient data"));
            }
            let mut mono = Vec::with_capacity(n_modes);
            for chunk in key.trim().split(')').filter(|s| !s.trim().is_empty()) {
                let body = chunk.trim().strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
                let (p, q) = body.split_once(',').ok_or_else(|| bad("expected 'p,q'"))?;
                let p: u32 = p.trim().parse().map_err(|_| bad("bad exponent"))?;
                let q: u32 = q.trim().parse().map_err(|_| bad("bad exponent"))?;
                mono.push((p, q));
            }
            if mono.len() != n_modes {
                return Err(bad("wrong number of modes"));
            }
            out.add_term(mono, c(re, im));
        }
        Ok(out)
    }

    pub fn from_quadratic(q: &QuadraticForm) -> Self {
        let n = q.n_modes();
        let mut out = Self::constant(n, q.c0());
        let key2 = |i: usize, ei: (u32, u32), j: usize, ej: (u32, u32)| {
            let mut k = vec![(0u32, 0u32); n];
            k[i] = (k[i].0 + ei.0, k[i].1 + ei.1);
            k[j] = (k[j].0 + ej.0, k[j].1 + ej.1);
            k
        };
        for i in 0..n {
            for j in 0..n {
                out.add_term(key2(i, (1, 0), j, (0, 1)), q.m().read(i, j));
                out.add_term(key2(i, (1, 0), j, (1, 0)), q.p().read(i, j) * 0.5);
                out.add_term(key2(i, (0, 1), j, (0, 1)), q.q().read(i, j) * 0.5);
            }
        }
        out
    }

    /// Reads back a quadratic form; fails on linear or higher-degree terms.
    pub fn to_quadratic(&self) -> Result<QuadraticForm> {
        let n = self.n_modes;
        let mut m: Mat<C64> = Mat::zeros(n, n);
        let mut p: Mat<C64> = Mat::zeros(n, n);
        let mut q: Mat<C64> = Mat::zeros(n, n);
        let mut c0 = ZERO;
        for (key, &v) in &self.terms {
            let nz: Vec<(usize, (u32, u32))> =
                key.iter().cloned().enumerate().filter(|(_, e)| *e != (0, 0)).collect();
            let deg: u32 = key.iter().map(|(a, b)| a + b).sum();
            match (deg, nz.as_slice()) {
                (0, _) => c0 += v,
                (2, [(i, (1, 1))]) => m.write(*i, *i, m.read(*i, *i) + v),
                (2, [(i, (2, 0))]) => p.write(*i, *i, p.read(*i, *i) + v * 2.0),
                (2, [(i, (0, 2))]) => q.write(*i, *i, q.read(*i, *i) + v * 2.0),
                (2, [(i, ei), (j, ej)]) => {
                    let (i, j) = (*i, *j);
                    match (ei, ej) {
                        ((1, 0), (0, 1)) => m.write(i, j, m.read(i, j) + v),
                        ((0, 1), (1, 0)) => m.write(j, i, m.read(j, i) + v),
                        ((1, 0), (1, 0)) => {
                            p.write(i, j, p.read(i, j) + v);
                            p.write(j, i, p.read(j, i) + v);
                        }
                        _ => {
                            q.write(i, j, q.read(i, j) + v);
                            q.write(j, i, q.read(j, i) + v);
                        }
                    }
                }
                _ => {
                    return Err(Error::NotQuadratic(format!(
                        "term of degree {deg} with key {key:?}"
                    )))
                }
            }
        }
        QuadraticForm::new(m, p, q, c0)
    }
}

/// Normal-orders a raw operator expression.
pub fn normal_order(expr: &RawExpr, n_modes: usize) -> LadderPolynomial {
    let mut out = LadderPolynomial::zero(n_modes);
    for (coeff, word) in &expr.terms {
        let mut acc = LadderPolynomial::constant(n_modes, *coeff);
        for op in word {
            let f = match *op {
                Ladder::Create(m) => LadderPolynomial::creation(n_modes, m),
                Ladder::Annihilate(m) => LadderPolynomial::annihilation(n_modes, m),
            };
            acc = &acc * &f;
        }
        out = &out + &acc;
    }
    out
}

impl<'a> Add<&'a LadderPolynomial> for &'a LadderPolynomial {
    type Output = LadderPolynomial;
    fn add(self, rhs: &LadderPolynomial) -> LadderPolynomial {
        assert_eq!(self.n_modes, rhs.n_modes, "mode count mismatch");
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(k.clone(), *v);
        }
        out
    }
}

impl<'a> Sub<&'a LadderPolynomial> for &'a LadderPolynomial {
    type Output = LadderPolynomial;
    fn sub(self, rhs: &LadderPolynomial) -> LadderPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &LadderPolynomial {
    type Output = LadderPolynomial;
    fn neg(self) -> LadderPolynomial {
        self.scale(-ONE)
    }
}

impl<'a> Mul<&'a LadderPolynomial> for &'a LadderPolynomial {
    type Output = LadderPolynomial;
    fn mul(self, rhs: &LadderPolynomial) -> LadderPolynomial {
        assert_eq!(self.n_modes, rhs.n_modes, "mode count mismatch");
        let n = self.n_modes;
        let mut out = LadderPolynomial::zero(n);
        for (k1, v1) in &self.terms {
            for (k2, v2) in &rhs.terms {
                // Cartesian product of per-mode expansions.
                let mut partial: Vec<(u128, Monomial)> = vec![(1, Vec::with_capacity(n))];
                for m in 0..n {
                    let (p, q) = k1[m];
                    let (r, s) = k2[m];
                    let exp = single_mode_product(p, q, r, s);
                    let mut next = Vec::with_capacity(partial.len() * exp.len());
                    for (w, key) in &partial {
                        for (w2, e) in &exp {
                            let mut k = key.clone();
                            k.push(*e);
                            next.push((w * w2, k));
                        }
                    }
                    partial = next;
                }
                let base = v1 * v2;
                for (w, key) in partial {
                    out.add_term(key, base * (w as f64));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_adag_reorders() {
        let expr = RawExpr::new().term(ONE, vec![Ladder::Annihilate(0), Ladder::Create(0)]);
        let p = normal_order(&expr, 1);
        let want = &LadderPolynomial::number(1, 0) + &LadderPolynomial::identity(1);
        assert_eq!(p, want);
    }

    #[test]
    fn a2_adag2_reorders() {
        use Ladder::*;
        let expr = RawExpr::new().term(ONE, vec![Annihilate(0), Annihilate(0), Create(0), Create(0)]);
        let p = normal_order(&expr, 1);
        assert_eq!(p.coefficient(&[(2, 2)]), c(1.0, 0.0));
        assert_eq!(p.coefficient(&[(1, 1)]), c(4.0, 0.0));
        assert_eq!(p.coefficient(&[(0, 0)]), c(2.0, 0.0));
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn normal_input_is_unchanged() {
        use Ladder::*;
        let expr = RawExpr::new().term(c(0.5, -1.0), vec![Create(0), Create(1), Annihilate(0), Annihilate(1)]);
        let p = normal_order(&expr, 2);
        assert_eq!(p, LadderPolynomial::monomial(2, vec![(1, 1), (1, 1)], c(0.5, -1.0)));
        assert_eq!(normal_order(&expr, 2), p);
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let n = LadderPolynomial::number(1, 0);
        assert!((&n - &n).is_zero());
    }

    #[test]
    fn text_round_trip() {
        let mut p = LadderPolynomial::zero(2);
        p.add_term(vec![(1, 0), (0, 2)], c(0.25, -3.0));
        p.add_term(vec![(0, 0), (0, 0)], c(-1.0, 0.0));
        let text = p.to_text();
        assert_eq!(text.lines().next().unwrap(), "-1e0 0e0 : (0,0)(0,0)");
        assert_eq!(LadderPolynomial::from_text(2, &text).unwrap(), p);
    }

    #[test]
    fn quadratic_round_trip() {
        let mut q = QuadraticForm::zeros(2);
        q.add_hopping(0, 1, c(0.3, 0.2));
        q.add_pair_creation(0, 0, c(1.5, 0.0));
        q.add_pair_annihilation(0, 1, c(0.0, 0.7));
        q.add_constant(c(2.0, 0.0));
        let back = LadderPolynomial::from_quadratic(&q).to_quadratic().unwrap();
        assert_eq!(back.max_abs_diff(&q), 0.0);
    }

    #[test]
    fn linear_term_is_not_quadratic() {
        let p = LadderPolynomial::annihilation(1, 0);
        assert!(matches!(p.to_quadratic(), Err(Error::NotQuadratic(_))));
    }

    #[test]
    fn displaced_number_operator() {
        let abar = c(0.5, -1.0);
        let p = LadderPolynomial::number(1, 0).displace(&[abar]);
        assert_eq!(p.coefficient(&[(1, 1)]), ONE);
        assert_eq!(p.coefficient(&[(1, 0)]), abar);
        assert_eq!(p.coefficient(&[(0, 1)]), abar.conj());
        assert_eq!(p.coefficient(&[(0, 0)]), abar.conj() * abar);
    }
}
