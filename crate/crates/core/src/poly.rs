//! Sparse multivariate polynomials over an exact scalar ring.
//!
//! Variable 0 is the distinguished coordinate `y`; variables `1..=d` are the
//! parameters `u_1..u_d`. Terms are kept in a `BTreeMap` keyed by exponent
//! vectors, so the lexicographic order on exponents (with `y` most
//! significant) doubles as the monomial order for division.

use std::collections::BTreeMap;
use std::fmt;

use crate::exactnum::{scalar_root, Characteristic, Scalar};

pub type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    ch: Characteristic,
    nvars: usize,
    terms: BTreeMap<Exponents, Scalar>,
}

impl Polynomial {
    pub fn zero(ch: Characteristic, nvars: usize) -> Self {
        Polynomial { ch, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ch: Characteristic, nvars: usize, c: Scalar) -> Self {
        Self::monomial(ch, nvars, vec![0; nvars], c)
    }

    pub fn one(ch: Characteristic, nvars: usize) -> Self {
        Self::constant(ch, nvars, ch.one())
    }

    pub fn var(ch: Characteristic, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(ch, nvars, e, ch.one())
    }

    pub fn monomial(ch: Characteristic, nvars: usize, exps: Exponents, c: Scalar) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(ch, nvars);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(ch: Characteristic, nvars: usize, terms: impl IntoIterator<Item = (Exponents, Scalar)>) -> Self {
        let mut p = Self::zero(ch, nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Adds `c · x^e` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: Exponents, c: Scalar) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn characteristic(&self) -> Characteristic {
        self.ch
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(|| self.ch.zero())
    }

    pub fn coefficient(&self, e: &[u32]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(|| self.ch.zero())
    }

    pub fn leading(&self) -> Option<(&Exponents, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn used_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.uses_var(v)).collect()
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        Polynomial::from_terms(self.ch, self.nvars, self.terms.iter().map(|(e, s)| (e.clone(), s * c)))
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { ch: self.ch, nvars: self.nvars, terms: self.terms.iter().map(|(e, s)| (e.clone(), -s)).collect() }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.ch, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, e: &[u32], c: &Scalar) -> Polynomial {
        Polynomial::from_terms(
            self.ch,
            self.nvars,
            self.terms.iter().map(|(e1, c1)| (e1.iter().zip(e).map(|(a, b)| a + b).collect(), c1 * c)),
        )
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.ch, self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Coefficients with respect to `var`: entry `k` collects the terms of
    /// `var`-degree `k`, with that exponent cleared.
    pub fn univariate_coeffs(&self, var: usize) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(self.ch, self.nvars); self.degree(var) as usize + 1];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            let mut e2 = e.clone();
            e2[var] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    pub fn coeff_in(&self, var: usize, k: u32) -> Polynomial {
        let mut out = Polynomial::zero(self.ch, self.nvars);
        for (e, c) in &self.terms {
            if e[var] == k {
                let mut e2 = e.clone();
                e2[var] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.ch, self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                out.add_term(e2, c * &c.from_u64_like(e[var] as u64));
            }
        }
        out
    }

    /// Replaces `var` by the polynomial `g`.
    pub fn substitute(&self, var: usize, g: &Polynomial) -> Polynomial {
        let coeffs = self.univariate_coeffs(var);
        let mut acc = Polynomial::zero(self.ch, self.nvars);
        for c in coeffs.iter().rev() {
            acc = acc.mul(g).add(c);
        }
        acc
    }

    /// Sets every listed variable to zero.
    pub fn kill_vars(&self, vars: &[usize]) -> Polynomial {
        Polynomial::from_terms(
            self.ch,
            self.nvars,
            self.terms
                .iter()
                .filter(|(e, _)| vars.iter().all(|&v| e[v] == 0))
                .map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    /// Applies a scalar map and moves to another characteristic.
    pub fn map_scalars(&self, ch: Characteristic, f: impl Fn(&Scalar) -> Scalar) -> Polynomial {
        Polynomial::from_terms(ch, self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    /// Reinterprets the coefficients in another mode: rationals and mixed
    /// scalars are interchangeable, residues lift to `0..p`, rationals reduce
    /// modulo `p`.
    pub fn with_characteristic(&self, ch: Characteristic) -> Polynomial {
        let src = self.ch;
        self.map_scalars(ch, |c| match (c, ch) {
            (Scalar::Residue { value, .. }, _) => ch.from_int(*value as i64),
            (Scalar::Rational(q), Characteristic::FiniteField { .. }) => {
                ch.from_rational(q).unwrap_or_else(|_| panic!("{q} is not integral in {ch:?} (from {src:?})"))
            }
            _ => c.clone(),
        })
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            Some((_, c)) if !c.is_one() => self.scale(&c.inv().expect("leading coefficient is nonzero")),
            _ => self.clone(),
        }
    }

    /// Exact quotient `self / b`, or `None` if `b` does not divide `self`.
    pub fn div_exact(&self, b: &Polynomial) -> Option<Polynomial> {
        assert!(!b.is_zero(), "division by zero polynomial");
        let (lb, cb) = b.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let cb_inv = cb.inv()?;
        let mut q = Polynomial::zero(self.ch, self.nvars);
        let mut r = self.clone();
        while let Some((lr, cr)) = r.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if lr.iter().zip(&lb).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exponents = lr.iter().zip(&lb).map(|(a, b)| a - b).collect();
            let c = &cr * &cb_inv;
            r = r.sub(&b.mul_monomial(&e, &c));
            q.add_term(e, c);
        }
        Some(q)
    }

    /// Pseudo-remainder of `self` by `b` as polynomials in `var`.
    fn pseudo_rem(&self, b: &Polynomial, var: usize) -> Polynomial {
        let db = b.degree(var);
        let lcb = b.coeff_in(var, db);
        let mut r = self.clone();
        while !r.is_zero() && r.degree(var) >= db {
            let dr = r.degree(var);
            let lcr = r.coeff_in(var, dr);
            let mut shift = vec![0; self.nvars];
            shift[var] = dr - db;
            let one = self.ch.one();
            r = lcb.mul(&r).sub(&lcr.mul(&b.mul_monomial(&shift, &one)));
        }
        r
    }

    /// Content (gcd of the `var`-coefficients) and primitive part.
    pub fn content_primitive(&self, var: usize) -> (Polynomial, Polynomial) {
        let mut content = Polynomial::zero(self.ch, self.nvars);
        for c in self.univariate_coeffs(var) {
            content = gcd(&content, &c);
            if content.is_constant() && !content.is_zero() {
                break;
            }
        }
        let prim = self.div_exact(&content).expect("content divides");
        (content, prim)
    }

    /// Every exponent divisible by `q` and every coefficient a `q`-th power:
    /// returns the `q`-th root.
    pub fn exponent_root(&self, q: u32) -> Option<Polynomial> {
        let mut out = Polynomial::zero(self.ch, self.nvars);
        for (e, c) in &self.terms {
            if e.iter().any(|k| k % q != 0) {
                return None;
            }
            out.add_term(e.iter().map(|k| k / q).collect(), scalar_root(c, q)?);
        }
        Some(out)
    }
}

/// Greatest common divisor over the coefficient field (rationals or `F_p`),
/// normalized to be monic. Recursive primitive remainder sequences.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let one = Polynomial::one(a.ch, a.nvars);
    if a.is_constant() || b.is_constant() {
        return one;
    }
    let var = (0..a.nvars).rev().find(|&v| a.uses_var(v) || b.uses_var(v)).expect("nonconstant");
    let (ca, pa) = a.content_primitive(var);
    let (cb, pb) = b.content_primitive(var);
    let c = gcd(&ca, &cb);
    if pa.degree(var) == 0 || pb.degree(var) == 0 || coprime_by_evaluation(&pa, &pb, var) {
        return c.monic();
    }
    let (mut x, mut y) = if pa.degree(var) >= pb.degree(var) { (pa, pb) } else { (pb, pa) };
    while !y.is_zero() {
        let r = x.pseudo_rem(&y, var);
        x = y;
        if r.is_zero() {
            y = r;
        } else if r.degree(var) == 0 {
            return c.monic();
        } else {
            y = r.content_primitive(var).1.monic();
        }
    }
    c.mul(&x.content_primitive(var).1).monic()
}

/// Specializes every variable except `var` to small constants keeping both
/// leading coefficients nonzero. A constant gcd of the images bounds the
/// degree of the true gcd in `var` by zero. An unlucky point only costs the
/// shortcut, so a few points are tried.
fn coprime_by_evaluation(a: &Polynomial, b: &Polynomial, var: usize) -> bool {
    let others: Vec<usize> = (0..a.nvars).filter(|&v| v != var && (a.uses_var(v) || b.uses_var(v))).collect();
    if others.is_empty() {
        return false;
    }
    const POINTS: [i64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for attempt in 0..5 {
        let specialize = |p: &Polynomial| {
            others.iter().enumerate().fold(p.clone(), |acc, (k, &v)| {
                let c = a.ch.from_int(POINTS[(k + 5 * attempt) % POINTS.len()] + attempt as i64);
                acc.substitute(v, &Polynomial::constant(a.ch, a.nvars, c))
            })
        };
        let (sa, sb) = (specialize(a), specialize(b));
        if sa.degree(var) != a.degree(var) || sb.degree(var) != b.degree(var) {
            continue;
        }
        if gcd(&sa, &sb).is_constant() {
            return true;
        }
    }
    false
}

/// Squarefree decomposition `f = c · Π g_i^i` over a perfect field, via the
/// gcd of `f` with all of its partial derivatives. Constant factors are
/// dropped; returned factors are monic and nonconstant.
pub fn squarefree(f: &Polynomial) -> Vec<(Polynomial, u32)> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let p = f.ch.residue_char() as u32;
    let mut c = f.clone();
    for v in 0..f.nvars {
        c = gcd(&c, &f.derivative(v));
    }
    let mut w = f.div_exact(&c).expect("gcd divides");
    let mut i = 1;
    while !w.is_constant() {
        let y = gcd(&w, &c);
        let z = w.div_exact(&y).expect("gcd divides");
        if !z.is_constant() {
            out.push((z.monic(), i));
        }
        i += 1;
        c = c.div_exact(&y).expect("gcd divides");
        w = y;
    }
    if !c.is_constant() {
        assert!(p > 0, "leftover repeated part in characteristic zero");
        let root = c.exponent_root(p).expect("all partials vanish, so this is a p-th power");
        for (g, k) in squarefree(&root) {
            out.push((g, k * p));
        }
    }
    out.sort_by_key(|(_, k)| *k);
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = std::iter::once("y".to_string()).chain((1..self.nvars).map(|i| format!("u{i}"))).collect();
        write!(f, "{}", self.render(&names))
    }
}

impl Polynomial {
    /// Human-readable form with the given variable names, highest terms first.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| if k == 1 { names[v].clone() } else { format!("{}^{}", names[v], k) })
                .collect();
            let (neg, mag) = match c {
                Scalar::Rational(q) if q < &num_rational::BigRational::from_integer(0.into()) => (true, Scalar::Rational(-q)),
                _ => (false, c.clone()),
            };
            let coeff = match c {
                Scalar::Residue { value, .. } => value.to_string(),
                _ => mag.to_string(),
            };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                s.push_str(&coeff);
            } else {
                if coeff != "1" {
                    let wrapped = if coeff.contains('/') { format!("({coeff})") } else { coeff };
                    s.push_str(&wrapped);
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Characteristic {
        Characteristic::Rational
    }

    fn v(i: usize) -> Polynomial {
        Polynomial::var(q(), 3, i)
    }

    fn c(n: i64) -> Polynomial {
        Polynomial::constant(q(), 3, q().from_int(n))
    }

    #[test]
    fn exact_division() {
        let (y, u1) = (v(0), v(1));
        let a = y.mul(&y).sub(&u1.mul(&u1));
        assert_eq!(a.div_exact(&y.sub(&u1)), Some(y.add(&u1)));
        assert_eq!(y.mul(&y).div_exact(&u1), None);
    }

    #[test]
    fn gcd_of_products() {
        let (y, u1, u2) = (v(0), v(1), v(2));
        let g = y.mul(&y).add(&u1).sub(&u2.pow(3));
        let a = g.mul(&y.add(&c(1)));
        let b = g.mul(&u1.sub(&u2)).mul(&g);
        assert_eq!(gcd(&a, &b), g.monic());
        assert!(gcd(&y, &u1).is_constant());
    }

    #[test]
    fn squarefree_characteristic_zero() {
        let (y, u1) = (v(0), v(1));
        let g = y.mul(&y).add(&y).sub(&u1);
        let f = g.pow(2).mul(&y.add(&c(2))).scale(&q().from_int(3));
        let sq = squarefree(&f);
        assert_eq!(sq, vec![(y.add(&c(2)), 1), (g.monic(), 2)]);
    }

    #[test]
    fn squarefree_characteristic_p() {
        let ch = Characteristic::finite_field(2).unwrap();
        let y = Polynomial::var(ch, 3, 0);
        let u2 = Polynomial::var(ch, 3, 2);
        let u3 = Polynomial::var(ch, 3, 1);
        // y^2 + u2 u3^2 is squarefree: its only nonzero partial is u3^2.
        let f = y.pow(2).add(&u2.mul(&u3.pow(2)));
        assert_eq!(squarefree(&f), vec![(f.clone(), 1)]);
        // (y + u3)^2 (y + u2) has a p-th power part.
        let g = y.add(&u3).pow(2).mul(&y.add(&u2));
        assert_eq!(squarefree(&g), vec![(y.add(&u2), 1), (y.add(&u3), 2)]);
        // (y + u2)^3 in characteristic 2 mixes both mechanisms.
        let h = y.add(&u2).pow(3);
        assert_eq!(squarefree(&h), vec![(y.add(&u2), 3)]);
    }

    #[test]
    fn substitution_round_trip() {
        let (y, u1) = (v(0), v(1));
        let f = y.pow(3).sub(&u1.mul(&y)).add(&c(5));
        let shifted = f.substitute(0, &y.add(&u1));
        assert_eq!(shifted.substitute(0, &y.sub(&u1)), f);
    }
}
