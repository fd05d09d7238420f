//! Elements of the local ring at the origin of a chart `(y; u_1..u_d)`.
//!
//! A [`LocalElement`] is a fraction of polynomials whose denominator is a
//! unit. Expansions write an element as a finite sum `c · z^b · u^a` with
//! unit coefficients `c`; in mixed characteristic the parameter `u_1` is the
//! prime `p` itself, so powers of `p` in scalars are moved into `a_1`.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{scalar_unit_split, Characteristic, Scalar, MIXED_PARAMETER};
use crate::geometry::{self, Point};
use crate::poly::{gcd, squarefree, Exponents, Polynomial};

/// A regular system of parameters: the distinguished coordinate and `d`
/// parameters. Variable slot 0 is `y`, slot `i` is `u_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub characteristic: Characteristic,
    pub d: usize,
    pub y: String,
    pub names: Vec<String>,
}

impl Chart {
    pub fn new(characteristic: Characteristic, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("a chart needs at least one parameter".into()));
        }
        let names = (1..=d)
            .map(|i| if characteristic.is_mixed() && i == MIXED_PARAMETER { "p".to_string() } else { format!("u{i}") })
            .collect();
        Ok(Chart { characteristic, d, y: "y".into(), names })
    }

    pub fn with_names(mut self, y: &str, names: Vec<String>) -> Result<Self> {
        if names.len() != self.d {
            return Err(Error::InvalidInput(format!("expected {} parameter names", self.d)));
        }
        let mut all: Vec<&String> = names.iter().collect();
        let y = y.to_string();
        all.push(&y);
        all.sort();
        all.dedup();
        if all.len() != self.d + 1 {
            return Err(Error::InvalidInput("chart names must be distinct".into()));
        }
        self.y = y;
        self.names = names;
        Ok(self)
    }

    pub fn nvars(&self) -> usize {
        self.d + 1
    }

    pub fn var_names(&self) -> Vec<String> {
        std::iter::once(self.y.clone()).chain(self.names.iter().cloned()).collect()
    }

    pub fn y(&self) -> Polynomial {
        Polynomial::var(self.characteristic, self.nvars(), 0)
    }

    /// The parameter `u_i` (1-based) as a polynomial; in mixed mode `u_1` is
    /// the constant `p`.
    pub fn u(&self, i: usize) -> Polynomial {
        match self.characteristic {
            Characteristic::Mixed { p } if i == MIXED_PARAMETER => {
                Polynomial::constant(self.characteristic, self.nvars(), self.characteristic.from_int(p as i64))
            }
            ch => Polynomial::var(ch, self.nvars(), i),
        }
    }

    pub fn scalar(&self, n: i64) -> Polynomial {
        Polynomial::constant(self.characteristic, self.nvars(), self.characteristic.from_int(n))
    }

    /// In mixed mode, replaces the formal variable `u_1` by the scalar `p`.
    pub fn fold_parameter(&self, f: &Polynomial) -> Polynomial {
        if self.characteristic.is_mixed() && f.uses_var(MIXED_PARAMETER) {
            f.substitute(MIXED_PARAMETER, &self.u(MIXED_PARAMETER))
        } else {
            f.clone()
        }
    }
}

/// `num / den` with `den` a unit of the local ring.
#[derive(Debug, Clone)]
pub struct LocalElement {
    num: Polynomial,
    den: Polynomial,
}

impl PartialEq for LocalElement {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for LocalElement {}

fn is_unit_poly(p: &Polynomial) -> bool {
    p.characteristic().is_unit(&p.constant_term())
}

impl LocalElement {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if !is_unit_poly(&den) {
            return Err(Error::NonUnitDenominator);
        }
        Ok(LocalElement { num, den })
    }

    pub fn from_poly(num: Polynomial) -> Self {
        let den = Polynomial::one(num.characteristic(), num.nvars());
        LocalElement { num, den }
    }

    pub fn constant(ch: Characteristic, nvars: usize, c: Scalar) -> Self {
        Self::from_poly(Polynomial::constant(ch, nvars, c))
    }

    pub fn zero(ch: Characteristic, nvars: usize) -> Self {
        Self::from_poly(Polynomial::zero(ch, nvars))
    }

    pub fn one(ch: Characteristic, nvars: usize) -> Self {
        Self::from_poly(Polynomial::one(ch, nvars))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn characteristic(&self) -> Characteristic {
        self.num.characteristic()
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        is_unit_poly(&self.num)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Value at the origin (a scalar of the coefficient ring).
    pub fn constant_term(&self) -> Scalar {
        let d = self.den.constant_term().inv().expect("denominator is a unit");
        &self.num.constant_term() * &d
    }

    /// The element as a single scalar when numerator and denominator are constants.
    pub fn as_scalar(&self) -> Option<Scalar> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.constant_term())
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.num.uses_var(var) || self.den.uses_var(var)
    }

    pub fn add(&self, other: &LocalElement) -> LocalElement {
        if self.den == other.den {
            return LocalElement { num: self.num.add(&other.num), den: self.den.clone() };
        }
        LocalElement { num: self.num.mul(&other.den).add(&other.num.mul(&self.den)), den: self.den.mul(&other.den) }
    }

    pub fn neg(&self) -> LocalElement {
        LocalElement { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &LocalElement) -> LocalElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LocalElement) -> LocalElement {
        LocalElement { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }
    }

    pub fn mul_poly(&self, p: &Polynomial) -> LocalElement {
        LocalElement { num: self.num.mul(p), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Scalar) -> LocalElement {
        LocalElement { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, k: u32) -> LocalElement {
        LocalElement { num: self.num.pow(k), den: self.den.pow(k) }
    }

    /// Inverse of a unit.
    pub fn inverse(&self) -> Option<LocalElement> {
        self.is_unit().then(|| LocalElement { num: self.den.clone(), den: self.num.clone() })
    }

    /// Cancels the greatest common divisor of numerator and denominator when
    /// the result stays inside the coefficient ring.
    pub fn reduced(&self) -> LocalElement {
        reduce_fraction(&self.num, &self.den)
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.den.is_constant() {
            let inv = self.den.constant_term().inv().expect("unit");
            return self.num.scale(&inv).render(names);
        }
        let wrap = |p: &Polynomial| {
            let s = p.render(names);
            if p.num_terms() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = std::iter::once("y".to_string()).chain((1..self.nvars()).map(|i| format!("u{i}"))).collect();
        write!(f, "{}", self.render(&names))
    }
}

/// `num / den` with their gcd cancelled, normalized so that the denominator
/// has constant term one. Falls back to the input when cancellation would
/// leave the coefficient ring.
pub fn reduce_fraction(num: &Polynomial, den: &Polynomial) -> LocalElement {
    let ch = num.characteristic();
    let fallback = LocalElement { num: num.clone(), den: den.clone() };
    if num.is_zero() {
        return LocalElement::from_poly(num.clone());
    }
    let work = |p: &Polynomial| if ch.is_mixed() { p.with_characteristic(Characteristic::Rational) } else { p.clone() };
    let (n, d) = (work(num), work(den));
    let g = gcd(&n, &d);
    let g0 = g.constant_term();
    let Some(g0inv) = g0.inv() else { return fallback };
    let g = g.scale(&g0inv);
    let (Some(n2), Some(d2)) = (n.div_exact(&g), d.div_exact(&g)) else { return fallback };
    let d0 = d2.constant_term().inv().expect("den has a unit constant term");
    let (n2, d2) = (n2.scale(&d0), d2.scale(&d0));
    let back = |p: &Polynomial| if ch.is_mixed() { p.with_characteristic(ch) } else { p.clone() };
    let (n2, d2) = (back(&n2), back(&d2));
    let admissible = n2.terms().chain(d2.terms()).all(|(_, c)| ch.admits(c));
    if admissible && is_unit_poly(&d2) {
        LocalElement { num: n2, den: d2 }
    } else {
        fallback
    }
}

/// One term `c · z^b · u^a` of an expansion; `c` is a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub a: Vec<u32>,
    pub b: u32,
    pub c: LocalElement,
}

impl Term {
    /// The projected support point `a / (m − b)`, for `b < m`.
    pub fn point(&self, m: u32) -> Option<Point> {
        (self.b < m).then(|| {
            let den = BigInt::from(m - self.b);
            self.a.iter().map(|&k| num_rational::BigRational::new(BigInt::from(k), den.clone())).collect()
        })
    }
}

/// A finite expansion `multiplier · Σ c · z^b · u^a`, where `z` is the
/// recorded coordinate written in the chart's variables.
#[derive(Debug, Clone)]
pub struct TermExpansion {
    pub terms: Vec<Term>,
    pub multiplier: LocalElement,
    pub coordinate: LocalElement,
}

impl TermExpansion {
    /// Reassembles the element the expansion describes.
    pub fn evaluate(&self, chart: &Chart) -> LocalElement {
        let ch = chart.characteristic;
        let n = chart.nvars();
        let mut acc = LocalElement::zero(ch, n);
        let max_b = self.terms.iter().map(|t| t.b).max().unwrap_or(0);
        let zpows: Vec<LocalElement> = (0..=max_b).map(|k| self.coordinate.pow(k)).collect();
        for t in &self.terms {
            let mut mono = Polynomial::one(ch, n);
            for (i, &k) in t.a.iter().enumerate() {
                if k > 0 {
                    mono = mono.mul(&chart.u(i + 1).pow(k));
                }
            }
            acc = acc.add(&t.c.mul(&zpows[t.b as usize]).mul_poly(&mono));
        }
        acc.mul(&self.multiplier)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.iter().all(|t| t.c.as_scalar().is_some())
    }
}

/// Splits a scalar into its `p`-power (moved into `a_1`) and unit part.
fn fold_scalar(ch: Characteristic, c: &Scalar, a: &mut [u32]) -> Scalar {
    match ch {
        Characteristic::Mixed { p } => {
            let (v, w) = scalar_unit_split(c, p).expect("nonzero coefficient");
            assert!(v >= 0, "mixed scalars are p-integral");
            a[MIXED_PARAMETER - 1] += v as u32;
            w
        }
        _ => c.clone(),
    }
}

/// Monomial-by-monomial expansion of the numerator; the denominator becomes
/// the global unit multiplier.
pub fn normalize_expansion(f: &LocalElement, chart: &Chart) -> TermExpansion {
    let ch = chart.characteristic;
    let n = chart.nvars();
    let mut terms: Vec<Term> = f
        .num
        .terms()
        .map(|(e, c)| {
            let mut a: Vec<u32> = e[1..].to_vec();
            let w = fold_scalar(ch, c, &mut a);
            Term { a, b: e[0], c: LocalElement::constant(ch, n, w) }
        })
        .collect();
    terms.sort_by(|x, y| (x.b, &x.a).cmp(&(y.b, &y.a)));
    TermExpansion {
        terms,
        multiplier: LocalElement { num: Polynomial::one(ch, n), den: f.den.clone() },
        coordinate: LocalElement::from_poly(chart.y()),
    }
}

/// Image of `f` in the residue field polynomial ring `k[y]`.
fn residual_image(f: &Polynomial) -> Polynomial {
    let params: Vec<usize> = (1..f.nvars()).collect();
    let img = f.kill_vars(&params);
    let ch = f.characteristic();
    if ch.is_mixed() {
        img.with_characteristic(ch.residue_field())
    } else {
        img
    }
}

/// Order of `f` in `R / (u_1..u_d)`.
pub fn residual_order(f: &LocalElement, chart: &Chart) -> Result<u32> {
    let _ = chart;
    residual_order_poly(&f.num)
}

pub fn residual_order_poly(f: &Polynomial) -> Result<u32> {
    if f.characteristic().is_unit(&f.constant_term()) {
        return Err(Error::NotInMaximalIdeal);
    }
    let img = residual_image(f);
    let k = img.terms().map(|(e, _)| e[0]).min().ok_or(Error::InParameterIdeal)?;
    if k == 0 {
        return Err(Error::NotInMaximalIdeal);
    }
    Ok(k)
}

/// `f(y + φ)` for `φ` free of `y` without a unit constant term.
pub fn substitute_y(f: &LocalElement, phi: &LocalElement) -> Result<LocalElement> {
    if phi.depends_on(0) {
        return Err(Error::NotGraphForm);
    }
    if phi.is_unit() {
        return Err(Error::UnitConstantTerm);
    }
    let ch = f.characteristic();
    let n = f.nvars();
    let y = Polynomial::var(ch, n, 0);
    let (p, q) = (&phi.num, &phi.den);
    let coeffs = f.num.univariate_coeffs(0);
    let deg = coeffs.len() - 1;
    let shift = q.mul(&y).add(p);
    let qpows: Vec<Polynomial> = {
        let mut v = vec![Polynomial::one(ch, n)];
        for _ in 0..deg {
            let last = v.last().expect("nonempty").mul(q);
            v.push(last);
        }
        v
    };
    let mut acc = Polynomial::zero(ch, n);
    for (k, c) in coeffs.iter().enumerate().rev() {
        acc = acc.mul(&shift).add(&c.mul(&qpows[deg - k]));
    }
    let mut den_pow = deg;
    if !q.is_constant() {
        while den_pow > 0 {
            match acc.div_exact(q) {
                Some(r) => {
                    acc = r;
                    den_pow -= 1;
                }
                None => break,
            }
        }
    }
    Ok(LocalElement { num: acc, den: f.den.mul(&qpows[den_pow]) })
}

pub fn exact_div(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    a.div_exact(b)
}

/// Why an `m`-th root extraction failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootFailure {
    DegreeMismatch,
    NonUnitLeading,
    NonIntegral,
    ExponentsNotDivisible,
    NoRoot,
    NotPower,
}

impl fmt::Display for RootFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootFailure::DegreeMismatch => "degree in Y differs from m",
            RootFailure::NonUnitLeading => "leading coefficient is not a unit",
            RootFailure::NonIntegral => "candidate root is not p-integral",
            RootFailure::ExponentsNotDivisible => "Y-exponents not divisible by the inseparable degree",
            RootFailure::NoRoot => "coefficients admit no root",
            RootFailure::NotPower => "not a perfect power",
        };
        f.write_str(s)
    }
}

/// A verified factorization `F = delta · (Y + h)^m`.
#[derive(Debug, Clone)]
pub struct MthRoot {
    pub delta: Polynomial,
    pub h: LocalElement,
}

impl MthRoot {
    /// `Z = Y + h` as a fraction.
    pub fn z(&self) -> LocalElement {
        let y = Polynomial::var(self.delta.characteristic(), self.delta.nvars(), 0);
        LocalElement { num: y.mul(&self.h.den).add(&self.h.num), den: self.h.den.clone() }
    }
}

/// Decides whether `F` (a polynomial in slot 0 over the coefficient ring of
/// its characteristic) is `delta · (Y + h)^m`.
pub fn mth_root_in_y(f: &Polynomial, m: u32) -> std::result::Result<MthRoot, RootFailure> {
    let ch = f.characteristic();
    if m == 0 || f.degree(0) != m {
        return Err(RootFailure::DegreeMismatch);
    }
    let delta = f.coeff_in(0, m);
    if !is_unit_poly(&delta) {
        return Err(RootFailure::NonUnitLeading);
    }
    let p = ch.residue_char() as u32;
    let h = match ch {
        Characteristic::FiniteField { .. } if m % p == 0 => {
            let mut q = 1u32;
            while (m / q) % p == 0 {
                q *= p;
            }
            let m1 = m / q;
            if f.terms().any(|(e, _)| e[0] % q != 0) {
                return Err(RootFailure::ExponentsNotDivisible);
            }
            let w_num = f.coeff_in(0, (m1 - 1) * q);
            let w_den = delta.scale(&ch.from_int(m1 as i64));
            let w = reduce_fraction(&w_num, &w_den);
            let root_num = w.num.exponent_root(q).ok_or(RootFailure::NoRoot)?;
            let root_den = w.den.exponent_root(q).ok_or(RootFailure::NoRoot)?;
            if !is_unit_poly(&root_den) {
                return Err(RootFailure::NoRoot);
            }
            LocalElement { num: root_num, den: root_den }
        }
        _ => {
            let n = f.coeff_in(0, m - 1);
            let inv_m = match ch {
                Characteristic::FiniteField { .. } | Characteristic::Rational => ch.from_int(m as i64).inv(),
                Characteristic::Mixed { .. } => Characteristic::Rational.from_int(m as i64).inv(),
            }
            .expect("m is invertible here");
            let num = n.scale(&inv_m);
            if num.terms().any(|(_, c)| !ch.admits(c)) {
                return Err(RootFailure::NonIntegral);
            }
            reduce_fraction(&num, &delta)
        }
    };
    let root = MthRoot { delta: delta.clone(), h };
    let z = root.z();
    if f.mul(&z.den.pow(m)) != delta.mul(&z.num.pow(m)) {
        return Err(RootFailure::NotPower);
    }
    Ok(root)
}

/// Caps for the factorization-backed power test.
pub const RADICAL_MAX_DEGREE: u32 = 32;
pub const RADICAL_MAX_VARS: usize = 4;

/// A verified factorization `F = delta · Z^m` with `delta` a unit and `Z`
/// of residual order one.
#[derive(Debug, Clone)]
pub struct Radical {
    pub delta: LocalElement,
    pub z: Polynomial,
}

fn vanishes_at_origin(g: &Polynomial) -> bool {
    !g.characteristic().is_unit(&g.constant_term())
}

/// Decides whether `F = delta · Z^m` with `Z` generating a prime of residual
/// order one, via squarefree decomposition over the coefficient field.
pub fn power_radical_test(f: &Polynomial, m: u32) -> Result<Option<Radical>> {
    let ch = f.characteristic();
    if f.is_zero() || m == 0 {
        return Ok(None);
    }
    if f.total_degree() > RADICAL_MAX_DEGREE || f.used_vars().len() > RADICAL_MAX_VARS {
        return Err(Error::Undecided(format!(
            "power test limited to total degree {RADICAL_MAX_DEGREE} in at most {RADICAL_MAX_VARS} variables"
        )));
    }
    let work = if ch.is_mixed() { f.with_characteristic(Characteristic::Rational) } else { f.clone() };
    if let Characteristic::Mixed { p } = ch {
        let content = f.terms().filter_map(|(_, c)| crate::exactnum::scalar_padic_val(c, p)).min().unwrap_or(0);
        if content > 0 {
            return Ok(None);
        }
    }
    let mut vanishing: Vec<(Polynomial, u32)> = Vec::new();
    for (g, k) in squarefree(&work) {
        let g = match ch {
            Characteristic::Mixed { p } => {
                let v = g.terms().filter_map(|(_, c)| crate::exactnum::scalar_padic_val(c, p)).min().unwrap_or(0);
                let pp = Characteristic::Rational.from_int(p as i64);
                let s = if v >= 0 { pp.pow(v as u32).inv().expect("nonzero") } else { pp.pow((-v) as u32) };
                g.scale(&s).with_characteristic(ch)
            }
            _ => g,
        };
        if vanishes_at_origin(&g) {
            vanishing.push((g, k));
        }
    }
    if vanishing.len() != 1 || vanishing[0].1 != m {
        return Ok(None);
    }
    let z = vanishing.pop().expect("one factor").0;
    if residual_order_poly(&z) != Ok(1) {
        return Ok(None);
    }
    let Some(delta) = f.div_exact(&z.pow(m)) else { return Ok(None) };
    if !delta.terms().all(|(_, c)| ch.admits(c)) || !is_unit_poly(&delta) {
        return Ok(None);
    }
    Ok(Some(Radical { delta: LocalElement::from_poly(delta), z }))
}

/// Rewrite-round cap for [`reexpand`].
pub const REEXPAND_MAX_ROUNDS: usize = 64;

/// Expansion of `f` in the coordinate `zeta`.
///
/// A `zeta` linear in `y` is handled as a graph coordinate `y + c0/c1`, a
/// unit multiple of `zeta`. Otherwise `f` is written in `zeta`-adic digits
/// and `y` is eliminated through `y = (z − c0)/c1`; nonunit coefficients
/// are expanded further unless their term cannot affect the polyhedron.
pub fn reexpand(f: &LocalElement, zeta: &Polynomial, chart: &Chart) -> Result<TermExpansion> {
    let ch = chart.characteristic;
    let n = chart.nvars();
    if residual_order_poly(zeta) != Ok(1) {
        return Err(Error::InvalidInput("coordinate must have residual order one".into()));
    }
    if *zeta == chart.y() {
        return Ok(normalize_expansion(f, chart));
    }
    let k = zeta.degree(0);
    let c0 = zeta.coeff_in(0, 0);
    if k == 1 {
        let c1 = zeta.coeff_in(0, 1);
        let phi = LocalElement::new(c0.neg(), c1)?;
        let g = substitute_y(f, &phi)?;
        let mut exp = normalize_expansion(&g, chart);
        exp.coordinate = LocalElement::from_poly(chart.y()).sub(&phi);
        return Ok(exp);
    }
    let lead = zeta.coeff_in(0, k);
    if !lead.is_constant() || !ch.is_unit(&lead.constant_term()) {
        return Err(Error::ReexpansionIncomplete("leading y-coefficient of the coordinate is not a unit scalar".into()));
    }
    let m = residual_order(f, chart)?;
    // Digits of the numerator in base zeta.
    let mut digits: Vec<Polynomial> = Vec::new();
    let mut rest = f.num.clone();
    let lead_inv = lead.constant_term().inv().expect("unit");
    while !rest.is_zero() {
        let (q, r) = divmod_y(&rest, zeta, k, &lead_inv);
        digits.push(r);
        rest = q;
    }
    let c1 = zeta.sub(&c0).div_exact(&chart.y()).expect("c0 collects the y-free part");
    let c1_inv = LocalElement::new(Polynomial::one(ch, n), c1)?;

    let mut pending: std::collections::BTreeMap<(u32, Vec<u32>), LocalElement> = std::collections::BTreeMap::new();
    for (j, r) in digits.into_iter().enumerate() {
        if !r.is_zero() {
            pending.insert((j as u32, vec![0; chart.d]), LocalElement::from_poly(r));
        }
    }
    let mut settled: std::collections::BTreeMap<(u32, Vec<u32>), LocalElement> = std::collections::BTreeMap::new();
    for _ in 0..REEXPAND_MAX_ROUNDS {
        let merged: Vec<((u32, Vec<u32>), LocalElement)> = std::mem::take(&mut pending).into_iter().collect();
        for (key, c) in merged {
            let c = match settled.remove(&key) {
                Some(old) => old.add(&c),
                None => c,
            };
            if c.is_zero() {
                continue;
            }
            settled.insert(key, c);
        }
        let confirmed: Vec<Point> = settled
            .iter()
            .filter(|((b, _), c)| *b < m && c.is_unit())
            .filter_map(|((b, a), _)| Term { a: a.clone(), b: *b, c: LocalElement::one(ch, n) }.point(m))
            .collect();
        let hull = geometry::hull_from_points(chart.d, &confirmed)?;
        let to_expand: Vec<(u32, Vec<u32>)> = settled
            .iter()
            .filter(|((b, a), c)| {
                !c.is_unit()
                    && *b < m
                    && !Term { a: a.clone(), b: *b, c: LocalElement::clone(c) }.point(m).map(|pt| hull.contains(&pt)).unwrap_or(true)
            })
            .map(|(key, _)| key.clone())
            .collect();
        if to_expand.is_empty() {
            let terms: Vec<Term> = settled.into_iter().map(|((b, a), c)| Term { a, b, c }).collect();
            let exp = TermExpansion {
                terms,
                multiplier: LocalElement { num: Polynomial::one(ch, n), den: f.den.clone() },
                coordinate: LocalElement::from_poly(zeta.clone()),
            };
            if exp.evaluate(chart) != *f {
                return Err(Error::Invariant("re-expansion does not reproduce the input".into()));
            }
            return Ok(exp);
        }
        for key in to_expand {
            let c = settled.remove(&key).expect("present");
            expand_coefficient(&key, &c, &c0, &c1_inv, chart, &mut pending);
        }
    }
    Err(Error::ReexpansionIncomplete(format!("unabsorbed terms after {REEXPAND_MAX_ROUNDS} rounds")))
}

/// Quotient and remainder of `a` by `zeta` as polynomials in `y`, where the
/// leading y-coefficient of `zeta` is the scalar with inverse `lead_inv`.
fn divmod_y(a: &Polynomial, zeta: &Polynomial, k: u32, lead_inv: &Scalar) -> (Polynomial, Polynomial) {
    let ch = a.characteristic();
    let n = a.nvars();
    let mut q = Polynomial::zero(ch, n);
    let mut r = a.clone();
    while !r.is_zero() && r.degree(0) >= k {
        let dr = r.degree(0);
        let top = r.coeff_in(0, dr).scale(lead_inv);
        let mut shift = vec![0; n];
        shift[0] = dr - k;
        let t = top.mul_monomial(&shift, &ch.one());
        r = r.sub(&t.mul(zeta));
        q = q.add(&t);
    }
    (q, r)
}

/// Expands a nonunit coefficient `c` of `z^b u^a` one level, replacing each
/// `y^e` by `((z − c0)/c1)^e`.
fn expand_coefficient(
    key: &(u32, Vec<u32>),
    c: &LocalElement,
    c0: &Polynomial,
    c1_inv: &LocalElement,
    chart: &Chart,
    out: &mut std::collections::BTreeMap<(u32, Vec<u32>), LocalElement>,
) {
    let ch = chart.characteristic;
    let n = chart.nvars();
    let den_inv = LocalElement { num: Polynomial::one(ch, n), den: c.den.clone() };
    let (b, a) = key;
    let neg_c0 = c0.neg();
    for (e, s) in c.num.terms() {
        let ye = e[0];
        let mut base_a: Vec<u32> = a.iter().zip(&e[1..]).map(|(x, y)| x + y).collect();
        let s = fold_scalar(ch, s, &mut base_a);
        let unit = den_inv.mul(&c1_inv.pow(ye)).scale(&s);
        for i in 0..=ye {
            let binom = binomial(ye, i);
            let part = neg_c0.pow(ye - i).scale(&ch.from_bigint(&binom));
            for (e2, s2) in part.terms() {
                let mut a2: Vec<u32> = base_a.iter().zip(&e2[1..]).map(|(x, y)| x + y).collect();
                let s2 = fold_scalar(ch, s2, &mut a2);
                let term = unit.scale(&s2);
                let k2 = (b + i, a2);
                let merged = match out.remove(&k2) {
                    Some(old) => old.add(&term),
                    None => term,
                };
                out.insert(k2, merged);
            }
        }
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Exponent vector of `y^b u^a` in a chart with `d` parameters.
pub fn exponents(b: u32, a: &[u32]) -> Exponents {
    std::iter::once(b).chain(a.iter().copied()).collect()
}
