//! Exact scalars for the three coefficient modes.
//!
//! Rational and mixed-characteristic scalars share the arbitrary-precision
//! rational representation; the active [`Characteristic`] decides which of
//! them are units. Finite-field scalars are reduced residues.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of the parameter standing for `p` in mixed characteristic.
pub const MIXED_PARAMETER: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Characteristic {
    Rational,
    FiniteField { p: u64 },
    Mixed { p: u64 },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl Characteristic {
    pub fn rational() -> Self {
        Characteristic::Rational
    }

    pub fn finite_field(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Characteristic::FiniteField { p })
    }

    pub fn mixed(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Characteristic::Mixed { p })
    }

    /// Characteristic of the residue field, 0 for the rationals.
    pub fn residue_char(self) -> u64 {
        match self {
            Characteristic::Rational => 0,
            Characteristic::FiniteField { p } | Characteristic::Mixed { p } => p,
        }
    }

    pub fn is_mixed(self) -> bool {
        matches!(self, Characteristic::Mixed { .. })
    }

    /// The residue field as a characteristic of its own.
    pub fn residue_field(self) -> Characteristic {
        match self {
            Characteristic::Mixed { p } => Characteristic::FiniteField { p },
            other => other,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_int(0)
    }

    pub fn one(self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(self, n: &BigInt) -> Scalar {
        match self {
            Characteristic::FiniteField { p } => Scalar::residue(n, p),
            _ => Scalar::Rational(BigRational::from_integer(n.clone())),
        }
    }

    /// Builds a scalar from a rational, checking the mode's constraints.
    pub fn from_rational(self, q: &BigRational) -> Result<Scalar> {
        match self {
            Characteristic::Rational => Ok(Scalar::Rational(q.clone())),
            Characteristic::Mixed { p } => {
                if q.denom().is_multiple_of(&BigInt::from(p)) {
                    Err(Error::NotIntegral(q.to_string(), p))
                } else {
                    Ok(Scalar::Rational(q.clone()))
                }
            }
            Characteristic::FiniteField { p } => {
                let den = Scalar::residue(q.denom(), p);
                let inv = den.inv().ok_or_else(|| Error::NotIntegral(q.to_string(), p))?;
                Ok(&Scalar::residue(q.numer(), p) * &inv)
            }
        }
    }

    pub fn is_unit(self, s: &Scalar) -> bool {
        match (self, s) {
            (Characteristic::Mixed { p }, Scalar::Rational(q)) => {
                !q.is_zero() && !q.numer().is_multiple_of(&BigInt::from(p))
            }
            _ => !s.is_zero(),
        }
    }

    /// Checks that `s` belongs to this mode's coefficient ring.
    pub fn admits(self, s: &Scalar) -> bool {
        match (self, s) {
            (Characteristic::Rational, Scalar::Rational(_)) => true,
            (Characteristic::Mixed { p }, Scalar::Rational(q)) => {
                !q.denom().is_multiple_of(&BigInt::from(p))
            }
            (Characteristic::FiniteField { p }, Scalar::Residue { modulus, .. }) => *modulus == p,
            _ => false,
        }
    }

    /// Image in the residue field.
    pub fn reduce(self, s: &Scalar) -> Scalar {
        match (self, s) {
            (Characteristic::Mixed { p }, Scalar::Rational(q)) => {
                Characteristic::FiniteField { p }
                    .from_rational(q)
                    .expect("mixed scalars are p-integral")
            }
            _ => s.clone(),
        }
    }

    /// Canonical preimage of a residue-field scalar: the representative in `0..p`.
    pub fn lift(self, residue: &Scalar) -> Scalar {
        match (self, residue) {
            (Characteristic::Mixed { .. }, Scalar::Residue { value, .. }) => self.from_int(*value as i64),
            _ => residue.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn residue(n: &BigInt, p: u64) -> Scalar {
        let r = n.mod_floor(&BigInt::from(p));
        Scalar::Residue { value: r.to_u64().expect("residue fits"), modulus: p }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    pub fn characteristic_zero(&self) -> Scalar {
        match self {
            Scalar::Rational(_) => Scalar::Rational(BigRational::zero()),
            Scalar::Residue { modulus, .. } => Scalar::Residue { value: 0, modulus: *modulus },
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Residue { .. } => None,
        }
    }

    /// Multiplicative inverse of a nonzero scalar (field inverse).
    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Rational(q) if !q.is_zero() => Some(Scalar::Rational(q.recip())),
            Scalar::Residue { value, modulus } if *value != 0 => {
                Some(Scalar::Residue { value: pow_mod(*value, modulus - 2, *modulus), modulus: *modulus })
            }
            _ => None,
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(num_traits::pow(q.clone(), e as usize)),
            Scalar::Residue { value, modulus } => {
                Scalar::Residue { value: pow_mod(*value, e as u64, *modulus), modulus: *modulus }
            }
        }
    }

    pub fn from_u64_like(&self, n: u64) -> Scalar {
        match self {
            Scalar::Rational(_) => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Scalar::Residue { modulus, .. } => Scalar::Residue { value: n % modulus, modulus: *modulus },
        }
    }
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut base = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

fn combine(a: &Scalar, b: &Scalar, qop: impl Fn(&BigRational, &BigRational) -> BigRational, mop: impl Fn(u128, u128, u128) -> u128) -> Scalar {
    match (a, b) {
        (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(qop(x, y)),
        (Scalar::Residue { value: x, modulus: p }, Scalar::Residue { value: y, modulus: q }) if p == q => {
            let m = *p as u128;
            Scalar::Residue { value: (mop(*x as u128, *y as u128, m) % m) as u64, modulus: *p }
        }
        _ => panic!("mixing scalars of different modes: {a} and {b}"),
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        combine(self, rhs, |x, y| x + y, |x, y, _| x + y)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        combine(self, rhs, |x, y| x - y, |x, y, m| x + m - y)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        combine(self, rhs, |x, y| x * y, |x, y, _| x * y)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Residue { value, modulus } => {
                Scalar::Residue { value: (modulus - value) % modulus, modulus: *modulus }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{}", fmt_rational(q)),
            Scalar::Residue { value, modulus } => write!(f, "{value} mod {modulus}"),
        }
    }
}

pub fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `"n"`, `"n/m"` and `"k mod p"`.
    fn from_str(s: &str) -> Result<Scalar> {
        if let Some((k, p)) = s.split_once("mod") {
            let p: u64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let k = BigInt::from_str(k.trim()).map_err(|_| Error::Parse(format!("bad residue in {s:?}")))?;
            return Ok(Scalar::residue(&k, p));
        }
        parse_rational(s).map(Scalar::Rational)
    }
}

/// p-adic valuation of a rational; `None` stands for +infinity (s = 0).
pub fn padic_val(s: &BigRational, p: u64) -> Option<i64> {
    if s.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut v = 0i64;
        while n.is_multiple_of(&p) {
            n /= &p;
            v += 1;
        }
        v
    };
    Some(count(s.numer()) - count(s.denom()))
}

/// Writes `s = p^v · w` with `w` of valuation zero.
pub fn unit_split(s: &BigRational, p: u64) -> Result<(i64, BigRational)> {
    let v = padic_val(s, p).ok_or(Error::ZeroUnitPart)?;
    let pp = BigRational::from_integer(BigInt::from(p));
    let w = if v >= 0 { s / num_traits::pow(pp, v as usize) } else { s * num_traits::pow(pp, (-v) as usize) };
    Ok((v, w))
}

/// Valuation of a scalar in the active mode (mixed or rational).
pub fn scalar_padic_val(s: &Scalar, p: u64) -> Option<i64> {
    match s {
        Scalar::Rational(q) => padic_val(q, p),
        Scalar::Residue { value, .. } => (*value != 0).then_some(0),
    }
}

pub fn scalar_unit_split(s: &Scalar, p: u64) -> Result<(i64, Scalar)> {
    match s {
        Scalar::Rational(q) => unit_split(q, p).map(|(v, w)| (v, Scalar::Rational(w))),
        Scalar::Residue { .. } if s.is_zero() => Err(Error::ZeroUnitPart),
        Scalar::Residue { .. } => Ok((0, s.clone())),
    }
}

fn integer_root(n: &BigInt, r: u32) -> Option<BigInt> {
    if n.is_negative() {
        if r % 2 == 0 {
            return None;
        }
        return integer_root(&-n, r).map(|t| -t);
    }
    let t = n.nth_root(r);
    (num_traits::pow(t.clone(), r as usize) == *n).then_some(t)
}

/// An `r`-th root of `s` inside the scalar ring, when one exists.
pub fn scalar_root(s: &Scalar, r: u32) -> Option<Scalar> {
    assert!(r >= 1, "root index must be positive");
    match s {
        Scalar::Rational(q) => {
            let n = integer_root(q.numer(), r)?;
            let d = integer_root(q.denom(), r)?;
            Some(Scalar::Rational(BigRational::new(n, d)))
        }
        Scalar::Residue { value, modulus } => (0..*modulus)
            .find(|t| pow_mod(*t, r as u64, *modulus) == *value)
            .map(|t| Scalar::Residue { value: t, modulus: *modulus }),
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
