//! The worked examples used by `selftest`, the acceptance suite and the docs.

use crate::error::Result;
use crate::exactnum::Characteristic;
use crate::localring::{Chart, LocalElement};
use crate::poly::Polynomial;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub chart: Chart,
    pub f: LocalElement,
}

fn build(ch: Characteristic, d: usize, make: impl Fn(&Chart) -> Polynomial) -> Result<(Chart, LocalElement)> {
    let chart = Chart::new(ch, d)?;
    let f = LocalElement::from_poly(make(&chart));
    Ok((chart, f))
}

/// `(y − u1² − u2³)² + u1²·u2` over Q.
pub fn f_a() -> Fixture {
    let (chart, f) = build(Characteristic::Rational, 2, |c| {
        let inner = c.y().sub(&c.u(1).pow(2)).sub(&c.u(2).pow(3));
        inner.pow(2).add(&c.u(1).pow(2).mul(&c.u(2)))
    })
    .expect("valid chart");
    Fixture { name: "f_A", summary: "(y - u1^2 - u2^3)^2 + u1^2*u2 over Q", chart, f }
}

/// `((1+u2)·y − u1)² + u1⁵` over Q.
pub fn f_b() -> Fixture {
    let (chart, f) = build(Characteristic::Rational, 2, |c| {
        let lin = c.scalar(1).add(&c.u(2)).mul(&c.y()).sub(&c.u(1));
        lin.pow(2).add(&c.u(1).pow(5))
    })
    .expect("valid chart");
    Fixture { name: "f_B", summary: "((1+u2)*y - u1)^2 + u1^5 over Q", chart, f }
}

/// `(y² + y − u1)²` over Q.
pub fn f_c() -> Fixture {
    let (chart, f) = build(Characteristic::Rational, 1, |c| c.y().pow(2).add(&c.y()).sub(&c.u(1)).pow(2))
        .expect("valid chart");
    Fixture { name: "f_C", summary: "(y^2 + y - u1)^2 over Q", chart, f }
}

/// `y² − u2·u3² − 4·(1+u3²)` with `u1 = p = 2`.
pub fn f_d() -> Fixture {
    let ch = Characteristic::mixed(2).expect("2 is prime");
    let (chart, f) = build(ch, 3, |c| {
        let u3sq = c.u(3).pow(2);
        c.y().pow(2).sub(&c.u(2).mul(&u3sq)).sub(&c.scalar(4).mul(&c.scalar(1).add(&u3sq)))
    })
    .expect("valid chart");
    Fixture { name: "f_D", summary: "y^2 - u2*u3^2 - 4*(1+u3^2), mixed characteristic p = 2", chart, f }
}

/// `y³ − u2·u3³ − 27·(2+u3³)` with `u1 = p = 3`.
pub fn f_e() -> Fixture {
    let ch = Characteristic::mixed(3).expect("3 is prime");
    let (chart, f) = build(ch, 3, |c| {
        let u3cu = c.u(3).pow(3);
        c.y().pow(3).sub(&c.u(2).mul(&u3cu)).sub(&c.scalar(27).mul(&c.scalar(2).add(&u3cu)))
    })
    .expect("valid chart");
    Fixture { name: "f_E", summary: "y^3 - u2*u3^3 - 27*(2+u3^3), mixed characteristic p = 3", chart, f }
}

pub fn all() -> Vec<Fixture> {
    vec![f_a(), f_b(), f_c(), f_d(), f_e()]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name.eq_ignore_ascii_case(name) || f.name[2..].eq_ignore_ascii_case(name))
}
