//! Reproduction checks for the five worked examples.
//!
//! Each check recomputes an example from scratch and compares every value
//! exactly. The CLI's `selftest` command and the acceptance suite share
//! these.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::Result;
use crate::exactnum::{rat, Characteristic};
use crate::fixtures;
use crate::geometry::Point;
use crate::localring::{reexpand, LocalElement};
use crate::newton::{initial_form_vertex, polyhedron_of};
use crate::poly::Polynomial;
use crate::preparation::{prepare, Certificate, Mode, Options, Reason, Target};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    /// Mismatches, one per line; empty when the check passed.
    pub detail: Vec<String>,
}

struct Collector(Vec<String>);

impl Collector {
    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, got: T, want: T) {
        if got != want {
            self.0.push(format!("{what}: got {got:?}, expected {want:?}"));
        }
    }

    fn ok(&mut self, what: &str, cond: bool) {
        if !cond {
            self.0.push(format!("{what} does not hold"));
        }
    }
}

fn pt(c: &[(i64, i64)]) -> Point {
    c.iter().map(|&(n, d)| rat(n, d)).collect()
}

fn sorted(mut v: Vec<Point>) -> Vec<Point> {
    v.sort();
    v
}

fn run(id: u32, title: &'static str, body: impl FnOnce(&mut Collector) -> Result<()>) -> Check {
    let mut c = Collector(Vec::new());
    if let Err(e) = body(&mut c) {
        c.0.push(format!("error: {e}"));
    }
    Check { id, title, passed: c.0.is_empty(), detail: c.0 }
}

pub fn check_f_a() -> Check {
    run(1, "f_A: symbolic vertices, two face steps, Lambda = [2,1,0]", |c| {
        let fx = fixtures::f_a();
        let ch = &fx.chart;
        let cp = polyhedron_of(&fx.f, ch)?;
        c.eq("initial vertices", sorted(cp.polyhedron.vertices().to_vec()), vec![pt(&[(0, 1), (3, 1)]), pt(&[(1, 1), (1, 2)]), pt(&[(2, 1), (0, 1)])]);
        let p = prepare(&fx.f, ch, Options::default())?;
        c.eq("certificate", p.certificate.kind(), "PREPARED");
        c.eq("steps", p.steps.len(), 2);
        c.eq("z", p.z.clone(), LocalElement::from_poly(ch.y().sub(&ch.u(2).pow(3)).sub(&ch.u(1).pow(2))));
        c.eq("final vertices", p.final_polyhedron.vertices().to_vec(), vec![pt(&[(1, 1), (1, 2)])]);
        match p.lambda_replay() {
            Some(lam) => {
                c.eq("Lambda values", lam.values.clone(), vec![rat(2, 1), rat(1, 1), rat(0, 1)]);
                c.eq("lattice denominator", lam.lattice_denominator.clone(), BigInt::from(2));
                c.ok("Lambda replay", lam.holds());
            }
            None => c.ok("Lambda replay available", false),
        }
        Ok(())
    })
}

pub fn check_f_d() -> Check {
    run(2, "f_D (p = 2): z = y - (1+u3)*2, final vertices, char-2 square test fails", |c| {
        let fx = fixtures::f_d();
        let ch = &fx.chart;
        let p = prepare(&fx.f, ch, Options::default())?;
        c.eq("certificate", p.certificate.kind(), "PREPARED");
        let two = ch.scalar(2);
        c.eq("z", p.z.clone(), LocalElement::from_poly(ch.y().sub(&two.mul(&ch.scalar(1).add(&ch.u(3))))));
        let want = vec![pt(&[(0, 1), (1, 2), (1, 1)]), pt(&[(3, 2), (0, 1), (1, 2)]), pt(&[(2, 1), (0, 1), (0, 1)])];
        c.eq("final vertices", sorted(p.final_polyhedron.vertices().to_vec()), sorted(want));
        let Certificate::Prepared { vertices } = &p.certificate else { return Ok(()) };
        let integral: Vec<&Target> = vertices.iter().filter(|v| v.reason() != Some(&Reason::NonIntegral)).map(|v| &v.target).collect();
        let v200 = pt(&[(2, 1), (0, 1), (0, 1)]);
        c.eq("integral vertices", integral, vec![&Target::Vertex(v200.clone())]);
        c.ok("all vertices unsolvable", vertices.iter().all(|v| !v.solvable()));
        let cp = polyhedron_of(&p.final_f, ch)?;
        let inf = initial_form_vertex(&cp.expansion, &cp.polyhedron, &v200, ch)?;
        let f2 = Characteristic::finite_field(2)?;
        let (z, pp) = (Polynomial::var(f2, 4, 0), Polynomial::var(f2, 4, 1));
        c.eq("initial form at (2,0,0)", inf.poly, z.pow(2).add(&pp.pow(2).mul(&z)));
        Ok(())
    })
}

pub fn check_f_e() -> Check {
    run(3, "f_E (p = 3): two vertex dissolutions, z = y - (2+u3)*3", |c| {
        let fx = fixtures::f_e();
        let ch = &fx.chart;
        let p = prepare(&fx.f, ch, Options::default())?;
        c.eq("certificate", p.certificate.kind(), "PREPARED");
        c.eq("steps", p.steps.len(), 2);
        c.ok("every step dissolves a vertex", p.steps.iter().all(|s| matches!(s.verdict.target, Target::Vertex(_))));
        let three = ch.scalar(3);
        c.eq("z", p.z.clone(), LocalElement::from_poly(ch.y().sub(&three.mul(&ch.scalar(2).add(&ch.u(3))))));
        c.eq("final vertices", sorted(p.final_polyhedron.vertices().to_vec()), vec![pt(&[(0, 1), (1, 3), (1, 1)]), pt(&[(4, 3), (0, 1), (0, 1)])]);
        Ok(())
    })
}

pub fn check_f_b() -> Check {
    run(4, "f_B: face-first fraction lift in 1 step, vertex-only UNDECIDED at cap 10", |c| {
        let fx = fixtures::f_b();
        let ch = &fx.chart;
        let p = prepare(&fx.f, ch, Options::default())?;
        c.eq("certificate", p.certificate.kind(), "PREPARED");
        c.eq("steps", p.steps.len(), 1);
        let phi = LocalElement::new(ch.u(1), ch.scalar(1).add(&ch.u(2)))?;
        c.eq("z", p.z.clone(), LocalElement::from_poly(ch.y()).sub(&phi));
        c.eq("final vertices", p.final_polyhedron.vertices().to_vec(), vec![pt(&[(5, 2), (0, 1)])]);
        let v = prepare(&fx.f, ch, Options { mode: Mode::Vertex, max_iter: 10 })?;
        c.eq("vertex-only certificate", v.certificate.kind(), "UNDECIDED");
        let marched: Vec<Target> = v.steps.iter().map(|s| s.verdict.target.clone()).collect();
        c.eq("dissolved vertices", marched, (0..10).map(|k| Target::Vertex(pt(&[(1, 1), (k, 1)]))).collect());
        Ok(())
    })
}

pub fn check_f_c() -> Check {
    run(5, "f_C: EMPTY with z = y^2 + y - u1 and f = z^2", |c| {
        let fx = fixtures::f_c();
        let ch = &fx.chart;
        let p = prepare(&fx.f, ch, Options::default())?;
        let zeta = ch.y().pow(2).add(&ch.y()).sub(&ch.u(1));
        match &p.certificate {
            Certificate::Empty { z } => c.eq("witness", z.clone(), LocalElement::from_poly(zeta.clone())),
            other => c.eq("certificate", other.kind(), "EMPTY"),
        }
        let exp = reexpand(&fx.f, &zeta, ch)?;
        c.eq("re-expansion terms", exp.terms.len(), 1);
        if let Some(t) = exp.terms.first() {
            c.eq("term exponent of z", t.b, 2);
            c.ok("term is a unit multiple of z^2", t.a.iter().all(|&k| k == 0) && t.c.is_unit());
        }
        c.eq("evaluated expansion", exp.evaluate(ch), fx.f.clone());
        Ok(())
    })
}

pub fn run_all() -> Vec<Check> {
    vec![check_f_a(), check_f_d(), check_f_e(), check_f_b(), check_f_c()]
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "criterion {}: {} {}", self.id, if self.passed { "PASS" } else { "FAIL" }, self.title)?;
        for line in &self.detail {
            write!(f, "\n    {line}")?;
        }
        Ok(())
    }
}
