//! Random charts and elements for the property suites, plus the checks
//! themselves so the acceptance target can rerun them.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use polyprep::exactnum::{rat, Characteristic, Scalar};
use polyprep::geometry::{hull_from_points, Point, RationalPolyhedron};
use polyprep::localring::{normalize_expansion, residual_order, substitute_y, Chart, LocalElement};
use polyprep::lp::solve_square;
use polyprep::newton::{face_context, polyhedron_of, valuation_value, GradedContext};
use polyprep::poly::Polynomial;
use polyprep::preparation::{prepare, Certificate, Mode, Options, Preparation};
use polyprep::Error;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 200;
pub const MAX_DEGREE: u32 = 8;
pub const MAX_DEN: i64 = 6;

pub fn cases() -> u32 {
    std::env::var("POLYPREP_CASES").ok().and_then(|s| s.parse().ok()).unwrap_or(CASES).max(CASES)
}

/// `POLYPREP_CASES` raises the case count for longer soak runs.
pub fn config() -> Config {
    let cases = cases();
    Config { cases, max_global_rejects: 8 * cases, failure_persistence: None, ..Config::default() }
}

#[derive(Debug, Clone)]
pub struct Case {
    pub chart: Chart,
    pub f: LocalElement,
}

/// Raw monomial data: coefficient `n/d`, exponent of `y`, exponents of `u`.
type RawTerm = (i64, i64, u32, Vec<u32>);

fn characteristic() -> impl Strategy<Value = Characteristic> {
    prop_oneof![
        6 => Just(Characteristic::Rational),
        1 => prop_oneof![Just(7u64), Just(11), Just(13)].prop_map(|p| Characteristic::finite_field(p).unwrap()),
    ]
}

fn scalar(ch: Characteristic, n: i64, d: i64) -> Option<Scalar> {
    let s = ch.from_rational(&rat(n, d)).ok()?;
    (!s.is_zero()).then_some(s)
}

fn raw_terms(d: usize, max: usize, max_y: u32) -> impl Strategy<Value = Vec<RawTerm>> {
    prop::collection::vec((-6i64..=6, 1i64..=MAX_DEN, 0..=max_y, prop::collection::vec(0u32..=4, d)), 0..=max)
}

fn poly_from(chart: &Chart, terms: &[RawTerm], max_total: u32) -> Polynomial {
    let ch = chart.characteristic;
    let mut p = Polynomial::zero(ch, chart.nvars());
    for (n, den, b, a) in terms {
        if *b + a.iter().sum::<u32>() > max_total {
            continue;
        }
        if let Some(c) = scalar(ch, *n, *den) {
            let mut e = vec![*b];
            e.extend(a);
            p = p.add(&Polynomial::monomial(ch, chart.nvars(), e, c));
        }
    }
    p
}

/// Parameter part only (no `y`), vanishing at the origin.
fn in_maximal_ideal(chart: &Chart, terms: &[RawTerm], max_total: u32) -> Polynomial {
    let stripped: Vec<RawTerm> =
        terms.iter().filter(|t| t.3.iter().any(|&k| k > 0)).map(|(n, d, _, a)| (*n, *d, 0, a.clone())).collect();
    poly_from(chart, &stripped, max_total)
}

/// A unit `1 + (element of M)` of small degree.
fn unit_from(chart: &Chart, terms: &[RawTerm]) -> Polynomial {
    let m: Vec<RawTerm> = terms.iter().filter(|t| t.2 > 0 || t.3.iter().any(|&k| k > 0)).cloned().collect();
    Polynomial::one(chart.characteristic, chart.nvars()).add(&poly_from(chart, &m, 2))
}

/// Terms of `h` pushed up to total degree at least `floor` by scaling their
/// exponent vectors, so that they sit above the face carrying `(y − g)^m`.
fn lifted(chart: &Chart, terms: &[RawTerm], floor: u32) -> Polynomial {
    let raised: Vec<RawTerm> = terms
        .iter()
        .filter(|t| t.3.iter().any(|&k| k > 0))
        .map(|(n, d, _, a)| {
            let total: u32 = a.iter().sum();
            let k = floor.div_ceil(total).max(1);
            (*n, *d, 0, a.iter().map(|e| e * k).collect())
        })
        .collect();
    poly_from(chart, &raised, MAX_DEGREE)
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    /// `c·y^m` plus terms in `M·y^b` (`b < m`) and higher powers of `y`.
    Generic,
    /// `(y − g)^m·unit + h`: solvable by a polynomial change.
    Power,
    /// `(w·y − g)^m·unit + h` with `w` a unit: needs a fraction lift.
    FractionPower,
}

/// Random elements of residual order `m` in charts with `d ≤ 3` parameters.
pub fn case() -> impl Strategy<Value = Case> {
    let shape = prop_oneof![Just(Shape::Generic), Just(Shape::Power), Just(Shape::FractionPower)];
    (characteristic(), 1usize..=3, 1u32..=3, shape).prop_flat_map(|(ch, d, m, shape)| {
        (
            Just((ch, d, m, shape)),
            raw_terms(d, 6, m + 1),
            prop::collection::vec((-6i64..=6, 1i64..=MAX_DEN, Just(0u32), prop::collection::vec(0u32..=2, d)), 1..=3),
            raw_terms(d, 3, 1),
            prop::collection::vec((-3i64..=3, 1i64..=MAX_DEN, Just(0u32), prop::collection::vec(0u32..=1, d)), 1..=2),
            (1i64..=6, 1i64..=MAX_DEN),
        )
            .prop_filter_map("degenerate sample", |((ch, d, m, shape), t1, tg, tu, tw, (cn, cd))| {
                let chart = Chart::new(ch, d).ok()?;
                let lead = scalar(ch, cn, cd)?;
                let f = match shape {
                    Shape::Generic => {
                        let low: Vec<RawTerm> = t1.iter().filter(|t| t.2 < m && t.3.iter().any(|&k| k > 0)).cloned().collect();
                        let high: Vec<RawTerm> = t1.iter().filter(|t| t.2 > m).cloned().collect();
                        let ym = chart.y().pow(m).scale(&lead);
                        ym.add(&poly_from(&chart, &low, MAX_DEGREE)).add(&poly_from(&chart, &high, MAX_DEGREE))
                    }
                    Shape::Power | Shape::FractionPower => {
                        let g = in_maximal_ideal(&chart, &tg, 2);
                        let floor = m * g.total_degree().max(1) + 1;
                        let h = lifted(&chart, &t1, floor);
                        let w = match shape {
                            Shape::FractionPower => Polynomial::one(ch, chart.nvars()).add(&in_maximal_ideal(&chart, &tw, 1)),
                            _ => Polynomial::one(ch, chart.nvars()),
                        };
                        let unit = unit_from(&chart, &tu);
                        w.mul(&chart.y()).sub(&g).pow(m).scale(&lead).mul(&unit).add(&h)
                    }
                };
                if f.total_degree() > MAX_DEGREE + 2 {
                    return None;
                }
                let f = LocalElement::from_poly(f);
                residual_order(&f, &chart).ok().filter(|&r| r == m)?;
                Some(Case { chart, f })
            })
    })
}

pub fn unit(chart: &Chart) -> impl Strategy<Value = LocalElement> {
    let chart = chart.clone();
    raw_terms(chart.d, 3, 1).prop_map(move |t| LocalElement::from_poly(unit_from(&chart, &t)))
}

/// Point clouds in the positive orthant with small rational coordinates.
pub fn cloud() -> impl Strategy<Value = (usize, Vec<Point>)> {
    (1usize..=3).prop_flat_map(|d| {
        (Just(d), prop::collection::vec(prop::collection::vec((0i64..=8, 1i64..=MAX_DEN), d), 1..=9)).prop_filter_map(
            "origin",
            |(d, raw)| {
                let pts: Vec<Point> = raw.iter().map(|p| p.iter().map(|&(n, q)| rat(n, q)).collect()).collect();
                pts.iter().all(|p| p.iter().any(|c| !c.is_zero())).then_some((d, pts))
            },
        )
    })
}

pub fn query(d: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec((0i64..=16, 1i64..=MAX_DEN), d).prop_map(|v| v.iter().map(|&(n, q)| rat(n, q)).collect())
}

pub fn weights(d: usize) -> impl Strategy<Value = (Vec<BigRational>, BigRational)> {
    (prop::collection::vec((0i64..=4, 1i64..=MAX_DEN), d), (0i64..=4, 1i64..=MAX_DEN)).prop_filter_map(
        "zero form",
        |(w, (ln, ld))| {
            let form: Vec<BigRational> = w.iter().map(|&(n, q)| rat(n, q)).collect();
            form.iter().any(|c| !c.is_zero()).then(|| (form, rat(ln, ld)))
        },
    )
}

/// Membership by enumerating basic solutions of
/// `Σ λ_s s + σ = x, Σ λ_s = 1, λ, σ ≥ 0`: by Carathéodory a feasible
/// system has a basic feasible solution with at most `d + 1` nonzero entries.
pub fn brute_contains(points: &[Point], x: &Point) -> bool {
    let d = x.len();
    let ncols = points.len() + d;
    let column = |j: usize| -> Vec<BigRational> {
        if j < points.len() {
            points[j].iter().cloned().chain(std::iter::once(BigRational::one())).collect()
        } else {
            (0..=d).map(|i| if i == j - points.len() { BigRational::one() } else { BigRational::zero() }).collect()
        }
    };
    let rhs: Vec<BigRational> = x.iter().cloned().chain(std::iter::once(BigRational::one())).collect();
    let mut chosen = Vec::new();
    subsets(ncols, d + 1, 0, &mut chosen, &mut |cols| {
        let cols_data: Vec<Vec<BigRational>> = cols.iter().map(|&j| column(j)).collect();
        let matrix: Vec<Vec<BigRational>> =
            (0..=d).map(|i| cols_data.iter().map(|c| c[i].clone()).collect()).collect();
        solve_square(&matrix, &rhs).is_some_and(|sol| sol.iter().all(|v| *v >= BigRational::zero()))
    })
}

fn subsets(n: usize, k: usize, start: usize, chosen: &mut Vec<usize>, found: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if chosen.len() == k {
        return found(chosen);
    }
    for j in start..n {
        chosen.push(j);
        if subsets(n, k, j + 1, chosen, found) {
            return true;
        }
        chosen.pop();
    }
    false
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

/// Skips samples the engine declines (caps) rather than failing on them.
fn decided(r: polyprep::Result<Preparation>) -> Result<Preparation, TestCaseError> {
    match r {
        Ok(p) => Ok(p),
        Err(Error::GeometryCap(_) | Error::Undecided(_) | Error::ReexpansionIncomplete(_)) => {
            Err(TestCaseError::reject("engine cap"))
        }
        Err(e) => Err(TestCaseError::fail(format!("prepare failed: {e}"))),
    }
}

fn opts(mode: Mode) -> Options {
    Options { mode, max_iter: 24 }
}

pub fn check_unit_invariance(case: &Case, u: &LocalElement) -> Result<(), TestCaseError> {
    let base = polyhedron_of(&case.f, &case.chart).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let scaled = case.f.mul(u);
    let other = polyhedron_of(&scaled, &case.chart).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(base.polyhedron == other.polyhedron, || format!("Δ(f) ≠ Δ(f·unit) for {:?}", case.f))?;
    ensure(base.m == other.m, || "residual order changed under a unit".into())?;
    let as_fraction = LocalElement::new(scaled.numerator().clone(), scaled.denominator().mul(u.numerator()))
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let again = polyhedron_of(&as_fraction, &case.chart).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(again.polyhedron == base.polyhedron, || "Δ depends on the fraction representation".into())
}

pub fn check_hull(d: usize, pts: &[Point], x: &Point) -> Result<(), TestCaseError> {
    let h = hull_from_points(d, pts).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let again = hull_from_points(d, h.vertices()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(again == h, || format!("hull not idempotent on {pts:?}"))?;
    ensure(pts.iter().all(|p| h.contains(p)), || "hull misses a generator".into())?;
    let lp = h.contains(x);
    let brute = brute_contains(pts, x);
    ensure(lp == brute, || format!("membership of {x:?} in hull {pts:?}: LP {lp}, oracle {brute}"))?;
    ensure(h.satisfies_facets(x) == brute, || format!("facet description disagrees at {x:?}"))
}

/// A nonzero polynomial element of the same chart.
pub fn element_in(chart: &Chart) -> impl Strategy<Value = LocalElement> {
    let chart = chart.clone();
    raw_terms(chart.d, 5, 3).prop_filter_map("zero", move |t| {
        let p = poly_from(&chart, &t, MAX_DEGREE);
        (!p.is_zero()).then(|| LocalElement::from_poly(p))
    })
}

pub fn check_valuation(case: &Case, g: &LocalElement, form: &[BigRational], l: &BigRational) -> Result<(), TestCaseError> {
    let ctx = GradedContext::new(form.to_vec(), l.clone()).map_err(|_| TestCaseError::reject("form"))?;
    let v = |x: &LocalElement| valuation_value(&normalize_expansion(x, &case.chart), &ctx).unwrap();
    let (vf, vg, vfg) = (v(&case.f), v(&g), v(&case.f.mul(&g)));
    ensure(vfg == &vf + &vg, || format!("v(fg) = {vfg} ≠ {vf} + {vg}"))
}

pub fn check_facet_values(case: &Case) -> Result<(), TestCaseError> {
    let cp = polyhedron_of(&case.f, &case.chart).map_err(|e| TestCaseError::fail(e.to_string()))?;
    if cp.polyhedron.is_empty() {
        return Ok(());
    }
    let facets = cp.polyhedron.facets().map_err(|e| TestCaseError::fail(e.to_string()))?;
    for facet in facets {
        let ctx = face_context(&cp.polyhedron, &facet.coeffs).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let v = valuation_value(&cp.expansion, &ctx).map_err(|e| TestCaseError::fail(e.to_string()))?;
        ensure(v == &ctx.l * BigInt::from(cp.m), || format!("v = {v} but m·l = {}·{}", cp.m, ctx.l))?;
    }
    Ok(())
}

/// Descent, witness and residual-order checks along every accepted step.
pub fn check_trace(case: &Case, mode: Mode) -> Result<(), TestCaseError> {
    let p = decided(prepare(&case.f, &case.chart, opts(mode)))?;
    let mut previous: RationalPolyhedron = p.initial.clone();
    for (i, step) in p.steps.iter().enumerate() {
        let sol = step.verdict.outcome.as_ref().map_err(|r| TestCaseError::fail(format!("step {i} not solvable: {r}")))?;
        ensure(sol.witness.verify(), || format!("step {i}: witness fails re-verification"))?;
        ensure(step.polyhedron.subset_of(&previous), || format!("step {i}: Δ grew"))?;
        let before = previous.min_form(&step.verdict.form).unwrap();
        ensure(before == step.verdict.l, || format!("step {i}: l is not the minimum of the form"))?;
        let after = if step.polyhedron.is_empty() { None } else { Some(step.polyhedron.min_form(&step.verdict.form).unwrap()) };
        ensure(after.as_ref().map_or(true, |a| *a > before), || format!("step {i}: min of the form did not increase"))?;
        let phi = LocalElement::from_poly(case.chart.y()).sub(&step.coordinate);
        let g = substitute_y(&case.f, &phi).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let cp = polyhedron_of(&g, &case.chart).map_err(|e| TestCaseError::fail(e.to_string()))?;
        ensure(cp.m == p.m, || format!("step {i}: residual order changed"))?;
        ensure(cp.polyhedron == step.polyhedron, || format!("step {i}: recorded Δ differs from recomputation"))?;
        previous = step.polyhedron.clone();
    }
    if let Certificate::Prepared { vertices } = &p.certificate {
        for v in vertices {
            if let Ok(sol) = &v.outcome {
                ensure(sol.witness.verify(), || "certificate witness fails".into())?;
            }
        }
    }
    ensure(residual_order(&p.final_f, &case.chart).ok() == Some(p.m), || "final residual order".into())
}

pub fn check_cross_mode(case: &Case) -> Result<(), TestCaseError> {
    let face = decided(prepare(&case.f, &case.chart, opts(Mode::Face)))?;
    let vertex = decided(prepare(&case.f, &case.chart, opts(Mode::Vertex)))?;
    if face.certificate.kind() == "UNDECIDED" || vertex.certificate.kind() == "UNDECIDED" {
        return Ok(());
    }
    ensure(face.final_polyhedron == vertex.final_polyhedron, || {
        format!("modes disagree on {:?}: {:?} vs {:?}", case.f, face.final_polyhedron.vertices(), vertex.final_polyhedron.vertices())
    })
}

/// Runs one property for [`CASES`] cases; returns the first failure.
pub fn run<S: Strategy>(strategy: S, check: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(config());
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

pub fn unit_invariance() -> Result<(), String> {
    run(case().prop_flat_map(|c| { let u = unit(&c.chart); (Just(c), u) }), |(c, u)| check_unit_invariance(&c, &u))
}

pub fn hull_membership() -> Result<(), String> {
    run(cloud().prop_flat_map(|(d, pts)| (Just(d), Just(pts), query(d))), |(d, pts, x)| check_hull(d, &pts, &x))
}

pub fn valuation_additivity() -> Result<(), String> {
    let strategy = case().prop_flat_map(|c| {
        let (g, w) = (element_in(&c.chart), weights(c.chart.d));
        (Just(c), g, w)
    });
    run(strategy, |(a, g, (form, l))| check_valuation(&a, &g, &form, &l))
}

pub fn facet_values() -> Result<(), String> {
    run(case(), |c| check_facet_values(&c))
}

pub fn trace_face() -> Result<(), String> {
    run(case(), |c| check_trace(&c, Mode::Face))
}

pub fn trace_vertex() -> Result<(), String> {
    run(case(), |c| check_trace(&c, Mode::Vertex))
}

pub fn cross_mode() -> Result<(), String> {
    run(case(), |c| check_cross_mode(&c))
}

/// Every suite by name.
pub fn suites() -> Vec<(&'static str, fn() -> Result<(), String>)> {
    vec![
        ("expansion and unit invariance of the polyhedron", unit_invariance),
        ("hull idempotence and LP-oracle membership", hull_membership),
        ("valuation additivity", valuation_additivity),
        ("v(f) = m*l on facets", facet_values),
        ("descent, witnesses and m along face-first traces", trace_face),
        ("descent, witnesses and m along vertex-only traces", trace_vertex),
        ("cross-mode agreement of the final polyhedron", cross_mode),
    ]
}
