//! Preparation of a chart: moving `y` until `Δ(f;u;y)` is the characteristic
//! polyhedron `Δ(f;u)`.
//!
//! Each step tests candidates in a fixed order. Faces come first: the
//! coordinate forms `x_i` whose minimum over `Δ` is zero (weight zero on
//! `y`), then the essential facets in lexicographic order of their
//! coefficients. If no face is solvable the lexicographically least
//! solvable vertex is dissolved. A chart where no vertex is solvable is
//! prepared.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{fmt_rational, Characteristic, Scalar, MIXED_PARAMETER};
use crate::geometry::{self, fmt_point, LinearForm, Point, RationalPolyhedron};
use crate::localring::{
    mth_root_in_y, power_radical_test, reexpand, residual_order, substitute_y, Chart, LocalElement, RootFailure,
    TermExpansion,
};
use crate::newton::{
    face_context, initial_form_face, initial_form_vertex, polyhedron_of, valuation_value, CaseTag, ChartPolyhedron,
    GradedContext, InitialForm,
};
use crate::par::{self, Execution};
use crate::poly::Polynomial;

pub const DEFAULT_MAX_ITER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Faces first, vertices as fallback.
    #[default]
    Face,
    /// Only vertex dissolution (the classical algorithm).
    Vertex,
    /// Faces first, restricted to polynomial increments of a monic `f`.
    Monic,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "face" | "face-first" => Ok(Mode::Face),
            "vertex" | "vertex-only" => Ok(Mode::Vertex),
            "monic" => Ok(Mode::Monic),
            other => Err(Error::InvalidInput(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Face => "face",
            Mode::Vertex => "vertex",
            Mode::Monic => "monic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub mode: Mode,
    pub max_iter: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { mode: Mode::Face, max_iter: DEFAULT_MAX_ITER }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// The coordinate form `x_i` (1-based) with minimum zero.
    Coordinate(usize),
    Facet(Vec<BigRational>),
    /// A face of dimension between one and `d − 2`, by a form minimized
    /// exactly on it.
    Face(Vec<BigRational>),
    Vertex(Point),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Coordinate(i) => write!(f, "coordinate x{i}"),
            Target::Facet(c) => write!(f, "facet {}", fmt_point(c)),
            Target::Face(c) => write!(f, "face {}", fmt_point(c)),
            Target::Vertex(v) => write!(f, "vertex {}", fmt_point(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    NonIntegral,
    Root(RootFailure),
    NotPower,
    NotMonomial,
    NonGraphLift,
    NonPolynomialLift,
    Undecided(String),
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::NonIntegral => f.write_str("non-integral vertex"),
            Reason::Root(r) => write!(f, "root test failed: {r}"),
            Reason::NotPower => f.write_str("initial form is not a perfect power"),
            Reason::NotMonomial => f.write_str("root is not a monomial at the vertex"),
            Reason::NonGraphLift => f.write_str("solution is not of graph form"),
            Reason::NonPolynomialLift => f.write_str("increment is not polynomial (monic mode)"),
            Reason::Undecided(s) => write!(f, "undecided: {s}"),
        }
    }
}

impl Reason {
    pub fn code(&self) -> &'static str {
        match self {
            Reason::NonIntegral => "non-integral",
            Reason::Root(_) | Reason::NotPower | Reason::NotMonomial => "root-test-failed",
            Reason::NonGraphLift => "non-graph-lift",
            Reason::NonPolynomialLift => "non-polynomial-lift",
            Reason::Undecided(_) => "undecided",
        }
    }
}

/// Re-checkable data behind a positive verdict: `in_form = delta · Z^m`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub in_form: Polynomial,
    pub delta: LocalElement,
    pub z: LocalElement,
    pub m: u32,
    /// For vertices, the residue scalar `λ` and its chosen lift `γ`.
    pub lambda: Option<(Scalar, Scalar)>,
}

impl Witness {
    pub fn verify(&self) -> bool {
        let lhs = self.in_form.mul(&self.z.denominator().pow(self.m)).mul(self.delta.denominator());
        let rhs = self.delta.numerator().mul(&self.z.numerator().pow(self.m));
        lhs == rhs
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// `φ`: the step replaces `y` by `y + φ`, so the new coordinate is `z − φ`.
    pub increment: LocalElement,
    pub witness: Witness,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub target: Target,
    pub form: Vec<BigRational>,
    pub l: BigRational,
    pub case: CaseTag,
    pub in_form: Option<String>,
    pub outcome: std::result::Result<Solution, Reason>,
}

impl Verdict {
    pub fn solvable(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn reason(&self) -> Option<&Reason> {
        self.outcome.as_ref().err()
    }
}

/// Replaces the residue-field coefficients of a graded polynomial by their
/// canonical lifts, turning the graded prime `P` back into `p`.
fn lift_poly(poly: &Polynomial, chart: &Chart) -> Polynomial {
    let ch = chart.characteristic;
    if poly.characteristic() == ch {
        return poly.clone();
    }
    let Characteristic::Mixed { p } = ch else { unreachable!("only mixed charts grade the prime") };
    let pp = ch.from_int(p as i64);
    let mut out = Polynomial::zero(ch, chart.nvars());
    for (e, c) in poly.terms() {
        let mut e = e.clone();
        let k = std::mem::replace(&mut e[MIXED_PARAMETER], 0);
        out.add_term(e, &ch.lift(c) * &pp.pow(k));
    }
    out
}

fn lift_element(x: &LocalElement, chart: &Chart) -> Result<LocalElement> {
    LocalElement::new(lift_poly(x.numerator(), chart), lift_poly(x.denominator(), chart))
}

/// Vertex test: integral `v` whose initial form is `c·(Y − λ·U^v)^m`.
pub fn vertex_solvable(exp: &TermExpansion, delta: &RationalPolyhedron, v: &Point, m: u32, chart: &Chart) -> Result<Verdict> {
    let form = delta.positive_form_for_vertex(v)?;
    let l = geometry::eval(&form, v);
    let mut verdict =
        Verdict { target: Target::Vertex(v.clone()), form, l, case: CaseTag::Case1, in_form: None, outcome: Err(Reason::NonIntegral) };
    if !geometry::is_integral(v) {
        return Ok(verdict);
    }
    let inf = initial_form_vertex(exp, delta, v, chart)?;
    verdict.in_form = Some(inf.render(chart));
    verdict.outcome = dissolving_monomial(&inf, v, m, chart);
    Ok(verdict)
}

fn dissolving_monomial(inf: &InitialForm, v: &Point, m: u32, chart: &Chart) -> std::result::Result<Solution, Reason> {
    let root = mth_root_in_y(&inf.poly, m).map_err(Reason::Root)?;
    if !root.h.is_polynomial() {
        return Err(Reason::NotMonomial);
    }
    let cch = inf.poly.characteristic();
    let den_inv = root.h.denominator().constant_term().inv().expect("unit denominator");
    let h = root.h.numerator().scale(&den_inv);
    let expected: Vec<u32> = std::iter::once(0).chain(v.iter().map(|c| c.to_integer().try_into().expect("small exponent"))).collect();
    let mut terms = h.terms();
    let (e, c) = match (terms.next(), terms.next()) {
        (Some((e, c)), None) => (e.clone(), c.clone()),
        _ => return Err(Reason::NotMonomial),
    };
    if e != expected {
        return Err(Reason::NotMonomial);
    }
    let lambda = -&c;
    let ch = chart.characteristic;
    let gamma = if cch == ch { lambda.clone() } else { ch.lift(&lambda) };
    let mut phi = Polynomial::constant(ch, chart.nvars(), gamma.clone());
    for (i, k) in expected[1..].iter().enumerate() {
        phi = phi.mul(&chart.u(i + 1).pow(*k));
    }
    Ok(Solution {
        increment: LocalElement::from_poly(phi),
        witness: Witness {
            in_form: inf.poly.clone(),
            delta: LocalElement::from_poly(root.delta.clone()),
            z: root.z(),
            m,
            lambda: Some((lambda, gamma)),
        },
    })
}

/// Face test along the valuation `ctx` (weight `l` on `y`).
pub fn face_solvable(exp: &TermExpansion, ctx: &GradedContext, target: Target, m: u32, chart: &Chart, mode: Mode) -> Result<Verdict> {
    let inf = initial_form_face(exp, ctx, chart)?;
    let mut verdict = Verdict {
        target,
        form: ctx.form.clone(),
        l: ctx.l.clone(),
        case: ctx.case,
        in_form: Some(inf.render(chart)),
        outcome: Err(Reason::NotPower),
    };
    let solution = match ctx.case {
        CaseTag::Case1 => solve_case1(&inf, m, chart),
        CaseTag::Case2 => {
            if !valuation_value(exp, ctx)?.is_zero() {
                Err(Reason::NotPower)
            } else {
                solve_case2(&inf, m, chart)
            }
        }
    };
    verdict.outcome = solution.and_then(|s| {
        if mode == Mode::Monic && !s.increment.is_polynomial() {
            Err(Reason::NonPolynomialLift)
        } else {
            Ok(s)
        }
    });
    Ok(verdict)
}

fn solve_case1(inf: &InitialForm, m: u32, chart: &Chart) -> std::result::Result<Solution, Reason> {
    let root = mth_root_in_y(&inf.poly, m).map_err(Reason::Root)?;
    if root.h.is_zero() {
        return Err(Reason::NotPower);
    }
    let h = lift_element(&root.h, chart).map_err(|_| Reason::NotPower)?;
    Ok(Solution {
        increment: h.neg(),
        witness: Witness { in_form: inf.poly.clone(), delta: LocalElement::from_poly(root.delta.clone()), z: root.z(), m, lambda: None },
    })
}

fn solve_case2(inf: &InitialForm, m: u32, chart: &Chart) -> std::result::Result<Solution, Reason> {
    let rad = match power_radical_test(&inf.poly, m) {
        Ok(Some(r)) => r,
        Ok(None) => return Err(Reason::NotPower),
        Err(Error::Undecided(s)) => return Err(Reason::Undecided(s)),
        Err(e) => return Err(Reason::Undecided(e.to_string())),
    };
    if rad.z.degree(0) != 1 {
        return Err(Reason::NonGraphLift);
    }
    let c1 = rad.z.coeff_in(0, 1);
    let c0 = rad.z.coeff_in(0, 0);
    let phi = LocalElement::new(c0.neg(), c1.clone()).map_err(|_| Reason::NonGraphLift)?;
    let increment = lift_element(&phi, chart).map_err(|_| Reason::NonGraphLift)?;
    Ok(Solution {
        increment,
        witness: Witness { in_form: inf.poly.clone(), delta: rad.delta, z: LocalElement::from_poly(rad.z), m, lambda: None },
    })
}

/// A factorization `f = δ·z^m` with `z` generating a prime of residual order one.
#[derive(Debug, Clone)]
pub struct EmptyWitness {
    pub z: Polynomial,
    pub expansion: TermExpansion,
}

pub fn empty_precheck(f: &LocalElement, chart: &Chart) -> Result<Option<EmptyWitness>> {
    let m = residual_order(f, chart)?;
    let Some(rad) = power_radical_test(f.numerator(), m)? else { return Ok(None) };
    let expansion = reexpand(f, &rad.z, chart)?;
    if expansion.terms.iter().any(|t| t.b < m) {
        return Err(Error::Invariant("re-expansion of a perfect power kept terms below m".into()));
    }
    Ok(Some(EmptyWitness { z: rad.z, expansion }))
}

/// One accepted step.
#[derive(Debug, Clone)]
pub struct Step {
    pub verdict: Verdict,
    /// Candidates rejected before the accepted one, in test order.
    pub rejected: Vec<Verdict>,
    /// `z` after the step, in the original chart.
    pub coordinate: LocalElement,
    pub polyhedron: RationalPolyhedron,
}

#[derive(Debug, Clone)]
pub enum Certificate {
    /// `Δ(f;u) = ∅`, witnessed by `f = δ·z^m`.
    Empty { z: LocalElement },
    /// Every vertex of the final polyhedron is unsolvable.
    Prepared { vertices: Vec<Verdict> },
    Undecided { reason: String },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Empty { .. } => "EMPTY",
            Certificate::Prepared { .. } => "PREPARED",
            Certificate::Undecided { .. } => "UNDECIDED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaReplay {
    pub forms: Vec<LinearForm>,
    pub denominator_bound: BigInt,
    pub lattice_denominator: BigInt,
    pub values: Vec<BigRational>,
    pub strictly_decreasing: bool,
    pub terminal_zero: bool,
    pub in_lattice: bool,
}

impl LambdaReplay {
    pub fn holds(&self) -> bool {
        self.strictly_decreasing && self.terminal_zero && self.in_lattice
    }
}

#[derive(Debug, Clone)]
pub struct Preparation {
    pub chart: Chart,
    pub f: LocalElement,
    pub m: u32,
    pub options: Options,
    pub initial: RationalPolyhedron,
    pub steps: Vec<Step>,
    pub certificate: Certificate,
    /// The witness coordinate `z` in the original chart.
    pub z: LocalElement,
    /// `φ` with `z = y − φ`, when the witness is of graph form.
    pub shift: Option<LocalElement>,
    pub final_polyhedron: RationalPolyhedron,
    /// `f` rewritten in the final graph coordinate.
    pub final_f: LocalElement,
    pub notes: Vec<String>,
}

impl Preparation {
    /// `z` as text: `y − φ` for graph witnesses.
    pub fn render_z(&self) -> String {
        let names = self.chart.var_names();
        match &self.shift {
            Some(phi) if phi.is_zero() => self.chart.y.clone(),
            Some(phi) => {
                let y = &self.chart.y;
                let text = phi.render(&names);
                let single = phi.is_polynomial() && phi.numerator().num_terms() == 1;
                match text.strip_prefix('-') {
                    Some(rest) if single => format!("{y} + {rest}"),
                    _ if single || !phi.is_polynomial() => format!("{y} - {text}"),
                    _ => format!("{y} - ({text})"),
                }
            }
            None => self.z.render(&names),
        }
    }

    pub fn polyhedra(&self) -> Vec<&RationalPolyhedron> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.polyhedron)).collect()
    }

    pub fn lambda_replay(&self) -> Option<LambdaReplay> {
        match self.certificate {
            Certificate::Prepared { .. } if !self.final_polyhedron.is_empty() => {
                Some(lambda_replay(&self.polyhedra(), &self.final_polyhedron, self.m))
            }
            _ => None,
        }
    }
}

fn check_monic(f: &LocalElement, m: u32) -> Result<()> {
    let num = f.numerator();
    let ok = f.is_polynomial() && num.degree(0) == m && {
        let lead = num.coeff_in(0, m);
        lead.is_constant() && lead == f.denominator().clone()
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("monic mode requires f monic of degree {m} in y")))
    }
}

struct State {
    current: LocalElement,
    phi: LocalElement,
    cp: ChartPolyhedron,
}

impl State {
    fn coordinate(&self, chart: &Chart) -> LocalElement {
        LocalElement::from_poly(chart.y()).sub(&self.phi).reduced()
    }
}

/// Face candidates of the current chart in test order.
fn face_candidates(delta: &RationalPolyhedron, lower: bool) -> Result<Vec<(Target, Vec<BigRational>)>> {
    let d = delta.dim();
    let mut out = Vec::new();
    for i in 0..d {
        let e = LinearForm::coordinate(d, i).coeffs;
        if delta.min_form(&e)?.is_zero() {
            out.push((Target::Coordinate(i + 1), e));
        }
    }
    for facet in delta.facets()? {
        out.push((Target::Facet(facet.coeffs.clone()), facet.coeffs.clone()));
    }
    for face in if lower { delta.faces()? } else { Vec::new() } {
        if face.dim + 1 < d {
            out.push((Target::Face(face.form.clone()), face.form));
        }
    }
    Ok(out)
}

fn vertex_verdicts(state: &State, chart: &Chart, first_only: bool) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for v in state.cp.polyhedron.vertices() {
        let verdict = vertex_solvable(&state.cp.expansion, &state.cp.polyhedron, v, state.cp.m, chart)?;
        let hit = verdict.solvable();
        out.push(verdict);
        if hit && first_only {
            break;
        }
    }
    Ok(out)
}

/// Tests candidates until one is solvable; returns all verdicts, the last
/// being the accepted one when any is.
fn search(state: &State, chart: &Chart, mode: Mode, lower: bool) -> Result<Vec<Verdict>> {
    let mut tested = Vec::new();
    if mode != Mode::Vertex {
        for (target, form) in face_candidates(&state.cp.polyhedron, lower)? {
            let ctx = face_context(&state.cp.polyhedron, &form)?;
            let verdict = face_solvable(&state.cp.expansion, &ctx, target, state.cp.m, chart, mode)?;
            let hit = verdict.solvable();
            tested.push(verdict);
            if hit {
                return Ok(tested);
            }
        }
    }
    let mut vertices = vertex_verdicts(state, chart, true)?;
    if mode == Mode::Monic {
        for v in vertices.iter_mut() {
            if let Ok(s) = &v.outcome {
                if !s.increment.is_polynomial() {
                    v.outcome = Err(Reason::NonPolynomialLift);
                }
            }
        }
    }
    tested.extend(vertices);
    Ok(tested)
}

fn apply(state: &State, verdict: &Verdict, f: &LocalElement, chart: &Chart) -> Result<State> {
    let sol = verdict.outcome.as_ref().map_err(|r| Error::Invariant(format!("applying an unsolvable verdict: {r}")))?;
    if !sol.witness.verify() {
        return Err(Error::Invariant(format!("witness for {} does not re-verify", verdict.target)));
    }
    let current = substitute_y(&state.current, &sol.increment)?;
    let phi = state.phi.add(&sol.increment).reduced();
    let cp = polyhedron_of(&current, chart)?;
    if cp.m != state.cp.m {
        return Err(Error::Invariant("residual order changed".into()));
    }
    if !cp.polyhedron.subset_of(&state.cp.polyhedron) {
        return Err(Error::Invariant(format!("step on {} enlarged the polyhedron", verdict.target)));
    }
    if !cp.polyhedron.is_empty() && cp.polyhedron.min_form(&verdict.form)? <= verdict.l {
        return Err(Error::Invariant(format!("step on {} did not raise its minimum", verdict.target)));
    }
    if substitute_y(f, &phi)? != current {
        return Err(Error::Invariant("accumulated coordinate change does not reproduce the chart".into()));
    }
    Ok(State { current, phi, cp })
}

/// Prepares `f`. In face mode the search first uses coordinate forms,
/// facets and vertices; if that run hits the iteration cap it is repeated
/// with the lower-dimensional faces tested ahead of the vertices.
pub fn prepare(f: &LocalElement, chart: &Chart, options: Options) -> Result<Preparation> {
    let first = prepare_with(f, chart, options, false)?;
    let capped = matches!(first.certificate, Certificate::Undecided { .. }) && first.steps.len() >= options.max_iter;
    if options.mode != Mode::Face || chart.d < 3 || !capped {
        return Ok(first);
    }
    let mut second = prepare_with(f, chart, options, true)?;
    if matches!(second.certificate, Certificate::Undecided { .. }) {
        return Ok(first);
    }
    second.notes.push(format!("iteration cap {} reached without lower-dimensional faces; repeated with them", options.max_iter));
    Ok(second)
}

fn prepare_with(f: &LocalElement, chart: &Chart, options: Options, lower: bool) -> Result<Preparation> {
    let m = residual_order(f, chart)?;
    if options.mode == Mode::Monic {
        check_monic(f, m)?;
    }
    let ch = chart.characteristic;
    let n = chart.nvars();
    let cp = polyhedron_of(f, chart)?;
    let initial = cp.polyhedron.clone();
    let mut notes = Vec::new();
    let base = |certificate: Certificate, z: LocalElement, shift, steps: Vec<Step>, final_polyhedron, final_f, notes| Preparation {
        chart: chart.clone(),
        f: f.clone(),
        m,
        options,
        initial: initial.clone(),
        steps,
        certificate,
        z,
        shift,
        final_polyhedron,
        final_f,
        notes,
    };
    match empty_precheck(f, chart) {
        Ok(Some(w)) => {
            let z = LocalElement::from_poly(w.z);
            let empty = RationalPolyhedron::empty(chart.d);
            return Ok(base(Certificate::Empty { z: z.clone() }, z, None, Vec::new(), empty, f.clone(), notes));
        }
        Ok(None) => {}
        Err(Error::Undecided(s)) => notes.push(format!("emptiness pre-check undecided: {s}")),
        Err(e) => return Err(e),
    }
    let mut state = State { current: f.clone(), phi: LocalElement::zero(ch, n), cp };
    let mut steps: Vec<Step> = Vec::new();
    loop {
        if state.cp.polyhedron.is_empty() {
            let z = state.coordinate(chart);
            return Ok(base(Certificate::Empty { z: z.clone() }, z, Some(state.phi.clone()), steps, state.cp.polyhedron.clone(), state.current.clone(), notes));
        }
        let mut tested = search(&state, chart, options.mode, lower)?;
        let accepted = tested.last().map(|v| v.solvable()).unwrap_or(false);
        if !accepted {
            let vertices = vertex_verdicts(&state, chart, false)?;
            let z = state.coordinate(chart);
            let fin = state.cp.polyhedron.clone();
            let certificate = if vertices.iter().any(|v| v.solvable()) {
                // Only reachable in monic mode: a solvable vertex needs a non-polynomial lift.
                Certificate::Undecided { reason: "solvable vertices remain but no admissible increment exists".into() }
            } else {
                Certificate::Prepared { vertices }
            };
            return Ok(base(certificate, z, Some(state.phi.clone()), steps, fin, state.current.clone(), notes));
        }
        if steps.len() >= options.max_iter {
            let z = state.coordinate(chart);
            let reason = format!("iteration cap {} reached with {} still solvable", options.max_iter, tested.last().expect("nonempty").target);
            return Ok(base(Certificate::Undecided { reason }, z, Some(state.phi.clone()), steps, state.cp.polyhedron.clone(), state.current.clone(), notes));
        }
        let verdict = tested.pop().expect("accepted verdict");
        let next = apply(&state, &verdict, f, chart)?;
        state = next;
        steps.push(Step { verdict, rejected: tested, coordinate: state.coordinate(chart), polyhedron: state.cp.polyhedron.clone() });
    }
}

/// Runs independent preparations, in parallel when enabled.
pub fn prepare_batch(inputs: &[(LocalElement, Chart)], options: Options, exec: Execution) -> Vec<Result<Preparation>> {
    par::map_coarse(exec, inputs, |(f, chart)| prepare(f, chart, options))
}

fn factorial(m: u32) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Replays `Λ = Σ_j (1 − min(1, l_j))` over a sequence of polyhedra, with
/// `L_j` the essential facets of `final_delta` normalized to threshold one.
pub fn lambda_replay(polyhedra: &[&RationalPolyhedron], final_delta: &RationalPolyhedron, m: u32) -> LambdaReplay {
    let forms: Vec<LinearForm> = final_delta.facets().map(|f| f.iter().map(|l| l.normalized()).collect()).unwrap_or_default();
    let a = forms.iter().flat_map(|f| f.coeffs.iter()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let lattice = factorial(m) * &a;
    let one = BigRational::one();
    let values: Vec<BigRational> = polyhedra
        .iter()
        .map(|delta| {
            forms
                .iter()
                .map(|form| {
                    let l = if delta.is_empty() { one.clone() } else { delta.min_form(&form.coeffs).expect("nonempty") };
                    &one - l.min(one.clone())
                })
                .sum()
        })
        .collect();
    let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let terminal_zero = values.last().map(|v| v.is_zero()).unwrap_or(true);
    let in_lattice = values.iter().all(|v| !v.is_negative() && (v * BigRational::from_integer(lattice.clone())).is_integer());
    LambdaReplay { forms, denominator_bound: a, lattice_denominator: lattice, values, strictly_decreasing, terminal_zero, in_lattice }
}

pub fn render_scalar_pair(lambda: &Scalar, gamma: &Scalar) -> (String, String) {
    let r = |s: &Scalar| match s {
        Scalar::Residue { value, .. } => value.to_string(),
        Scalar::Rational(q) => fmt_rational(q),
    };
    (r(lambda), r(gamma))
}
