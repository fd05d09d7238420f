//! Problem files and reports.
//!
//! Everything is JSON with exact scalars written as strings (`"3"`, `"-5/4"`,
//! `"2 mod 3"`). A polynomial is either an expression string or a list of
//! `{coeff, y, u}` term records.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{fmt_rational, parse_rational, Characteristic, Scalar, MIXED_PARAMETER};
use crate::geometry::{FacetRecord, PolyhedronRecord};
use crate::localring::{residual_order, Chart, LocalElement};
use crate::newton::polyhedron_of;
use crate::poly::Polynomial;
use crate::preparation::{Certificate, Mode, Preparation, Step, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: String,
    pub y: u32,
    pub u: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolynomialSpec {
    Expression(String),
    Terms(Vec<TermRecord>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recenter {
    /// `y ↦ y + c`.
    #[serde(default)]
    pub y: Option<String>,
    /// `u_i ↦ u_i + c_i`, one entry per parameter.
    #[serde(default)]
    pub u: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preprocess {
    #[serde(default)]
    pub recenter: Option<Recenter>,
    /// Simultaneous substitutions `name ↦ expression`, which must form a
    /// regular system of parameters.
    #[serde(default)]
    pub substitute: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileOptions {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    /// Coordinates kept by `render` when `d = 3` (1-based, as on the command line).
    #[serde(default)]
    pub projection: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(default)]
    pub name: Option<String>,
    pub characteristic: Characteristic,
    pub d: usize,
    #[serde(default)]
    pub y: Option<String>,
    #[serde(default)]
    pub names: Option<Vec<String>>,
    pub f: PolynomialSpec,
    /// Optional unit denominator of `f`.
    #[serde(default)]
    pub denominator: Option<PolynomialSpec>,
    #[serde(default)]
    pub preprocess: Option<Preprocess>,
    #[serde(default)]
    pub options: FileOptions,
}

/// A parsed problem: chart and `f` after preprocessing.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub chart: Chart,
    pub f: LocalElement,
    pub options: FileOptions,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ProblemFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn chart(&self) -> Result<Chart> {
        let ch = match self.characteristic {
            Characteristic::Rational => Characteristic::Rational,
            Characteristic::FiniteField { p } => Characteristic::finite_field(p)?,
            Characteristic::Mixed { p } => Characteristic::mixed(p)?,
        };
        let mut chart = Chart::new(ch, self.d)?;
        if self.y.is_some() || self.names.is_some() {
            let y = self.y.clone().unwrap_or_else(|| chart.y.clone());
            let names = self.names.clone().unwrap_or_else(|| chart.names.clone());
            chart = chart.with_names(&y, names)?;
        }
        Ok(chart)
    }

    pub fn problem(&self) -> Result<Problem> {
        let chart = self.chart()?;
        let mut num = parse_spec(&self.f, &chart)?;
        let mut den = match &self.denominator {
            Some(spec) => parse_spec(spec, &chart)?,
            None => Polynomial::one(chart.characteristic, chart.nvars()),
        };
        if let Some(pre) = &self.preprocess {
            num = preprocess(&num, pre, &chart)?;
            den = preprocess(&den, pre, &chart)?;
        }
        let f = LocalElement::new(num, den)?;
        residual_order(&f, &chart)?;
        Ok(Problem { name: self.name.clone().unwrap_or_else(|| "f".into()), chart, f, options: self.options.clone() })
    }

    /// A problem file for a fixture, with `f` as a term list.
    pub fn from_parts(name: &str, chart: &Chart, f: &LocalElement) -> ProblemFile {
        ProblemFile {
            name: Some(name.to_string()),
            characteristic: chart.characteristic,
            d: chart.d,
            y: Some(chart.y.clone()),
            names: Some(chart.names.clone()),
            f: PolynomialSpec::Terms(poly_records(f.numerator())),
            denominator: (!f.denominator().is_constant() || !f.denominator().constant_term().is_one())
                .then(|| PolynomialSpec::Terms(poly_records(f.denominator()))),
            preprocess: None,
            options: FileOptions::default(),
        }
    }
}

pub fn parse_spec(spec: &PolynomialSpec, chart: &Chart) -> Result<Polynomial> {
    match spec {
        PolynomialSpec::Expression(s) => parse_expression(s, chart),
        PolynomialSpec::Terms(ts) => {
            let ch = chart.characteristic;
            let mut p = Polynomial::zero(ch, chart.nvars());
            for t in ts {
                if t.u.len() != chart.d {
                    return Err(Error::InvalidInput(format!("term {t:?} needs {} parameter exponents", chart.d)));
                }
                let c = parse_scalar(&t.coeff, ch)?;
                let mut e = vec![t.y];
                e.extend(&t.u);
                p = p.add(&Polynomial::monomial(ch, chart.nvars(), e, c));
            }
            Ok(chart.fold_parameter(&p))
        }
    }
}

pub fn parse_scalar(s: &str, ch: Characteristic) -> Result<Scalar> {
    let s = s.trim();
    match s.parse::<Scalar>()? {
        Scalar::Rational(q) => ch.from_rational(&q),
        Scalar::Residue { value, modulus } => {
            if ch != (Characteristic::FiniteField { p: modulus }) {
                return Err(Error::InvalidInput(format!("residue {s:?} in the wrong mode")));
            }
            Ok(Scalar::Residue { value, modulus })
        }
    }
}

pub fn scalar_string(s: &Scalar) -> String {
    s.to_string()
}

pub fn poly_records(p: &Polynomial) -> Vec<TermRecord> {
    p.terms().map(|(e, c)| TermRecord { coeff: scalar_string(c), y: e[0], u: e[1..].to_vec() }).collect()
}

/// Simultaneous substitution after recentering, with a check that the new
/// parameters form a regular system of parameters.
pub fn preprocess(f: &Polynomial, pre: &Preprocess, chart: &Chart) -> Result<Polynomial> {
    let ch = chart.characteristic;
    let n = chart.nvars();
    let names = chart.var_names();
    let mut images: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(ch, n, i)).collect();
    if let Some(rc) = &pre.recenter {
        if let Some(c) = &rc.y {
            images[0] = images[0].add(&Polynomial::constant(ch, n, parse_scalar(c, ch)?));
        }
        if !rc.u.is_empty() && rc.u.len() != chart.d {
            return Err(Error::InvalidInput(format!("recenter needs {} parameter shifts", chart.d)));
        }
        for (i, c) in rc.u.iter().enumerate() {
            if ch.is_mixed() && i + 1 == MIXED_PARAMETER && !parse_scalar(c, ch)?.is_zero() {
                return Err(Error::InvalidInput("the prime parameter cannot be recentered".into()));
            }
            images[i + 1] = images[i + 1].add(&Polynomial::constant(ch, n, parse_scalar(c, ch)?));
        }
    }
    if !pre.substitute.is_empty() {
        let mut subs = images.clone();
        for (name, expr) in &pre.substitute {
            let idx = names
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown variable {name:?} in substitution")))?;
            if ch.is_mixed() && idx == MIXED_PARAMETER {
                return Err(Error::InvalidInput("the prime parameter cannot be redefined".into()));
            }
            let g = parse_expression(expr, chart)?;
            check_parameter(&g, name)?;
            subs[idx] = g;
        }
        check_regular_system(&subs, chart)?;
        images = images.iter().map(|p| compose(p, &subs)).collect();
    }
    Ok(compose(f, &images))
}

fn check_parameter(g: &Polynomial, name: &str) -> Result<()> {
    if g.characteristic().is_unit(&g.constant_term()) {
        return Err(Error::InvalidInput(format!("substitution for {name} does not vanish at the origin")));
    }
    Ok(())
}

/// The linear parts of the new parameters must be independent over the
/// residue field.
fn check_regular_system(subs: &[Polynomial], chart: &Chart) -> Result<()> {
    let ch = chart.characteristic;
    let n = chart.nvars();
    let slots: Vec<usize> = (0..n).filter(|&i| !(ch.is_mixed() && i == MIXED_PARAMETER)).collect();
    let matrix: Vec<Vec<BigRational>> = slots
        .iter()
        .map(|&i| {
            slots
                .iter()
                .map(|&j| {
                    let mut e = vec![0; n];
                    e[j] = 1;
                    match subs[i].coefficient(&e) {
                        Scalar::Rational(q) => q,
                        Scalar::Residue { value, .. } => BigRational::from_integer(value.into()),
                    }
                })
                .collect()
        })
        .collect();
    let det = determinant(matrix);
    let p = ch.residue_char();
    let ok = if p == 0 {
        !det.is_zero()
    } else {
        !det.is_zero() && !(det.numer() % num_bigint::BigInt::from(p)).is_zero()
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput("substitutions do not form a regular system of parameters".into()))
    }
}

fn determinant(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&i| !a[i][col].is_zero()) else { return BigRational::zero() };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for i in col + 1..n {
            let f = &a[i][col] / &p;
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let v = &a[col][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    det
}

fn compose(f: &Polynomial, images: &[Polynomial]) -> Polynomial {
    let ch = f.characteristic();
    let n = f.nvars();
    let mut out = Polynomial::zero(ch, n);
    for (e, c) in f.terms() {
        let mut t = Polynomial::constant(ch, n, c.clone());
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                t = t.mul(&images[i].pow(k));
            }
        }
        out = out.add(&t);
    }
    out
}

/// Parses `+ - * / ^` expressions over the chart's variable names. Division
/// is only by scalars; in mixed mode the prime's name denotes `p`.
pub fn parse_expression(s: &str, chart: &Chart) -> Result<Polynomial> {
    let tokens = tokenize(s)?;
    let mut parser = Parser { tokens, pos: 0, chart, names: chart.var_names() };
    let p = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!("unexpected {:?} in {s:?}", parser.tokens[parser.pos])));
    }
    Ok(chart.fold_parameter(&p))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    chart: &'a Chart,
    names: Vec<String>,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                acc.mul(&rhs)
            } else {
                if !rhs.is_constant() || rhs.is_zero() {
                    return Err(Error::Parse("division is only by nonzero scalars".into()));
                }
                let inv = match rhs.constant_term() {
                    Scalar::Rational(q) => self.chart.characteristic.from_rational(&q.recip())?,
                    r => r.inv().expect("nonzero"),
                };
                acc.scale(&inv)
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Tok::Num(k)) => {
                    let k: u32 = k.parse().map_err(|_| Error::Parse(format!("bad exponent {k}")))?;
                    self.pos += 1;
                    return Ok(base.pow(k));
                }
                other => return Err(Error::Parse(format!("expected an exponent, found {other:?}"))),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let ch = self.chart.characteristic;
        let n = self.chart.nvars();
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let q = parse_rational(&s)?;
                Ok(Polynomial::constant(ch, n, ch.from_rational(&q)?))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let idx = self
                    .names
                    .iter()
                    .position(|x| *x == name)
                    .or_else(|| name.strip_prefix('u').and_then(|k| k.parse::<usize>().ok()).filter(|&k| k >= 1 && k <= self.chart.d))
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                Ok(if idx == 0 { self.chart.y() } else { self.chart.u(idx) })
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected {other:?}"))),
        }
    }
}

fn rats(v: &[BigRational]) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

/// An exact fraction in the chart's variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionRecord {
    pub text: String,
    pub numerator: Vec<TermRecord>,
    pub denominator: Vec<TermRecord>,
}

impl FractionRecord {
    pub fn new(x: &LocalElement, chart: &Chart) -> Self {
        FractionRecord {
            text: x.render(&chart.var_names()),
            numerator: poly_records(x.numerator()),
            denominator: poly_records(x.denominator()),
        }
    }

    pub fn to_element(&self, chart: &Chart) -> Result<LocalElement> {
        LocalElement::new(
            parse_spec(&PolynomialSpec::Terms(self.numerator.clone()), chart)?,
            parse_spec(&PolynomialSpec::Terms(self.denominator.clone()), chart)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyhedronReport {
    pub name: String,
    pub chart: Chart,
    pub m: u32,
    pub support: Vec<SupportRecord>,
    pub polyhedron: PolyhedronRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportRecord {
    pub a: Vec<u32>,
    pub b: u32,
    pub point: Vec<String>,
}

pub fn polyhedron_report(problem: &Problem) -> Result<PolyhedronReport> {
    let cp = polyhedron_of(&problem.f, &problem.chart)?;
    Ok(PolyhedronReport {
        name: problem.name.clone(),
        chart: problem.chart.clone(),
        m: cp.m,
        support: cp.cloud.points.iter().map(|p| SupportRecord { a: p.a.clone(), b: p.b, point: rats(&p.point) }).collect(),
        polyhedron: PolyhedronRecord::from(&cp.polyhedron),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub target: String,
    pub form: Vec<String>,
    pub l: String,
    pub case: String,
    pub in_form: Option<String>,
    pub solvable: bool,
    pub reason_code: Option<String>,
    pub reason: Option<String>,
    pub lambda: Option<String>,
    pub gamma: Option<String>,
    pub delta: Option<String>,
    pub root: Option<String>,
}

impl VerdictRecord {
    pub fn new(v: &Verdict, chart: &Chart) -> Self {
        let (lambda, gamma, delta, root) = match &v.outcome {
            Ok(sol) => {
                let names = crate::newton::graded_names(chart, &crate::newton::GradedContext::new(v.form.clone(), v.l.clone()).expect("valid form"));
                let (lam, gam) = match &sol.witness.lambda {
                    Some((l, g)) => (Some(l.to_string()), Some(g.to_string())),
                    None => (None, None),
                };
                (lam, gam, Some(sol.witness.delta.render(&names)), Some(sol.witness.z.render(&names)))
            }
            Err(_) => (None, None, None, None),
        };
        VerdictRecord {
            target: v.target.to_string(),
            form: rats(&v.form),
            l: fmt_rational(&v.l),
            case: match v.case {
                crate::newton::CaseTag::Case1 => "case-1".into(),
                crate::newton::CaseTag::Case2 => "case-2".into(),
            },
            in_form: v.in_form.clone(),
            solvable: v.solvable(),
            reason_code: v.reason().map(|r| r.code().to_string()),
            reason: v.reason().map(|r| r.to_string()),
            lambda,
            gamma,
            delta,
            root,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub verdict: VerdictRecord,
    pub increment: FractionRecord,
    pub coordinate: FractionRecord,
    pub polyhedron: PolyhedronRecord,
    pub lambda: Option<String>,
    pub rejected: Vec<VerdictRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaRecord {
    pub forms: Vec<FacetRecord>,
    pub denominator_bound: String,
    pub lattice_denominator: String,
    pub values: Vec<String>,
    pub strictly_decreasing: bool,
    pub terminal_zero: bool,
    pub in_lattice: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepareReport {
    pub name: String,
    pub chart: Chart,
    pub mode: Mode,
    pub m: u32,
    pub certificate: String,
    pub reason: Option<String>,
    pub z: String,
    pub witness: FractionRecord,
    pub steps: usize,
    pub initial: PolyhedronRecord,
    #[serde(rename = "final")]
    pub final_polyhedron: PolyhedronRecord,
    pub vertex_certificates: Vec<VerdictRecord>,
    pub lambda: Option<LambdaRecord>,
    pub trace: Option<Vec<StepRecord>>,
    pub notes: Vec<String>,
}

fn step_record(i: usize, s: &Step, chart: &Chart, lambda: Option<&BigRational>) -> StepRecord {
    StepRecord {
        index: i + 1,
        verdict: VerdictRecord::new(&s.verdict, chart),
        increment: FractionRecord::new(&s.verdict.outcome.as_ref().expect("accepted").increment, chart),
        coordinate: FractionRecord::new(&s.coordinate, chart),
        polyhedron: PolyhedronRecord::from(&s.polyhedron),
        lambda: lambda.map(fmt_rational),
        rejected: s.rejected.iter().map(|v| VerdictRecord::new(v, chart)).collect(),
    }
}

pub fn prepare_report(name: &str, p: &Preparation, trace: bool) -> PrepareReport {
    let chart = &p.chart;
    let replay = p.lambda_replay();
    let lambda = replay.as_ref().map(|r| LambdaRecord {
        forms: r.forms.iter().map(|f| FacetRecord { coeffs: rats(&f.coeffs), min: fmt_rational(&f.min) }).collect(),
        denominator_bound: r.denominator_bound.to_string(),
        lattice_denominator: r.lattice_denominator.to_string(),
        values: r.values.iter().map(fmt_rational).collect(),
        strictly_decreasing: r.strictly_decreasing,
        terminal_zero: r.terminal_zero,
        in_lattice: r.in_lattice,
    });
    let (reason, vertex_certificates) = match &p.certificate {
        Certificate::Prepared { vertices } => (None, vertices.iter().map(|v| VerdictRecord::new(v, chart)).collect()),
        Certificate::Undecided { reason } => (Some(reason.clone()), Vec::new()),
        Certificate::Empty { .. } => (None, Vec::new()),
    };
    PrepareReport {
        name: name.to_string(),
        chart: chart.clone(),
        mode: p.options.mode,
        m: p.m,
        certificate: p.certificate.kind().to_string(),
        reason,
        z: p.render_z(),
        witness: FractionRecord::new(&p.z, chart),
        steps: p.steps.len(),
        initial: PolyhedronRecord::from(&p.initial),
        final_polyhedron: PolyhedronRecord::from(&p.final_polyhedron),
        vertex_certificates,
        lambda,
        trace: trace.then(|| {
            p.steps
                .iter()
                .enumerate()
                .map(|(i, s)| step_record(i, s, chart, replay.as_ref().and_then(|r| r.values.get(i + 1))))
                .collect()
        }),
        notes: p.notes.clone(),
    }
}

/// Parses a decimal rational from a report field.
pub fn report_rational(s: &str) -> Result<BigRational> {
    let q = parse_rational(s)?;
    if q.is_negative() {
        return Err(Error::Parse(format!("negative value {s}")));
    }
    Ok(q)
}
