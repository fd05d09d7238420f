//! Polyhedra of expansions, monomial valuations and their initial forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Characteristic, MIXED_PARAMETER};
use crate::geometry::{self, hull_from_points, Point, RationalPolyhedron};
use crate::localring::{exponents, normalize_expansion, residual_order, Chart, LocalElement, TermExpansion};
use crate::poly::Polynomial;

/// A projected support point `a / (m − b)` with the index of its term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPoint {
    pub a: Vec<u32>,
    pub b: u32,
    pub point: Point,
    pub term: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportCloud {
    pub m: u32,
    pub d: usize,
    pub points: Vec<SupportPoint>,
}

impl SupportCloud {
    pub fn coordinates(&self) -> Vec<Point> {
        self.points.iter().map(|p| p.point.clone()).collect()
    }

    pub fn polyhedron(&self) -> Result<RationalPolyhedron> {
        hull_from_points(self.d, &self.coordinates())
    }
}

pub fn support_cloud(exp: &TermExpansion, m: u32, d: usize) -> SupportCloud {
    let points = exp
        .terms
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.point(m).map(|point| SupportPoint { a: t.a.clone(), b: t.b, point, term: i }))
        .collect();
    SupportCloud { m, d, points }
}

/// The residual order, the canonical expansion and `Δ(f;u;y)`.
#[derive(Debug, Clone)]
pub struct ChartPolyhedron {
    pub m: u32,
    pub expansion: TermExpansion,
    pub cloud: SupportCloud,
    pub polyhedron: RationalPolyhedron,
}

pub fn polyhedron_of(f: &LocalElement, chart: &Chart) -> Result<ChartPolyhedron> {
    let m = residual_order(f, chart)?;
    let expansion = normalize_expansion(f, chart);
    polyhedron_of_expansion(expansion, m, chart.d)
}

pub fn polyhedron_of_expansion(expansion: TermExpansion, m: u32, d: usize) -> Result<ChartPolyhedron> {
    let cloud = support_cloud(&expansion, m, d);
    let polyhedron = cloud.polyhedron()?;
    Ok(ChartPolyhedron { m, expansion, cloud, polyhedron })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    /// `l > 0`: the degree-0 ring is built from the parameters outside `I`.
    Case1,
    /// `l = 0`: `y` belongs to the degree-0 ring.
    Case2,
}

/// A monomial valuation `y ↦ l`, `u_i ↦ λ_i` and its graded structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedContext {
    pub form: Vec<BigRational>,
    pub l: BigRational,
    /// 1-based indices with `λ_i > 0`.
    pub graded: Vec<usize>,
    /// 1-based indices with `λ_i = 0`.
    pub kept: Vec<usize>,
    pub case: CaseTag,
}

impl GradedContext {
    pub fn new(form: Vec<BigRational>, l: BigRational) -> Result<Self> {
        if form.iter().any(|c| c.is_negative()) || form.iter().all(|c| c.is_zero()) || l.is_negative() {
            return Err(Error::InvalidForm("weights must be nonnegative and not all zero".into()));
        }
        let graded = (1..=form.len()).filter(|&i| !form[i - 1].is_zero()).collect();
        let kept = (1..=form.len()).filter(|&i| form[i - 1].is_zero()).collect();
        let case = if l.is_zero() { CaseTag::Case2 } else { CaseTag::Case1 };
        Ok(GradedContext { form, l, graded, kept, case })
    }

    pub fn is_positive(&self) -> bool {
        self.kept.is_empty()
    }

    /// Coefficient mode of the graded ring: the prime becomes a graded
    /// variable over `F_p` when it carries positive weight.
    pub fn coefficient_characteristic(&self, ch: Characteristic) -> Characteristic {
        if ch.is_mixed() && self.graded.contains(&MIXED_PARAMETER) {
            ch.residue_field()
        } else {
            ch
        }
    }

    pub fn weight(&self, a: &[u32], b: u32) -> BigRational {
        let la: BigRational = self.form.iter().zip(a).map(|(c, &k)| c * BigInt::from(k)).sum();
        &self.l * BigInt::from(b) + la
    }

    pub fn describe(&self, chart: &Chart) -> String {
        let ring_vars: Vec<String> = match self.case {
            CaseTag::Case1 => self.kept.iter().map(|&i| chart.names[i - 1].clone()).collect(),
            CaseTag::Case2 => {
                std::iter::once(chart.y.clone()).chain(self.kept.iter().map(|&i| chart.names[i - 1].clone())).collect()
            }
        };
        if ring_vars.is_empty() {
            "residue field".into()
        } else {
            format!("fractions in {}", ring_vars.join(", "))
        }
    }
}

/// `min_{terms} l·b + L(a)`.
pub fn valuation_value(exp: &TermExpansion, ctx: &GradedContext) -> Result<BigRational> {
    exp.terms
        .iter()
        .map(|t| ctx.weight(&t.a, t.b))
        .min()
        .ok_or_else(|| Error::InvalidInput("valuation of zero".into()))
}

/// The valuation with weight `l := min_Δ L` on `y`.
pub fn face_context(delta: &RationalPolyhedron, form: &[BigRational]) -> Result<GradedContext> {
    let l = delta.min_form(form)?;
    GradedContext::new(form.to_vec(), l)
}

/// Homogeneous lowest part of an expansion, written in the chart's variable
/// slots (`Y`, `U_i`, and degree-0 variables alike).
#[derive(Debug, Clone)]
pub struct InitialForm {
    pub context: GradedContext,
    pub degree: BigRational,
    pub poly: Polynomial,
}

impl InitialForm {
    /// Checks every term has the declared weight.
    pub fn is_homogeneous(&self) -> bool {
        self.poly.terms().all(|(e, _)| self.context.weight(&e[1..], e[0]) == self.degree)
    }

    pub fn render(&self, chart: &Chart) -> String {
        self.poly.render(&graded_names(chart, &self.context))
    }
}

/// Names for the graded ring: upper case for graded variables, `P` for the
/// prime, `t_i` for degree-0 parameters.
pub fn graded_names(chart: &Chart, ctx: &GradedContext) -> Vec<String> {
    let y = match ctx.case {
        CaseTag::Case1 => chart.y.to_uppercase(),
        CaseTag::Case2 => chart.y.clone(),
    };
    std::iter::once(y)
        .chain((1..=chart.d).map(|i| {
            let name = &chart.names[i - 1];
            if ctx.graded.contains(&i) {
                if chart.characteristic.is_mixed() && i == MIXED_PARAMETER {
                    "P".to_string()
                } else {
                    name.to_uppercase()
                }
            } else if let Some(rest) = name.strip_prefix('u') {
                format!("t{rest}")
            } else {
                name.clone()
            }
        }))
        .collect()
}

pub fn initial_form_face(exp: &TermExpansion, ctx: &GradedContext, chart: &Chart) -> Result<InitialForm> {
    let degree = valuation_value(exp, ctx)?;
    let ch = chart.characteristic;
    let coeff_ch = ctx.coefficient_characteristic(ch);
    let n = chart.nvars();
    let mut poly = Polynomial::zero(coeff_ch, n);
    for t in &exp.terms {
        if ctx.weight(&t.a, t.b) != degree {
            continue;
        }
        let c = t
            .c
            .as_scalar()
            .ok_or_else(|| Error::InvalidInput("initial forms need a monomial expansion".into()))?;
        let mut e = exponents(t.b, &t.a);
        let c = match ch {
            Characteristic::Mixed { p } if coeff_ch == ch => {
                let k = std::mem::replace(&mut e[MIXED_PARAMETER], 0);
                &c * &ch.from_int(p as i64).pow(k)
            }
            Characteristic::Mixed { .. } => ch.reduce(&c),
            _ => c,
        };
        poly.add_term(e, c);
    }
    Ok(InitialForm { context: ctx.clone(), degree, poly })
}

/// Initial form along a strictly positive form selecting only `v`: the
/// terms with `a = (m − b)·v`, over the residue field.
pub fn initial_form_vertex(
    exp: &TermExpansion,
    delta: &RationalPolyhedron,
    v: &Point,
    chart: &Chart,
) -> Result<InitialForm> {
    let form = delta.positive_form_for_vertex(v)?;
    let l = geometry::eval(&form, v);
    let ctx = GradedContext::new(form, l)?;
    initial_form_face(exp, &ctx, chart)
}
