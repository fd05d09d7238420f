//! Exact geometry of F-subsets of the nonnegative orthant.
//!
//! A [`RationalPolyhedron`] is `conv(V) + R^d_{≥0}` for a finite vertex set
//! `V`, stored together with its essential facets `L_j(x) ≥ 1`. Facets are
//! found by enumerating hyperplanes through `d` independent constraints among
//! vertices and coordinate rays; membership goes through an exact simplex.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::fmt_rational;
use crate::lp;
use crate::par::{self, Execution};

pub type Point = Vec<BigRational>;

/// Caps for facet enumeration.
pub const MAX_DIM: usize = 6;
pub const MAX_GENERATORS: usize = 64;

/// A nonnegative rational form together with its minimum over a polyhedron.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    pub coeffs: Vec<BigRational>,
    pub min: BigRational,
}

impl LinearForm {
    pub fn new(coeffs: Vec<BigRational>, min: BigRational) -> Self {
        LinearForm { coeffs, min }
    }

    pub fn coordinate(d: usize, i: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); d];
        coeffs[i] = BigRational::one();
        LinearForm { coeffs, min: BigRational::zero() }
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        eval(&self.coeffs, x)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_positive())
    }

    /// Rescales so that the recorded minimum is one (requires a positive minimum).
    pub fn normalized(&self) -> LinearForm {
        assert!(self.min.is_positive(), "cannot normalize a form with nonpositive minimum");
        LinearForm { coeffs: self.coeffs.iter().map(|c| c / &self.min).collect(), min: BigRational::one() }
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| if c.is_one() { format!("x{}", i + 1) } else { format!("({})x{}", fmt_rational(c), i + 1) })
            .collect();
        format!("{} >= {}", parts.join(" + "), fmt_rational(&self.min))
    }
}

pub fn eval(coeffs: &[BigRational], x: &[BigRational]) -> BigRational {
    coeffs.iter().zip(x).map(|(c, v)| c * v).sum()
}

pub fn is_integral(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_integer())
}

fn dominates(a: &Point, b: &Point) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolyhedron {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<LinearForm>,
}

/// Smallest F-subset containing `points`. Vertices come back sorted
/// lexicographically; facets are normalized to threshold one and sorted.
pub fn hull_from_points(dim: usize, points: &[Point]) -> Result<RationalPolyhedron> {
    hull_with(dim, points, Execution::default())
}

pub fn hull_with(dim: usize, points: &[Point], exec: Execution) -> Result<RationalPolyhedron> {
    for p in points {
        if p.len() != dim || p.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidInput(format!("point outside the nonnegative orthant of dimension {dim}")));
        }
        if p.iter().all(|c| c.is_zero()) {
            return Err(Error::OriginInPolyhedron);
        }
    }
    let distinct: BTreeSet<Point> = points.iter().cloned().collect();
    let distinct: Vec<Point> = distinct.into_iter().collect();
    // Cheap pass: drop points dominating another generator.
    let minimal: Vec<Point> = distinct
        .iter()
        .filter(|p| !distinct.iter().any(|q| q != *p && dominates(p, q)))
        .cloned()
        .collect();
    let vertices: Vec<Point> = par::filter_map(exec, &minimal, |p| {
        let others: Vec<Point> = minimal.iter().filter(|q| *q != p).cloned().collect();
        (!in_hull(&others, p)).then(|| p.clone())
    });
    let facets = if vertices.is_empty() { Vec::new() } else { enumerate_facets(dim, &vertices, exec)? };
    Ok(RationalPolyhedron { dim, vertices, facets })
}

/// LP membership of `x` in `conv(gens) + R^d_{≥0}`.
fn in_hull(gens: &[Point], x: &Point) -> bool {
    if gens.is_empty() || x.iter().any(|c| c.is_negative()) {
        return false;
    }
    let d = x.len();
    let k = gens.len();
    let mut a = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut row: Vec<BigRational> = gens.iter().map(|g| g[i].clone()).collect();
        row.extend((0..d).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
        a.push(row);
    }
    let mut last = vec![BigRational::one(); k];
    last.extend(std::iter::repeat(BigRational::zero()).take(d));
    a.push(last);
    let mut b: Vec<BigRational> = x.clone();
    b.push(BigRational::one());
    lp::feasible(&a, &b)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn enumerate_facets(dim: usize, vertices: &[Point], exec: Execution) -> Result<Vec<LinearForm>> {
    if dim > MAX_DIM || vertices.len() > MAX_GENERATORS {
        return Err(Error::GeometryCap(format!("{} vertices in dimension {dim}", vertices.len())));
    }
    // Constraint rows: L(v) = 1 for vertices, L(e_i) = 0 for rays.
    let mut rows: Vec<(Vec<BigRational>, BigRational)> =
        vertices.iter().map(|v| (v.clone(), BigRational::one())).collect();
    for i in 0..dim {
        let mut e = vec![BigRational::zero(); dim];
        e[i] = BigRational::one();
        rows.push((e, BigRational::zero()));
    }
    let combos = combinations(rows.len(), dim);
    let found = par::filter_map(exec, &combos, |idx| {
        if idx.iter().all(|&i| i >= vertices.len()) {
            return None;
        }
        let m: Vec<Vec<BigRational>> = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let r: Vec<BigRational> = idx.iter().map(|&i| rows[i].1.clone()).collect();
        let coeffs = lp::solve_square(&m, &r)?;
        if coeffs.iter().any(|c| c.is_negative()) || coeffs.iter().all(|c| c.is_zero()) {
            return None;
        }
        vertices.iter().all(|v| eval(&coeffs, v) >= BigRational::one()).then_some(coeffs)
    });
    let set: BTreeSet<Vec<BigRational>> = found.into_iter().collect();
    Ok(set.into_iter().map(|coeffs| LinearForm { coeffs, min: BigRational::one() }).collect())
}

impl RationalPolyhedron {
    pub fn empty(dim: usize) -> Self {
        RationalPolyhedron { dim, vertices: Vec::new(), facets: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Essential facets, each normalized so that its minimum over the
    /// polyhedron is one.
    pub fn facets(&self) -> Result<&[LinearForm]> {
        if self.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        Ok(&self.facets)
    }

    pub fn is_vertex(&self, v: &Point) -> bool {
        self.vertices.contains(v)
    }

    /// Minimum of a nonnegative nonzero form, attained at a vertex.
    pub fn min_form(&self, coeffs: &[BigRational]) -> Result<BigRational> {
        if coeffs.len() != self.dim || coeffs.iter().any(|c| c.is_negative()) || coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidForm("expected a nonnegative nonzero form".into()));
        }
        self.vertices.iter().map(|v| eval(coeffs, v)).min().ok_or(Error::EmptyPolyhedron)
    }

    /// Vertices where `min_form` is attained.
    pub fn argmin_form(&self, coeffs: &[BigRational]) -> Result<Vec<Point>> {
        let l = self.min_form(coeffs)?;
        Ok(self.vertices.iter().filter(|v| eval(coeffs, v) == l).cloned().collect())
    }

    /// Exact membership through linear feasibility.
    pub fn contains(&self, x: &Point) -> bool {
        in_hull(&self.vertices, x)
    }

    /// Membership through the inequality description `x ≥ 0, L_j(x) ≥ 1`.
    pub fn satisfies_facets(&self, x: &Point) -> bool {
        !self.is_empty()
            && x.iter().all(|c| !c.is_negative())
            && self.facets.iter().all(|f| f.eval(x) >= f.min)
    }

    pub fn subset_of(&self, other: &RationalPolyhedron) -> bool {
        self.vertices.iter().all(|v| other.contains(v))
    }

    /// Projection dropping coordinate `drop`, re-hulled.
    pub fn project_out(&self, drop: usize) -> Result<RationalPolyhedron> {
        let pts: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| v.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, c)| c.clone()).collect())
            .collect();
        hull_from_points(self.dim - 1, &pts)
    }

    /// A strictly positive form whose minimum over the polyhedron is
    /// attained at `v` only. Built from the mean of the facet and coordinate
    /// normals active at `v`, with zero coefficients lifted to `1/K`.
    pub fn positive_form_for_vertex(&self, v: &Point) -> Result<Vec<BigRational>> {
        if !self.is_vertex(v) {
            return Err(Error::NotAVertex(fmt_point(v)));
        }
        let mut active: Vec<Vec<BigRational>> =
            self.facets.iter().filter(|f| f.eval(v) == f.min).map(|f| f.coeffs.clone()).collect();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                active.push(LinearForm::coordinate(self.dim, i).coeffs);
            }
        }
        let mut mean = vec![BigRational::zero(); self.dim];
        for f in &active {
            for (m, c) in mean.iter_mut().zip(f) {
                *m += c;
            }
        }
        if !active.is_empty() {
            let n = BigRational::from_integer(BigInt::from(active.len()));
            for m in mean.iter_mut() {
                *m /= &n;
            }
        }
        let max_den = self.vertices.iter().flatten().map(|c| c.denom().clone()).max().unwrap_or_else(BigInt::one);
        let max_coord = self.vertices.iter().flatten().map(|c| c.ceil().to_integer()).max().unwrap_or_else(BigInt::one);
        let k = BigInt::from(2) * max_den * max_coord.max(BigInt::one()) * BigInt::from(self.dim);
        let mut eps = BigRational::new(BigInt::one(), k);
        for _ in 0..64 {
            let form: Vec<BigRational> =
                mean.iter().map(|m| if m.is_zero() { eps.clone() } else { m.clone() }).collect();
            let at_v = eval(&form, v);
            if self.vertices.iter().filter(|w| *w != v).all(|w| eval(&form, w) > at_v) {
                return Ok(form);
            }
            eps /= BigRational::from_integer(BigInt::from(2));
        }
        Err(Error::Invariant(format!("no separating positive form at {}", fmt_point(v))))
    }

    /// Proper faces of dimension at least one. Each face comes with a form
    /// whose minimum is attained exactly on it: the sum of the facet and
    /// coordinate constraints tight along the face. Sorted by decreasing
    /// dimension, then by form.
    pub fn faces(&self) -> Result<Vec<Face>> {
        if self.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let d = self.dim;
        let mut constraints: Vec<LinearForm> = (0..d)
            .filter(|&i| self.vertices.iter().any(|v| v[i].is_zero()))
            .map(|i| LinearForm::coordinate(d, i))
            .collect();
        constraints.extend(self.facets.iter().cloned());
        let tight = |c: &LinearForm| -> (BTreeSet<usize>, BTreeSet<usize>) {
            let vs = (0..self.vertices.len()).filter(|&k| c.eval(&self.vertices[k]) == c.min).collect();
            let rays = (0..d).filter(|&j| c.coeffs[j].is_zero()).collect();
            (vs, rays)
        };
        let singles: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = constraints.iter().map(tight).collect();
        let mut seen: BTreeSet<(BTreeSet<usize>, BTreeSet<usize>)> = BTreeSet::new();
        let mut frontier: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = Vec::new();
        for s in &singles {
            if !s.0.is_empty() && seen.insert(s.clone()) {
                frontier.push(s.clone());
            }
        }
        while let Some((vs, rays)) = frontier.pop() {
            for (cv, cr) in &singles {
                let next: (BTreeSet<usize>, BTreeSet<usize>) =
                    (vs.intersection(cv).copied().collect(), rays.intersection(cr).copied().collect());
                if !next.0.is_empty() && seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        let mut out = Vec::new();
        for (vs, rays) in seen {
            let verts: Vec<Point> = vs.iter().map(|&k| self.vertices[k].clone()).collect();
            let rays: Vec<usize> = rays.into_iter().collect();
            let dim = face_dimension(&verts, &rays, d);
            if dim == 0 {
                continue;
            }
            let mut form = vec![BigRational::zero(); d];
            for (c, (cv, cr)) in constraints.iter().zip(&singles) {
                if vs.is_subset(cv) && rays.iter().all(|j| cr.contains(j)) {
                    for (f, x) in form.iter_mut().zip(&c.coeffs) {
                        *f += x;
                    }
                }
            }
            out.push(Face { vertices: verts, rays, form, dim });
        }
        out.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.form.cmp(&b.form)));
        Ok(out)
    }

    /// Least common multiple of the facet coefficient denominators.
    pub fn denominator_bound(&self) -> BigInt {
        self.facets.iter().flat_map(|f| f.coeffs.iter()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

/// A face of an F-subset: its vertices, the coordinate directions it
/// recedes along, and a form minimized exactly on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub vertices: Vec<Point>,
    pub rays: Vec<usize>,
    pub form: Vec<BigRational>,
    pub dim: usize,
}

fn face_dimension(vertices: &[Point], rays: &[usize], d: usize) -> usize {
    let mut rows: Vec<Vec<BigRational>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
        .collect();
    for &j in rays {
        let mut e = vec![BigRational::zero(); d];
        e[j] = BigRational::one();
        rows.push(e);
    }
    rank(rows)
}

fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let mut r = 0;
    let ncols = rows.first().map_or(0, Vec::len);
    for col in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, piv);
        let p = rows[r][col].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = &rows[i][col] / &p;
                for j in col..ncols {
                    let v = &rows[r][j] * &f;
                    rows[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn fmt_point(p: &[BigRational]) -> String {
    format!("({})", p.iter().map(fmt_rational).collect::<Vec<_>>().join(","))
}

/// Serialized form: rationals as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyhedronRecord {
    pub vertices: Vec<Vec<String>>,
    pub facets: Vec<FacetRecord>,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetRecord {
    pub coeffs: Vec<String>,
    pub min: String,
}

impl From<&RationalPolyhedron> for PolyhedronRecord {
    fn from(p: &RationalPolyhedron) -> Self {
        PolyhedronRecord {
            vertices: p.vertices.iter().map(|v| v.iter().map(fmt_rational).collect()).collect(),
            facets: p
                .facets
                .iter()
                .map(|f| FacetRecord { coeffs: f.coeffs.iter().map(fmt_rational).collect(), min: fmt_rational(&f.min) })
                .collect(),
            empty: p.is_empty(),
        }
    }
}

impl PolyhedronRecord {
    pub fn to_polyhedron(&self, dim: usize) -> Result<RationalPolyhedron> {
        let pts = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|s| crate::exactnum::parse_rational(s)).collect::<Result<Point>>())
            .collect::<Result<Vec<Point>>>()?;
        hull_from_points(dim, &pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn pt(c: &[(i64, i64)]) -> Point {
        c.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    fn f_a_cloud() -> Vec<Point> {
        vec![pt(&[(1, 1), (1, 2)]), pt(&[(2, 1), (0, 1)]), pt(&[(0, 1), (3, 1)]), pt(&[(1, 1), (3, 2)])]
    }

    #[test]
    fn hull_of_two_dimensional_cloud() {
        let h = hull_from_points(2, &f_a_cloud()).unwrap();
        assert_eq!(h.vertices(), &[pt(&[(0, 1), (3, 1)]), pt(&[(1, 1), (1, 2)]), pt(&[(2, 1), (0, 1)])]);
        let facets = h.facets().unwrap();
        assert_eq!(facets.len(), 2);
        assert_eq!(facets[0].coeffs, pt(&[(1, 2), (1, 1)]));
        assert_eq!(facets[1].coeffs, pt(&[(5, 6), (1, 3)]));
    }

    #[test]
    fn hull_of_three_dimensional_cloud() {
        let pts = vec![
            pt(&[(0, 1), (1, 2), (1, 1)]),
            pt(&[(2, 1), (0, 1), (0, 1)]),
            pt(&[(3, 2), (0, 1), (1, 2)]),
            pt(&[(2, 1), (0, 1), (1, 1)]),
        ];
        let h = hull_from_points(3, &pts).unwrap();
        assert_eq!(h.vertices().len(), 3);
        assert!(!h.is_vertex(&pt(&[(2, 1), (0, 1), (1, 1)])));
    }

    #[test]
    fn empty_and_single_generator() {
        let e = hull_from_points(2, &[]).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.facets(), Err(Error::EmptyPolyhedron));
        assert!(e.min_form(&pt(&[(1, 1), (0, 1)])).is_err());
        let h = hull_from_points(2, &[pt(&[(1, 1), (1, 2)])]).unwrap();
        let coeffs: Vec<Point> = h.facets().unwrap().iter().map(|f| f.coeffs.clone()).collect();
        assert_eq!(coeffs, vec![pt(&[(0, 1), (2, 1)]), pt(&[(1, 1), (0, 1)])]);
        let s = hull_from_points(2, &[pt(&[(1, 1), (0, 1)])]).unwrap();
        assert_eq!(s.facets().unwrap().len(), 1);
        assert_eq!(s.facets().unwrap()[0].coeffs, pt(&[(1, 1), (0, 1)]));
    }

    #[test]
    fn origin_rejected() {
        assert_eq!(hull_from_points(2, &[pt(&[(0, 1), (0, 1)])]), Err(Error::OriginInPolyhedron));
    }

    #[test]
    fn minima_and_membership() {
        let h = hull_from_points(2, &f_a_cloud()).unwrap();
        assert_eq!(h.min_form(&pt(&[(1, 1), (0, 1)])).unwrap(), rat(0, 1));
        assert_eq!(h.min_form(&pt(&[(0, 1), (2, 1)])).unwrap(), rat(0, 1));
        let single = hull_from_points(2, &[pt(&[(1, 1), (1, 2)])]).unwrap();
        assert_eq!(single.min_form(&pt(&[(1, 1), (0, 1)])).unwrap(), rat(1, 1));
        assert!(h.contains(&pt(&[(1, 1), (3, 2)])));
        assert!(!h.contains(&pt(&[(0, 1), (0, 1)])));
        assert!(single.subset_of(&h));
        assert!(!h.subset_of(&single));
    }

    #[test]
    fn separating_forms() {
        let h = hull_from_points(2, &f_a_cloud()).unwrap();
        for v in h.vertices() {
            let l = h.positive_form_for_vertex(v).unwrap();
            assert!(l.iter().all(|c| c.is_positive()));
            assert_eq!(h.argmin_form(&l).unwrap(), vec![v.clone()]);
        }
        assert!(h.positive_form_for_vertex(&pt(&[(1, 1), (3, 2)])).is_err());
    }
}
