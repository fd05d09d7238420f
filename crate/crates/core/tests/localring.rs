use polyprep::error::Error;
use polyprep::exactnum::Characteristic;
use polyprep::fixtures;
use polyprep::localring::{
    mth_root_in_y, normalize_expansion, power_radical_test, reexpand, residual_order, substitute_y, Chart,
    LocalElement, RootFailure,
};
use polyprep::poly::Polynomial;

fn q2() -> Chart {
    Chart::new(Characteristic::Rational, 2).unwrap()
}

#[test]
fn expansion_folds_prime_powers() {
    let fx = fixtures::f_d();
    let exp = normalize_expansion(&fx.f, &fx.chart);
    let constant = exp.terms.iter().find(|t| t.b == 0 && t.a == vec![2, 0, 0]).expect("-4 term");
    assert_eq!(constant.c.as_scalar().unwrap().to_string(), "-1");
    assert_eq!(exp.evaluate(&fx.chart), fx.f);

    let fe = fixtures::f_e();
    let exp = normalize_expansion(&fe.f, &fe.chart);
    let constant = exp.terms.iter().find(|t| t.b == 0 && t.a == vec![3, 0, 0]).expect("-54 term");
    assert_eq!(constant.c.as_scalar().unwrap().to_string(), "-2");

    let fa = fixtures::f_a();
    let exp = normalize_expansion(&fa.f, &fa.chart);
    assert!(exp.terms.iter().any(|t| t.b == 0 && t.a == vec![2, 1] && t.c.as_scalar().unwrap().is_one()));
}

#[test]
fn residual_orders() {
    for fx in [fixtures::f_a(), fixtures::f_c(), fixtures::f_d()] {
        assert_eq!(residual_order(&fx.f, &fx.chart), Ok(2), "{}", fx.name);
    }
    assert_eq!(residual_order(&fixtures::f_e().f, &fixtures::f_e().chart), Ok(3));
    let c = q2();
    assert_eq!(residual_order(&LocalElement::from_poly(c.u(1)), &c), Err(Error::InParameterIdeal));
    let unit = c.scalar(1).add(&c.y());
    assert_eq!(residual_order(&LocalElement::from_poly(unit), &c), Err(Error::NotInMaximalIdeal));
}

#[test]
fn substitution_examples() {
    let fx = fixtures::f_d();
    let c = &fx.chart;
    let phi = LocalElement::from_poly(c.scalar(2).add(&c.scalar(2).mul(&c.u(3))));
    let g = substitute_y(&fx.f, &phi).unwrap();
    let y = c.y();
    let expected = y
        .pow(2)
        .add(&c.scalar(4).mul(&c.scalar(1).add(&c.u(3))).mul(&y))
        .add(&c.scalar(8).mul(&c.u(3)))
        .sub(&c.u(2).mul(&c.u(3).pow(2)));
    assert_eq!(g, LocalElement::from_poly(expected));
    let zero = LocalElement::zero(c.characteristic, c.nvars());
    assert_eq!(substitute_y(&fx.f, &zero).unwrap(), fx.f);
    let back = substitute_y(&g, &phi.neg()).unwrap();
    assert_eq!(back, fx.f);
    let bad = LocalElement::from_poly(c.y());
    assert_eq!(substitute_y(&fx.f, &bad), Err(Error::NotGraphForm));
    let unit = LocalElement::from_poly(c.scalar(1));
    assert_eq!(substitute_y(&fx.f, &unit), Err(Error::UnitConstantTerm));
}

#[test]
fn fraction_substitution_round_trip() {
    let fx = fixtures::f_b();
    let c = &fx.chart;
    let phi = LocalElement::new(c.u(1), c.scalar(1).add(&c.u(2))).unwrap();
    let g = substitute_y(&fx.f, &phi).unwrap();
    let expected = c.scalar(1).add(&c.u(2)).pow(2).mul(&c.y().pow(2)).add(&c.u(1).pow(5));
    assert_eq!(g, LocalElement::from_poly(expected));
    assert_eq!(substitute_y(&g, &phi.neg()).unwrap(), fx.f);
}

#[test]
fn exact_division_examples() {
    let c = q2();
    let (y, u1, u2) = (c.y(), c.u(1), c.u(2));
    let one_u2 = c.scalar(1).add(&u2);
    let lin = one_u2.mul(&y).sub(&u1);
    assert_eq!(lin.pow(2).div_exact(&lin), Some(lin.clone()));
    assert_eq!(y.pow(2).div_exact(&u1), None);
}

#[test]
fn mth_roots() {
    // (1+t2)^2 Y^2 - 2(1+t2) U1 Y + U1^2.
    let c = q2();
    let (y, u1, t2) = (c.y(), c.u(1), c.u(2));
    let one_t2 = c.scalar(1).add(&t2);
    let f = one_t2.mul(&y).sub(&u1).pow(2);
    let root = mth_root_in_y(&f, 2).unwrap();
    assert_eq!(root.delta, one_t2.pow(2));
    assert_eq!(root.h, LocalElement::new(u1.neg(), one_t2.clone()).unwrap());

    let f2 = Characteristic::finite_field(2).unwrap();
    let yy = Polynomial::var(f2, 4, 0);
    let p = Polynomial::var(f2, 4, 1);
    let g = yy.pow(2).add(&p.pow(2).mul(&yy));
    assert_eq!(mth_root_in_y(&g, 2).unwrap_err(), RootFailure::ExponentsNotDivisible);

    let f3 = Characteristic::finite_field(3).unwrap();
    let yy = Polynomial::var(f3, 4, 0);
    let p = Polynomial::var(f3, 4, 1);
    let root = mth_root_in_y(&yy.pow(3).add(&p.pow(3)), 3).unwrap();
    assert_eq!(root.h, LocalElement::from_poly(p));
}

#[test]
fn radical_test_examples() {
    let fc = fixtures::f_c();
    let r = power_radical_test(fc.f.numerator(), 2).unwrap().unwrap();
    let c = &fc.chart;
    assert_eq!(r.z, c.y().pow(2).add(&c.y()).sub(&c.u(1)));
    assert!(power_radical_test(fixtures::f_a().f.numerator(), 2).unwrap().is_none());
    let c = q2();
    let r = power_radical_test(&c.y().pow(3), 3).unwrap().unwrap();
    assert_eq!(r.z, c.y());
}

#[test]
fn reexpansions() {
    let fc = fixtures::f_c();
    let c = &fc.chart;
    let zeta = c.y().pow(2).add(&c.y()).sub(&c.u(1));
    let exp = reexpand(&fc.f, &zeta, c).unwrap();
    assert_eq!(exp.terms.len(), 1);
    assert_eq!((exp.terms[0].b, exp.terms[0].a.clone()), (2, vec![0]));
    assert!(exp.terms[0].c.as_scalar().unwrap().is_one());

    let fa = fixtures::f_a();
    let direct = normalize_expansion(&fa.f, &fa.chart);
    let via = reexpand(&fa.f, &fa.chart.y(), &fa.chart).unwrap();
    assert_eq!(direct.terms, via.terms);

    let c = q2();
    let zeta = c.y().pow(2).add(&c.y()).sub(&c.u(1));
    let f = LocalElement::from_poly(zeta.pow(2).add(&c.u(2)));
    let exp = reexpand(&f, &zeta, &c).unwrap();
    let keys: Vec<(u32, Vec<u32>)> = exp.terms.iter().map(|t| (t.b, t.a.clone())).collect();
    assert_eq!(keys, vec![(0, vec![0, 1]), (2, vec![0, 0])]);
    assert_eq!(exp.evaluate(&c), f);
}

#[test]
fn reexpansion_eliminates_y() {
    // f = y^2 in the coordinate z = y^2 + y - u1: y = (z + u1)/(1 + y).
    let c = Chart::new(Characteristic::Rational, 1).unwrap();
    let zeta = c.y().pow(2).add(&c.y()).sub(&c.u(1));
    let f = LocalElement::from_poly(c.y().add(&c.u(1).pow(3)));
    let exp = reexpand(&f, &zeta, &c).unwrap();
    assert_eq!(exp.evaluate(&c), f);
    assert!(exp.terms.iter().filter(|t| t.b < 1).all(|t| t.c.is_unit() || t.a[0] >= 1));
}
