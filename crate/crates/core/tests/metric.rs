mod common;

use common::*;
use isoglue_core::flat_torus::{torus_distance, torus_distance_window};
use isoglue_core::glued_space::{check_metric_axioms, triangle_counterexample, z_distance, ViolationKind};
use isoglue_core::numerics::triangle_sign;
use isoglue_core::oracle;
use isoglue_core::sampling::{PointSource, Sampler};
use isoglue_core::{ExactScalar, GluedSpace, GluingParams, GramMatrix, Length, OneParamSubgroup, ScalarMode, Sign, TorusPoint, ZPoint};
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn grams() -> Vec<GramMatrix> {
    vec![
        GramMatrix::identity(),
        GramMatrix::from_integers(2, 1, 3).unwrap(),
        GramMatrix::from_integers(5, -2, 1).unwrap(),
        GramMatrix::from_integers(1, 3, 10).unwrap(),
    ]
}

fn f64_gram(g: &GramMatrix) -> oracle::Gram {
    let e = g.entries();
    [e[0].to_f64().unwrap(), e[1].to_f64().unwrap(), e[2].to_f64().unwrap()]
}

fn xy(p: &TorusPoint<ExactScalar>) -> [f64; 2] {
    [p.u1().to_f64(), p.u2().to_f64()]
}

fn z_point() -> impl Strategy<Value = ZPoint<ExactScalar>> {
    prop_oneof![
        torus_point().prop_map(ZPoint::Compact),
        (torus_point(), scalar_in(q2(), 30)).prop_map(|(y, t)| ZPoint::Cylinder(y, t)),
    ]
}

proptest! {
    #[test]
    fn torus_distance_is_invariant(p in torus_point(), q in torus_point(), x in torus_point(), gi in 0..4usize) {
        let g = &grams()[gi];
        let d = torus_distance(&p, &q, g);
        prop_assert_eq!(&torus_distance(&q, &p, g), &d);
        prop_assert_eq!(&torus_distance(&p.translate(&x), &q.translate(&x), g), &d);
        prop_assert_eq!(&torus_distance(&p.invert(), &q.invert(), g), &d);
        prop_assert_eq!(d.is_zero(), p == q);
    }

    #[test]
    fn torus_triangle(p in torus_point(), q in torus_point(), r in torus_point(), gi in 0..4usize) {
        let g = &grams()[gi];
        let s = triangle_sign(&torus_distance(&p, &q, g), &torus_distance(&q, &r, g), &torus_distance(&p, &r, g));
        prop_assert_ne!(s, Sign::Negative);
    }

    #[test]
    fn glued_metric_exact(a in z_point(), b in z_point(), c in z_point(), gi in 0..4usize) {
        let g = &grams()[gi];
        let params = GluingParams::strict(q2().one(), q2().integer(2)).unwrap();
        let ab = z_distance(&a, &b, &params, g);
        prop_assert_eq!(&ab, &z_distance(&b, &a, &params, g));
        prop_assert_eq!(ab.is_zero(), a == b);
        let s = triangle_sign(&ab, &z_distance(&b, &c, &params, g), &z_distance(&a, &c, &params, g));
        prop_assert_ne!(s, Sign::Negative);
    }

    #[test]
    fn cylinder_and_mixed_bounds(y in torus_point(), y2 in torus_point(), s in scalar_in(q2(), 30), t in scalar_in(q2(), 30)) {
        let g = GramMatrix::identity();
        let params = GluingParams::strict(q2().ratio(3, 4), q2().ratio(3, 2)).unwrap();
        let d1 = torus_distance(&y, &y2, &g);
        let cyl = z_distance(&ZPoint::Cylinder(y.clone(), s), &ZPoint::Cylinder(y2.clone(), t.clone()), &params, &g);
        prop_assert_ne!(cyl.compare(&d1.clone().plus_offset(params.m())), core::cmp::Ordering::Greater);
        let mixed = z_distance(&ZPoint::Compact(y), &ZPoint::Cylinder(y2, t), &params, &g);
        prop_assert_ne!(mixed.compare(&Length::root(q2().zero()).plus_offset(params.r())), core::cmp::Ordering::Less);
    }
}

/// The radius-1 window around reduced coordinates already finds the
/// minimum; radius 2 and the raw-shift oracle agree. Exact on a thousand
/// pairs, `f64` on ten thousand per Gram matrix.
#[test]
fn shift_window_is_sufficient() {
    for (gi, g) in grams().iter().enumerate() {
        let og = f64_gram(g);
        let sampler = Sampler::<ExactScalar>::new(100 + gi as u64, q2());
        for i in 0..250u64 {
            let [p, q]: [TorusPoint<ExactScalar>; 2] = sampler.sample(i);
            let d = torus_distance(&p, &q, g);
            assert_eq!(d, torus_distance_window(&p, &q, g, 2), "gram {gi} sample {i}");
            let brute = oracle::torus_distance(xy(&p), xy(&q), og);
            assert!((d.value() - brute).abs() < 1e-12, "gram {gi} sample {i}: {} vs {brute}", d.value());
        }
        let sampler = Sampler::<f64>::new(200 + gi as u64, ());
        for i in 0..10_000u64 {
            let [p, q]: [TorusPoint<f64>; 2] = sampler.sample(i);
            let d = torus_distance(&p, &q, g).value();
            assert_eq!(d, torus_distance_window(&p, &q, g, 2).value());
            let brute = oracle::torus_distance([*p.u1(), *p.u2()], [*q.u1(), *q.u2()], og);
            assert!((d - brute).abs() < 1e-12, "gram {gi} sample {i}: {d} vs {brute}");
        }
    }
}

#[test]
fn float_mode_agrees_with_exact() {
    let sampler = Sampler::<ExactScalar>::new(5, q2());
    let params = GluingParams::strict(q2().one(), q2().integer(2)).unwrap();
    let fparams = GluingParams::strict(1.0, 2.0).unwrap();
    let g = GramMatrix::from_integers(2, 1, 3).unwrap();
    for i in 0..500u64 {
        let [a, b]: [ZPoint<ExactScalar>; 2] = sampler.sample(i);
        let conv = |p: &ZPoint<ExactScalar>| match p {
            ZPoint::Compact(y) => ZPoint::Compact(TorusPoint::new(y.u1().to_f64(), y.u2().to_f64())),
            ZPoint::Cylinder(y, t) => ZPoint::Cylinder(TorusPoint::new(y.u1().to_f64(), y.u2().to_f64()), t.to_f64()),
        };
        let exact = z_distance(&a, &b, &params, &g).value();
        let float = z_distance(&conv(&a), &conv(&b), &fparams, &g).value();
        assert!((exact - float).abs() < 1e-12);
    }
}

#[test]
fn axioms_sampled_in_both_modes() {
    let subgroup = OneParamSubgroup::canonical(q2().sqrt_d()).unwrap();
    let space = GluedSpace::new(GluingParams::strict(q2().one(), q2().integer(2)).unwrap(), GramMatrix::identity(), subgroup);
    let report = check_metric_axioms(&space.z(), &Sampler::<ExactScalar>::new(3, q2()), 500, ScalarMode::Exact).unwrap();
    assert!(report.passed());
    assert_eq!(report.max_abs_error, 0.0);

    let fsub = OneParamSubgroup::canonical(core::f64::consts::SQRT_2).unwrap();
    let fspace = GluedSpace::new(GluingParams::strict(1.0, 2.0).unwrap(), GramMatrix::identity(), fsub);
    let report = check_metric_axioms(&fspace.z(), &Sampler::<f64>::new(3, ()), 20_000, ScalarMode::default()).unwrap();
    assert!(report.passed());
    let report = check_metric_axioms(&fspace.x(), &Sampler::<f64>::new(4, ()), 20_000, ScalarMode::default()).unwrap();
    assert!(report.passed());

    let empty = check_metric_axioms(&space.z(), &Sampler::<ExactScalar>::new(3, q2()), 0, ScalarMode::Exact).unwrap();
    assert!(empty.passed() && empty.samples == 0);
}

#[test]
fn counterexamples_below_threshold() {
    for (r, m) in [((2, 5), (1, 1)), ((49, 100), (1, 1)), ((1, 10), (3, 1))] {
        let params = GluingParams::new(q2().ratio(r.0, r.1), q2().ratio(m.0, m.1), false).unwrap();
        let ce = triangle_counterexample(&params).unwrap();
        assert_eq!(ce.slack, q2().ratio(m.0, m.1) - &q2().ratio(2 * r.0, r.1));
        let subgroup = OneParamSubgroup::canonical(q2().sqrt_d()).unwrap();
        let space = GluedSpace::new(params, GramMatrix::identity(), subgroup);
        let triples = vec![[ce.a.clone(), ce.b.clone(), ce.c.clone()]];
        let report = check_metric_axioms(&space.z(), &triples, 1, ScalarMode::Exact).unwrap();
        assert!(report.violations.iter().any(|v| v.kind == ViolationKind::Triangle));
    }
    let at_threshold = GluingParams::new(q2().ratio(1, 2), q2().one(), false).unwrap();
    assert!(triangle_counterexample(&at_threshold).is_err());
}
