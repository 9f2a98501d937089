mod common;

use common::*;
use isoglue_core::isometry::{construct_x_isometry, decompose_z_isometry, solve_torus_part, verify_isometry};
use isoglue_core::sampling::Sampler;
use isoglue_core::{
    ExactScalar, GluedSpace, GluingParams, GramMatrix, LineIsometry, OneParamSubgroup, ProductIsometry, ScalarMode,
    TorusIsometry, XIsometry, XPoint, ZPoint,
};
use proptest::prelude::*;

fn space() -> GluedSpace<ExactScalar> {
    GluedSpace::new(
        GluingParams::strict(q2().one(), q2().integer(2)).unwrap(),
        GramMatrix::identity(),
        OneParamSubgroup::canonical(q2().sqrt_d()).unwrap(),
    )
}

fn line() -> impl Strategy<Value = LineIsometry<ExactScalar>> {
    (any::<bool>(), scalar_in(q2(), 20)).prop_map(|(r, a)| if r { LineIsometry::reflection(a) } else { LineIsometry::translation(a) })
}

fn product() -> impl Strategy<Value = ProductIsometry<ExactScalar>> {
    (any::<bool>(), torus_point(), line()).prop_map(|(inv, x, l)| {
        let torus = if inv { TorusIsometry::inversion_then_translation(x) } else { TorusIsometry::translation(x) };
        ProductIsometry::new(torus, l)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lift_is_a_homomorphism(a in line(), b in line(), t in scalar_in(q2(), 10)) {
        let s = space();
        let la = construct_x_isometry(&a, &s.subgroup);
        let lb = construct_x_isometry(&b, &s.subgroup);
        prop_assert_eq!(la.compose(&lb), construct_x_isometry(&a.compose(&b), &s.subgroup));
        prop_assert_eq!(la.inverse(), construct_x_isometry(&a.inverse(), &s.subgroup));
        prop_assert_eq!(la.apply(&XPoint::Graph(t.clone())), XPoint::Graph(a.apply(&t)));
        prop_assert!(la.as_product().preserves_graph(&s.subgroup, &[t.clone(), t + &q2().sqrt_d()]));
    }

    #[test]
    fn lift_solves_the_graph_equation(a in line(), t1 in scalar_in(q2(), 5), t2 in scalar_in(q2(), 5)) {
        prop_assume!(t1 != t2);
        let s = space();
        let solved = solve_torus_part(&a, &s.subgroup, &t1, &t2);
        let lift = construct_x_isometry(&a, &s.subgroup);
        prop_assert_eq!(solved.as_ref(), Some(lift.torus()));
    }

    #[test]
    fn decompose_inverts_construction(g in product(), seed in 0..1000u64) {
        let sampler = Sampler::<ExactScalar>::new(seed, q2());
        let got = decompose_z_isometry(|p: &ZPoint<ExactScalar>| g.apply(p), &sampler, 8, ScalarMode::Exact).unwrap();
        prop_assert_eq!(got, g);
    }

    #[test]
    fn products_preserve_z(g in product(), seed in 0..1000u64) {
        let s = space();
        let sampler = Sampler::<ExactScalar>::new(seed, q2());
        let report = verify_isometry(&s.z(), |p| g.apply(p), &sampler, 8, ScalarMode::Exact).unwrap();
        prop_assert!(report.passed());
        prop_assert_eq!(report.max_error, 0.0);
    }

    #[test]
    fn graph_is_homogeneous(t in scalar_in(q2(), 10), u in scalar_in(q2(), 10)) {
        let s = space();
        let g = XIsometry::carrying(&t, &u, &s.subgroup);
        prop_assert_eq!(g.apply(&XPoint::Graph(t)), XPoint::Graph(u));
    }
}

#[test]
fn float_lifts_preserve_x() {
    let sub = OneParamSubgroup::canonical(core::f64::consts::SQRT_2).unwrap();
    let s = GluedSpace::new(GluingParams::strict(1.0, 2.0).unwrap(), GramMatrix::from_integers(2, 1, 3).unwrap(), sub);
    for line in [LineIsometry::translation(0.75), LineIsometry::reflection(-1.25)] {
        let g = construct_x_isometry(&line, &s.subgroup);
        let report = verify_isometry(&s.x(), |p| g.apply(p), &Sampler::<f64>::new(9, ()), 5_000, ScalarMode::default()).unwrap();
        assert!(report.passed(), "{:?}", report.failures.first());
    }
    // exact mode is refused over floats
    let g = construct_x_isometry(&LineIsometry::translation(0.5), &s.subgroup);
    assert!(verify_isometry(&s.x(), |p| g.apply(p), &Sampler::<f64>::new(9, ()), 1, ScalarMode::Exact).is_err());
}
