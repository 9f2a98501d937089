mod common;

use common::*;
use isoglue_core::glued_space::{nearest_in_compact, nearest_line_set, nearest_on_line};
use isoglue_core::oracle::{self, DEFAULT_T_GRID, DEFAULT_TORUS_GRID};
use isoglue_core::sampling::sample_rng;
use isoglue_core::{ExactScalar, GluingParams, GramMatrix, Length, Sign, TorusPoint, ZPoint};
use rand::Rng;

const N: i64 = DEFAULT_TORUS_GRID as i64;

fn grid_torus_point<R: Rng>(rng: &mut R) -> (TorusPoint<ExactScalar>, (usize, usize)) {
    let (i, j) = (rng.gen_range(0..N), rng.gen_range(0..N));
    (TorusPoint::new(q2().ratio(i, N), q2().ratio(j, N)), (i as usize, j as usize))
}

fn xy(p: &TorusPoint<ExactScalar>) -> [f64; 2] {
    [p.u1().to_f64(), p.u2().to_f64()]
}

#[test]
fn nearest_compact_matches_grid_oracle() {
    let params = GluingParams::strict(q2().one(), q2().integer(2)).unwrap();
    let gram = GramMatrix::identity();
    for i in 0..10 {
        let mut rng = sample_rng(31, i);
        let (y, ij) = grid_torus_point(&mut rng);
        let r = q2().ratio(rng.gen_range(-500..500), 7);
        let p = ZPoint::Cylinder(y.clone(), r.clone());
        let got = nearest_in_compact(&p, &params, &gram, DEFAULT_TORUS_GRID).unwrap();
        assert_eq!(got.point, y);
        assert!(got.distance.exact_eq(&Length::new(q2().zero(), q2().one())));
        assert_eq!(got.gap.compare(&Length::root(q2().zero())), core::cmp::Ordering::Greater);
        let op = oracle::Point { y: xy(&y), t: Some(r.to_f64()) };
        let (arg, d) = oracle::nearest_compact(op, 1.0, 2.0, [1.0, 0.0, 1.0], DEFAULT_TORUS_GRID);
        assert_eq!(arg, ij);
        assert!((d - 1.0).abs() < 1e-12);
    }
}

#[test]
fn line_set_matches_grid_oracle() {
    let params = GluingParams::strict(q2().one(), q2().integer(2)).unwrap();
    let gram = GramMatrix::identity();
    let ts = [q2().integer(-10), q2().zero(), q2().ratio(37, 10)];
    let ts_f: Vec<f64> = ts.iter().map(ExactScalar::to_f64).collect();
    let n = 40usize;
    for i in 0..5 {
        let mut rng = sample_rng(32, i);
        let (a, b) = (rng.gen_range(0..n as i64), rng.gen_range(0..n as i64));
        let y = TorusPoint::new(q2().ratio(a, n as i64), q2().ratio(b, n as i64));
        let line = nearest_line_set(&y);
        let others: Vec<_> = (0..6).map(|_| TorusPoint::new(q2().ratio(rng.gen_range(0..n as i64), n as i64), q2().ratio(rng.gen_range(0..n as i64), n as i64))).collect();
        assert!(line.check(&params, &gram, &ts, &others).holds());
        let mins = oracle::line_set_minimizers(xy(&y), &ts_f, 1.0, 2.0, [1.0, 0.0, 1.0], n, 1e-12);
        assert_eq!(mins.len(), ts.len());
        assert!(mins.iter().all(|m| m.0 == (a as usize, b as usize)));
    }
}

#[test]
fn nearest_on_line_matches_t_grid() {
    let params = GluingParams::strict(q2().one(), q2().integer(2)).unwrap();
    let gram = GramMatrix::from_integers(2, 1, 3).unwrap();
    for i in 0..20 {
        let mut rng = sample_rng(33, i);
        let (y, _) = grid_torus_point(&mut rng);
        let (y2, _) = grid_torus_point(&mut rng);
        let r = q2().ratio(rng.gen_range(-400..400), 8);
        let p = ZPoint::Cylinder(y.clone(), r.clone());
        let got = nearest_on_line(&p, &y2, &params, &gram).unwrap();
        assert_eq!(got.point, ZPoint::Cylinder(y2.clone(), r.clone()));
        assert!(got.unique);
        assert_ne!(got.distance.radicand.sign(), Sign::Negative);
        let (t, d) = oracle::nearest_on_line(xy(&y), r.to_f64(), xy(&y2), 1.0, 2.0, [2.0, 1.0, 3.0], DEFAULT_T_GRID).unwrap();
        assert_eq!(t, r.to_f64());
        assert!((d - got.distance.value()).abs() < 1e-12);
    }
}
