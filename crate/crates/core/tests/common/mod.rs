#![allow(dead_code)]

use isoglue_core::{ExactScalar, QuadraticField, TorusPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

pub fn q2() -> QuadraticField {
    QuadraticField::default()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `a/b + (c/e)·√d` with small numerators and denominators.
pub fn scalar_in(field: QuadraticField, range: i64) -> impl Strategy<Value = ExactScalar> {
    (-range..=range, 1..=24i64, -range..=range, 1..=12i64)
        .prop_map(move |(a, b, c, e)| field.element(rat(a, b), rat(c, e)))
}

pub fn scalar() -> impl Strategy<Value = ExactScalar> {
    scalar_in(q2(), 40)
}

pub fn irrational() -> impl Strategy<Value = ExactScalar> {
    (-40..=40i64, 1..=24i64, prop_oneof![-12..=-1i64, 1..=12i64], 1..=12i64)
        .prop_map(|(a, b, c, e)| q2().element(rat(a, b), rat(c, e)))
}

pub fn torus_point() -> impl Strategy<Value = TorusPoint<ExactScalar>> {
    (scalar_in(q2(), 6), scalar_in(q2(), 6)).prop_map(|(a, b)| TorusPoint::new(a, b))
}
