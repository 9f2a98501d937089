mod common;

use common::*;
use isoglue_core::numerics::{qf_arith, ArithOp, Sign};
use isoglue_core::{ExactScalar, Error, QuadraticField, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

proptest! {
    #[test]
    fn ring_axioms(x in scalar(), y in scalar(), z in scalar()) {
        prop_assert_eq!(x.clone() + &y, y.clone() + &x);
        prop_assert_eq!(x.clone() * &y, y.clone() * &x);
        prop_assert_eq!((x.clone() + &y) + &z, x.clone() + &(y.clone() + &z));
        prop_assert_eq!((x.clone() * &y) * &z, x.clone() * &(y.clone() * &z));
        prop_assert_eq!(x.clone() * &(y.clone() + &z), x.clone() * &y + &(x.clone() * &z));
        prop_assert!((x.clone() - &x).is_zero());
    }

    #[test]
    fn inverses(x in scalar()) {
        if x.is_zero() {
            prop_assert!(matches!(x.checked_recip(), Err(Error::DivisionByZero)));
        } else {
            let inv = x.checked_recip().unwrap();
            prop_assert_eq!(x.clone() * &inv, q2().one());
            // norm is multiplicative and the conjugate realises it
            prop_assert_eq!((x.clone() * &x.conjugate()).as_rational().cloned(), Some(x.norm()));
        }
    }

    #[test]
    fn sign_agrees_with_floats(x in scalar()) {
        let v = x.to_f64();
        match x.sign() {
            Sign::Zero => prop_assert_eq!(v, 0.0),
            Sign::Positive => prop_assert!(v > 0.0),
            Sign::Negative => prop_assert!(v < 0.0),
        }
    }

    #[test]
    fn floor_reassembles(x in scalar()) {
        let (n, f) = x.floor_frac();
        prop_assert_eq!(q2().rational(BigRational::from_integer(n)) + &f, x);
        prop_assert!(f.sign() != Sign::Negative);
        prop_assert_eq!((f - &q2().one()).sign(), Sign::Negative);
    }

    #[test]
    fn wire_round_trip(x in scalar()) {
        let s = x.to_string();
        prop_assert_eq!(s.parse::<ExactScalar>().unwrap(), x);
    }

    #[test]
    fn to_f64_is_accurate(x in scalar()) {
        // Decimal reference through 60-digit integers.
        let scale = BigInt::from(10u8).pow(30);
        let a = x.rational_part() * BigRational::from_integer(scale.clone());
        let b2 = x.surd_part() * x.surd_part() * BigRational::from_integer(&scale * &scale * BigInt::from(2));
        let root = (b2.numer() * BigInt::from(1u8) / b2.denom()).sqrt();
        let surd = if x.surd_part() < &BigRational::from_integer(0.into()) { -root } else { root };
        let approx = a.to_integer() + surd;
        let reference: f64 = approx.to_string().parse::<f64>().unwrap() / 1e30;
        prop_assert!((x.to_f64() - reference).abs() <= 1e-12 * (1.0 + reference.abs()));
    }
}

#[test]
fn field_mismatch_is_reported() {
    let q3 = QuadraticField::new(3).unwrap();
    let err = qf_arith(&q2().sqrt_d(), &q3.sqrt_d(), ArithOp::Add).unwrap_err();
    assert!(matches!(err, Error::FieldMismatch { left: 2, right: 3 }));
    assert!(QuadraticField::new(4).is_err());
    assert!(QuadraticField::new(1).is_err());
    assert!(QuadraticField::new(12).is_err());
}

#[test]
fn other_fields() {
    let q5 = QuadraticField::new(5).unwrap();
    let phi = (q5.one() + &q5.sqrt_d()) * &q5.ratio(1, 2);
    assert_eq!(phi.clone() * &phi, phi.clone() + &q5.one());
    assert_eq!(phi.floor(), BigInt::from(1));
    assert!((phi.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
    assert!(Scalar::is_rational(&phi) == Some(false));
}
