//! Exact arithmetic in a real quadratic field `ℚ(√d)`.
//!
//! [`ExactScalar`] stores `a + b·√d` with arbitrary-precision rational `a`,
//! `b`. Because `√d` is irrational the pair `(a, b)` is unique, so structural
//! equality is value equality and every sign, floor and comparison decision
//! below is exact.
//!
//! [`Scalar`] abstracts over `ExactScalar` and `f64` so that the geometry can
//! run in either mode. [`Length`] represents `√radicand + offset`, the shape of
//! every distance in the glued space, and compares such values exactly.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default tolerance for floating-point comparisons of sampled quantities.
pub const FLOAT_EPSILON: f64 = 1e-9;
/// Tolerance for floating-point checks of identities that hold exactly.
pub const IDENTITY_EPSILON: f64 = 1e-12;

/// The field context `ℚ(√d)`: `d` is square-free and at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticField {
    d: u64,
}

impl Default for QuadraticField {
    fn default() -> Self {
        QuadraticField { d: 2 }
    }
}

impl QuadraticField {
    pub fn new(d: u64) -> Result<Self> {
        if d < 2 || !is_square_free(d) {
            return Err(Error::InvalidField(d));
        }
        Ok(QuadraticField { d })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn element(&self, a: BigRational, b: BigRational) -> ExactScalar {
        ExactScalar { a, b, field: *self }
    }

    pub fn rational(&self, q: BigRational) -> ExactScalar {
        self.element(q, BigRational::zero())
    }

    pub fn integer(&self, n: i64) -> ExactScalar {
        self.rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(&self, numer: i64, denom: i64) -> ExactScalar {
        self.rational(BigRational::new(numer.into(), denom.into()))
    }

    /// `q·√d`.
    pub fn surd(&self, q: BigRational) -> ExactScalar {
        self.element(BigRational::zero(), q)
    }

    pub fn sqrt_d(&self) -> ExactScalar {
        self.surd(BigRational::one())
    }

    pub fn zero(&self) -> ExactScalar {
        self.integer(0)
    }

    pub fn one(&self) -> ExactScalar {
        self.integer(1)
    }
}

fn is_square_free(d: u64) -> bool {
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Sign of a real number, `-1`, `0` or `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn of_ordering(ord: Ordering) -> Self {
        match ord {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn to_ordering(self) -> Ordering {
        match self {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }

    pub fn of_rational(q: &BigRational) -> Self {
        Sign::of_ordering(q.numer().sign().cmp(&num_bigint::Sign::NoSign))
    }

    fn times(self, other: Sign) -> Sign {
        Sign::of_ordering((self.as_i8() * other.as_i8()).cmp(&0))
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// Exact element `a + b·√d` of a real quadratic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
    field: QuadraticField,
}

impl ExactScalar {
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// `Some(q)` when the value is the rational `q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.b.is_zero().then_some(&self.a)
    }

    /// `Some(n)` when the value is the integer `n`.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    /// Galois conjugate `a − b·√d`.
    pub fn conjugate(&self) -> Self {
        self.field.element(self.a.clone(), -self.b.clone())
    }

    /// Field norm `a² − d·b²`, nonzero for nonzero values.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - self.d_rational() * &self.b * &self.b
    }

    fn d_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.field.d))
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch { left: self.field.d, right: other.field.d })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.field.element(&self.a + &other.a, &self.b + &other.b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.field.element(&self.a - &other.a, &self.b - &other.b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let d = self.d_rational();
        let a = &self.a * &other.a + d * &self.b * &other.b;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(self.field.element(a, b))
    }

    pub fn checked_recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(self.field.element(&self.a / &n, -(&self.b / &n)))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        self.checked_mul(&other.checked_recip()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        self.field.element(&self.a * q, &self.b * q)
    }

    /// Exact sign, from the signs of `a`, `b` and a comparison of `a²`
    /// against `d·b²` when they disagree.
    pub fn sign(&self) -> Sign {
        let sa = Sign::of_rational(&self.a);
        let sb = Sign::of_rational(&self.b);
        match (sa, sb) {
            (_, Sign::Zero) => sa,
            (Sign::Zero, _) => sb,
            _ if sa == sb => sa,
            _ => {
                let a2 = &self.a * &self.a;
                let db2 = self.d_rational() * &self.b * &self.b;
                if a2 > db2 {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // b·√d lies strictly between w and w + 1.
        let w = floor_surd(&self.b, self.field.d);
        let lower = (&self.a + BigRational::from_integer(w)).floor().to_integer();
        let next: BigInt = &lower + 1;
        let above = self.clone() - &self.field.rational(BigRational::from_integer(next.clone()));
        if above.sign() == Sign::Negative {
            lower
        } else {
            next
        }
    }

    /// `(n, f)` with `self = n + f` and `0 ≤ f < 1`.
    pub fn floor_frac(&self) -> (BigInt, ExactScalar) {
        let n = self.floor();
        let f = self.field.element(&self.a - BigRational::from_integer(n.clone()), self.b.clone());
        (n, f)
    }

    /// Nearest `f64`; differences of nearly equal terms go through the
    /// conjugate to avoid cancellation.
    pub fn to_f64(&self) -> f64 {
        let fa = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return fa;
        }
        let db2 = (self.d_rational() * &self.b * &self.b).to_f64().unwrap_or(f64::NAN);
        let root = libm::sqrt(db2);
        let fb = if self.b.is_positive() { root } else { -root };
        let same_sign = self.a.is_zero() || (self.a.is_positive() == self.b.is_positive());
        if same_sign {
            fa + fb
        } else {
            let n = self.norm().to_f64().unwrap_or(f64::NAN);
            n / (fa - fb)
        }
    }
}

/// `floor(b·√d)` for `b ≠ 0`, via the integer square root of `d·p²`.
fn floor_surd(b: &BigRational, d: u64) -> BigInt {
    let p = b.numer();
    let q = b.denom();
    let n = BigInt::from(d) * p * p;
    let r = n.sqrt();
    let pos = r.div_floor(q);
    if p.is_positive() {
        pos
    } else {
        -pos - 1
    }
}

/// Formats a reduced rational as `p` or `p/q`.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `p/q`, or a decimal such as `-0.25` or `1e-3` into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::parse(s, "empty number"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::parse(s, "bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::parse(s, "bad denominator"))?;
        if d.is_zero() {
            return Err(Error::parse(s, "zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| Error::parse(s, "bad exponent"))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::parse(s, "no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::parse(s, "invalid digit"));
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().unwrap_or_default() };
    if neg {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

impl fmt::Display for ExactScalar {
    /// Wire grammar `<rat> + <rat>*sqrt(<d>)`, both rationals reduced.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}*sqrt({})",
            format_rational(&self.a),
            format_rational(&self.b),
            self.field.d
        )
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, rest) = s.split_once(" + ").ok_or_else(|| Error::parse(s, "expected `<rat> + <rat>*sqrt(<d>)`"))?;
        let (b, rest) = rest.split_once("*sqrt(").ok_or_else(|| Error::parse(s, "missing `*sqrt(`"))?;
        let d = rest.strip_suffix(')').ok_or_else(|| Error::parse(s, "missing `)`"))?;
        let d: u64 = d.parse().map_err(|_| Error::parse(s, "bad field discriminant"))?;
        let field = QuadraticField::new(d)?;
        let a = parse_fraction(a).ok_or_else(|| Error::parse(s, "bad rational part"))?;
        let b = parse_fraction(b).ok_or_else(|| Error::parse(s, "bad surd coefficient"))?;
        Ok(field.element(a, b))
    }
}

fn parse_fraction(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $trait<&ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        self.field.element(-self.a, -self.b)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -self.clone()
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_sub(other).ok().map(|d| d.sign().to_ordering())
    }
}

/// Field operation selector for [`qf_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Fallible field arithmetic; the operator impls panic where this errors.
pub fn qf_arith(x: &ExactScalar, y: &ExactScalar, op: ArithOp) -> Result<ExactScalar> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Sub => x.checked_sub(y),
        ArithOp::Mul => x.checked_mul(y),
        ArithOp::Div => x.checked_div(y),
    }
}

/// Whether decisions are exact or `f64` with a comparison tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarMode {
    Exact,
    Float { epsilon: f64 },
}

impl ScalarMode {
    pub fn float(epsilon: f64) -> Result<Self> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(ScalarMode::Float { epsilon })
        } else {
            Err(Error::NonPositive("float epsilon"))
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ScalarMode::Exact)
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            ScalarMode::Exact => None,
            ScalarMode::Float { epsilon } => Some(*epsilon),
        }
    }

    /// Rejects exact mode over a floating-point scalar type.
    pub fn check_supported<S: Scalar>(&self) -> Result<()> {
        if self.is_exact() && !S::EXACT {
            Err(Error::ExactnessRequired("exact mode over f64 scalars"))
        } else {
            Ok(())
        }
    }
}

impl Default for ScalarMode {
    fn default() -> Self {
        ScalarMode::Float { epsilon: FLOAT_EPSILON }
    }
}

/// Ordered field operations shared by the exact and floating-point modes.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    type Context: Clone + fmt::Debug + PartialEq;

    /// True when comparisons and reductions involve no rounding.
    const EXACT: bool;

    fn context(&self) -> Self::Context;
    fn from_rational(ctx: &Self::Context, q: &BigRational) -> Self;
    fn sign(&self) -> Sign;
    fn floor_frac(&self) -> (BigInt, Self);
    fn to_f64(&self) -> f64;
    /// `Some(true)` for rationals, `Some(false)` for irrationals, `None` when
    /// the representation cannot tell.
    fn is_rational(&self) -> Option<bool>;

    fn from_integer(ctx: &Self::Context, n: &BigInt) -> Self {
        Self::from_rational(ctx, &BigRational::from_integer(n.clone()))
    }

    fn from_i64(ctx: &Self::Context, n: i64) -> Self {
        Self::from_integer(ctx, &BigInt::from(n))
    }

    fn zero_in(ctx: &Self::Context) -> Self {
        Self::from_i64(ctx, 0)
    }

    fn zero_like(&self) -> Self {
        Self::zero_in(&self.context())
    }

    fn is_zero_value(&self) -> bool {
        self.sign() == Sign::Zero
    }

    fn frac(&self) -> Self {
        self.floor_frac().1
    }

    fn abs(&self) -> Self {
        if self.sign() == Sign::Negative {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        (self.clone() - other).sign().to_ordering()
    }

    fn min_value(&self, other: &Self) -> Self {
        if self.cmp_value(other) == Ordering::Greater {
            other.clone()
        } else {
            self.clone()
        }
    }

    fn max_value(&self, other: &Self) -> Self {
        if self.cmp_value(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Multiplies by an integer.
    fn times_int(&self, k: &BigInt) -> Self {
        self.clone() * &Self::from_integer(&self.context(), k)
    }

    /// Multiplies by a rational.
    fn times_rational(&self, q: &BigRational) -> Self {
        self.clone() * &Self::from_rational(&self.context(), q)
    }
}

impl Scalar for ExactScalar {
    type Context = QuadraticField;
    const EXACT: bool = true;

    fn context(&self) -> QuadraticField {
        self.field
    }

    fn from_rational(ctx: &QuadraticField, q: &BigRational) -> Self {
        ctx.rational(q.clone())
    }

    fn sign(&self) -> Sign {
        ExactScalar::sign(self)
    }

    fn floor_frac(&self) -> (BigInt, Self) {
        ExactScalar::floor_frac(self)
    }

    fn to_f64(&self) -> f64 {
        ExactScalar::to_f64(self)
    }

    fn is_rational(&self) -> Option<bool> {
        Some(self.b.is_zero())
    }

    fn times_rational(&self, q: &BigRational) -> Self {
        self.scale(q)
    }
}

impl Scalar for f64 {
    type Context = ();
    const EXACT: bool = false;

    fn context(&self) {}

    fn from_rational(_: &(), q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn sign(&self) -> Sign {
        if *self > 0.0 {
            Sign::Positive
        } else if *self < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    fn floor_frac(&self) -> (BigInt, Self) {
        let fl = libm::floor(*self);
        let mut f = *self - fl;
        let mut n = BigInt::from_f64(fl).unwrap_or_default();
        // A tiny negative input rounds `x - floor(x)` up to exactly 1.
        if f >= 1.0 {
            f = 0.0;
            n += 1;
        }
        (n, f)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_rational(&self) -> Option<bool> {
        None
    }
}

/// `√radicand + offset` with `radicand ≥ 0`.
///
/// Every distance of the glued space has this form: a flat-torus distance
/// plus zero, `R`, or a capped line difference.
#[derive(Debug, Clone, PartialEq)]
pub struct Length<S> {
    pub radicand: S,
    pub offset: S,
}

impl<S: Scalar> Length<S> {
    pub fn new(radicand: S, offset: S) -> Self {
        Length { radicand, offset }
    }

    pub fn root(radicand: S) -> Self {
        let offset = radicand.zero_like();
        Length { radicand, offset }
    }

    pub fn value(&self) -> f64 {
        libm::sqrt(self.radicand.to_f64().max(0.0)) + self.offset.to_f64()
    }

    pub fn plus_offset(mut self, extra: &S) -> Self {
        self.offset = self.offset + extra;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.compare(&Length::root(self.radicand.zero_like())) == Ordering::Equal
    }

    /// Exact comparison (for exact scalars); decided by repeated squaring of
    /// sign-known quantities.
    pub fn compare(&self, other: &Self) -> Ordering {
        // sign(√A − (√A' + D)), D = B' − B
        let d = other.offset.clone() - &self.offset;
        let rhs_sign = sign_lin_root(&d, Sign::Positive, &other.radicand);
        if rhs_sign == Sign::Negative {
            return Ordering::Greater;
        }
        // Both sides nonnegative: compare A with (√A' + D)².
        let e = self.radicand.clone() - &other.radicand - &(d.clone() * &d);
        let four = S::from_i64(&d.context(), 4);
        let x = four * &d * &d * &other.radicand;
        // A − (√A' + D)² = E − 2D√A' = E − sign(D)·√(4D²A')
        sign_lin_root(&e, -d.sign(), &x).to_ordering()
    }

    pub fn exact_eq(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

/// Sign of `y + s·√x` for `x ≥ 0`.
pub fn sign_lin_root<S: Scalar>(y: &S, s: Sign, x: &S) -> Sign {
    match s {
        Sign::Zero => y.sign(),
        Sign::Positive => sign_plus_root(y, x),
        Sign::Negative => -sign_plus_root(&-y.clone(), x),
    }
}

fn sign_plus_root<S: Scalar>(y: &S, x: &S) -> Sign {
    match y.sign() {
        Sign::Positive => Sign::Positive,
        Sign::Zero => {
            if x.is_zero_value() {
                Sign::Zero
            } else {
                Sign::Positive
            }
        }
        // √x − |y| has the sign of x − y².
        Sign::Negative => (x.clone() - &(y.clone() * y)).sign(),
    }
}

/// Sign of `f + s1·√p + s2·√q` for `p, q ≥ 0`.
pub fn sign_two_roots<S: Scalar>(f: &S, s1: Sign, p: &S, s2: Sign, q: &S) -> Sign {
    let left = sign_lin_root(f, s1, p);
    // Compare `f + s1√p` against `r = −s2√q`.
    let r = if q.is_zero_value() { Sign::Zero } else { -s2 };
    match left.cmp(&r) {
        Ordering::Greater => return Sign::Positive,
        Ordering::Less => return Sign::Negative,
        Ordering::Equal => {}
    }
    if left == Sign::Zero {
        return Sign::Zero;
    }
    // Same strict sign: compare squares, (f + s1√p)² − q = f² + p − q + 2·s1·f·√p.
    let ctx = f.context();
    let four = S::from_i64(&ctx, 4);
    let g = f.clone() * f + p - q;
    let x = four * f * f * p;
    let sq = sign_lin_root(&g, s1.times(f.sign()), &x);
    if left == Sign::Positive {
        sq
    } else {
        -sq
    }
}

/// Exact sign of `d(x,y) + d(y,z) − d(x,z)`, each a [`Length`].
pub fn triangle_sign<S: Scalar>(xy: &Length<S>, yz: &Length<S>, xz: &Length<S>) -> Sign {
    // √B + √C + e − √A, e = b + c − a
    let e = xy.offset.clone() + &yz.offset - &xz.offset;
    let a = &xz.radicand;
    // Rr = √A − e
    let rr = sign_lin_root(&-e.clone(), Sign::Positive, a);
    let left_zero = xy.radicand.is_zero_value() && yz.radicand.is_zero_value();
    if rr != Sign::Positive {
        return if left_zero && rr == Sign::Zero { Sign::Zero } else { Sign::Positive };
    }
    // (√B + √C)² − (√A − e)² = B + C − A − e² + √(4BC) + 2e√A
    let ctx = e.context();
    let four = S::from_i64(&ctx, 4);
    let f = xy.radicand.clone() + &yz.radicand - a - &(e.clone() * &e);
    let p = four.clone() * &xy.radicand * &yz.radicand;
    let q = four * &e * &e * a;
    sign_two_roots(&f, Sign::Positive, &p, e.sign(), &q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec::Vec;

    fn q2() -> QuadraticField {
        QuadraticField::default()
    }

    fn el(a: (i64, i64), b: (i64, i64)) -> ExactScalar {
        q2().element(BigRational::new(a.0.into(), a.1.into()), BigRational::new(b.0.into(), b.1.into()))
    }

    #[test]
    fn conjugate_product_and_inverse() {
        let x = el((1, 1), (1, 1));
        let y = el((1, 1), (-1, 1));
        assert_eq!(&x * &y, q2().integer(-1));
        assert_eq!(x.clone() + &q2().zero(), x);
        assert_eq!(q2().one() / &x, el((-1, 1), (1, 1)));
        assert_eq!((q2().one() / &x) * &x, q2().one());
    }

    #[test]
    fn division_by_zero_and_field_mismatch() {
        let x = el((1, 1), (1, 1));
        assert_eq!(qf_arith(&x, &q2().zero(), ArithOp::Div), Err(Error::DivisionByZero));
        let q3 = QuadraticField::new(3).unwrap();
        assert_eq!(
            qf_arith(&x, &q3.sqrt_d(), ArithOp::Add),
            Err(Error::FieldMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    #[should_panic(expected = "mismatched field")]
    fn operator_mixing_contexts_aborts() {
        let _ = q2().sqrt_d() + &QuadraticField::new(5).unwrap().sqrt_d();
    }

    #[test]
    fn field_validation() {
        assert!(QuadraticField::new(1).is_err());
        assert!(QuadraticField::new(4).is_err());
        assert!(QuadraticField::new(12).is_err());
        assert!(QuadraticField::new(6).is_ok());
    }

    #[test]
    fn signs() {
        assert_eq!(q2().zero().sign(), Sign::Zero);
        assert_eq!(el((-1, 1), (1, 1)).sign(), Sign::Positive);
        // 1 vs 2·(2/3)² = 8/9
        assert_eq!(el((1, 1), (-2, 3)).sign(), Sign::Positive);
        assert_eq!(el((41, 1), (-29, 1)).sign(), Sign::Negative);
        assert_eq!(el((-99, 1), (70, 1)).sign(), Sign::Negative);
        assert_eq!(el((-98, 1), (70, 1)).sign(), Sign::Positive);
    }

    #[test]
    fn floors() {
        let s = q2().sqrt_d();
        assert_eq!(s.floor_frac(), (BigInt::from(1), el((-1, 1), (1, 1))));
        assert_eq!((-s).floor_frac(), (BigInt::from(-2), el((2, 1), (-1, 1))));
        assert_eq!(el((3, 1), (2, 1)).floor_frac(), (BigInt::from(5), el((-2, 1), (2, 1))));
        assert_eq!(q2().ratio(-7, 2).floor_frac(), (BigInt::from(-4), q2().ratio(1, 2)));
        // 99/70 < √2 barely: 70√2 − 99 ≈ −0.00714
        assert_eq!(el((0, 1), (70, 1)).floor(), BigInt::from(98));
    }

    #[test]
    fn float_conversion() {
        assert_eq!(q2().zero().to_f64(), 0.0);
        assert!((el((1, 1), (1, 1)).to_f64() - 2.414_213_562_373_095).abs() < 1e-15);
        let v = el((41, 1), (-29, 1)).to_f64();
        assert!((v + 0.012_193_308_819_756_415).abs() < 4e-18, "{v}");
    }

    #[test]
    fn wire_grammar() {
        let x = el((-1, 1), (1, 1));
        assert_eq!(x.to_string(), "-1 + 1*sqrt(2)");
        assert_eq!(q2().ratio(1, 2).to_string(), "1/2 + 0*sqrt(2)");
        let y = el((3, 4), (-5, 6));
        assert_eq!(y.to_string().parse::<ExactScalar>().unwrap(), y);
        assert!("1 + 2*sqrt(4)".parse::<ExactScalar>().is_err());
        assert!("1 - 2*sqrt(2)".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn rational_parsing() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("0.4").unwrap(), r(2, 5));
        assert_eq!(parse_rational("-1.25").unwrap(), r(-5, 4));
        assert_eq!(parse_rational("3/6").unwrap(), r(1, 2));
        assert_eq!(parse_rational("1e-3").unwrap(), r(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), r(250, 1));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        for bad in ["", "x", "1/0", "1.2.3", "-", "1e"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn float_floor_frac_stays_in_unit_interval() {
        let (n, f) = (-1e-20f64).floor_frac();
        assert_eq!((n, f), (BigInt::from(0), 0.0));
        let (n, f) = 2.75f64.floor_frac();
        assert_eq!((n, f), (BigInt::from(2), 0.75));
    }

    fn lengths() -> Vec<Length<ExactScalar>> {
        let f = q2();
        let mut out = Vec::new();
        for (ra, rb) in [((0, 1), (0, 1)), ((2, 1), (0, 1)), ((1, 1), (0, 1)), ((3, 1), (1, 1)), ((9, 4), (0, 1)), ((1, 2), (1, 4))] {
            for off in [(0, 1), (1, 1), (-1, 2), (1, 3), (3, 2)] {
                out.push(Length::new(el(ra, rb), f.ratio(off.0, off.1)));
            }
        }
        out
    }

    #[test]
    fn length_comparison_matches_floats() {
        let ls = lengths();
        for x in &ls {
            for y in &ls {
                let (a, b) = (x.value(), y.value());
                let expected = if (a - b).abs() < 1e-12 { None } else { a.partial_cmp(&b) };
                let got = x.compare(y);
                match expected {
                    Some(o) => assert_eq!(got, o, "{x:?} vs {y:?}"),
                    None => assert_eq!(got, Ordering::Equal, "{x:?} vs {y:?}"),
                }
            }
        }
        // √2 + 1 = √(3 + 2√2)
        let a = Length::new(q2().integer(2), q2().one());
        let b = Length::root(el((3, 1), (2, 1)));
        assert!(a.exact_eq(&b));
        // √(9/4) − 1/2 = 1 = √1
        assert!(Length::new(q2().ratio(9, 4), q2().ratio(-1, 2)).exact_eq(&Length::root(q2().one())));
    }

    #[test]
    fn triangle_sign_matches_floats() {
        let ls = lengths();
        for x in ls.iter().step_by(2) {
            for y in ls.iter().step_by(3) {
                for z in &ls {
                    let v = x.value() + y.value() - z.value();
                    let s = triangle_sign(x, y, z);
                    if v.abs() > 1e-12 {
                        assert_eq!(s, if v > 0.0 { Sign::Positive } else { Sign::Negative }, "{x:?} {y:?} {z:?}");
                    } else {
                        assert_eq!(s, Sign::Zero, "{x:?} {y:?} {z:?}");
                    }
                }
            }
        }
        // 1 + 1 = 2 exactly through radicals: √1 + √1 − √4
        let one = Length::root(q2().one());
        assert_eq!(triangle_sign(&one, &one, &Length::root(q2().integer(4))), Sign::Zero);
    }
}
