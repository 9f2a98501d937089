//! Byte-stable JSON encoding of scalars, points and lengths.
//!
//! Floats are written with 17 significant digits; exact scalars as strings
//! in the `<rat> + <rat>*sqrt(<d>)` grammar. Object keys come out sorted
//! because `serde_json::Map` is a `BTreeMap` here.

use isoglue_core::flat_torus::TorusPoint;
use isoglue_core::numerics::format_rational;
use isoglue_core::sampling::RandomScalar;
use isoglue_core::{ExactScalar, Length, XPoint, ZPoint};
use num_rational::BigRational;
use serde_json::{Map, Number, Value};

/// `f64` as a JSON number with 17 significant digits; non-finite values
/// become `null`.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let text = format!("{x:.16e}");
    Value::Number(text.parse::<Number>().expect("formatted float is a JSON number"))
}

pub fn rational(q: &BigRational) -> Value {
    Value::String(format_rational(q))
}

/// Builds an object from `(key, value)` pairs.
pub fn object<I, K>(pairs: I) -> Value
where
    I: IntoIterator<Item = (K, Value)>,
    K: Into<String>,
{
    Value::Object(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect::<Map<_, _>>())
}

/// Scalars the command line can run on.
pub trait WireScalar: RandomScalar + Send + Sync {
    fn wire(&self) -> Value;
    fn from_exact(x: &ExactScalar) -> Self;
    fn context_of(x: &ExactScalar) -> Self::Context;
}

impl WireScalar for ExactScalar {
    fn wire(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_exact(x: &ExactScalar) -> Self {
        x.clone()
    }

    fn context_of(x: &ExactScalar) -> Self::Context {
        x.field()
    }
}

impl WireScalar for f64 {
    fn wire(&self) -> Value {
        float(*self)
    }

    fn from_exact(x: &ExactScalar) -> Self {
        x.to_f64()
    }

    fn context_of(_: &ExactScalar) {}
}

pub fn torus_point<S: WireScalar>(p: &TorusPoint<S>) -> Value {
    Value::Array(vec![p.u1().wire(), p.u2().wire()])
}

pub fn z_point<S: WireScalar>(p: &ZPoint<S>) -> Value {
    match p {
        ZPoint::Compact(y) => object([("kind", "compact".into()), ("y", torus_point(y))]),
        ZPoint::Cylinder(y, t) => object([("kind", "cylinder".into()), ("t", t.wire()), ("y", torus_point(y))]),
    }
}

pub fn x_point<S: WireScalar>(p: &XPoint<S>) -> Value {
    match p {
        XPoint::Compact(y) => object([("kind", "compact".into()), ("y", torus_point(y))]),
        XPoint::Graph(t) => object([("kind", "graph".into()), ("t", t.wire())]),
    }
}

/// `√radicand + offset`, with its value.
pub fn length<S: WireScalar>(l: &Length<S>) -> Value {
    object([("offset", l.offset.wire()), ("radicand", l.radicand.wire()), ("value", float(l.value()))])
}

/// Points that appear in reports.
pub trait WirePoint {
    fn wire(&self) -> Value;
}

impl<S: WireScalar> WirePoint for ZPoint<S> {
    fn wire(&self) -> Value {
        z_point(self)
    }
}

impl<S: WireScalar> WirePoint for XPoint<S> {
    fn wire(&self) -> Value {
        x_point(self)
    }
}

impl<S: WireScalar> WirePoint for TorusPoint<S> {
    fn wire(&self) -> Value {
        torus_point(self)
    }
}

/// Serializes with sorted keys and a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
