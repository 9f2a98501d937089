//! The flat torus `Y = ℝ²/ℤ²` with a constant metric tensor.
//!
//! Distances are minima of the quadratic form over integer translates of the
//! displacement. The lattice `ℤ²` is Lagrange-reduced once per Gram matrix;
//! in reduced coordinates the closest translate of a centered displacement
//! lies in the window `{-1, 0, 1}²`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::{Length, Scalar, Sign};

/// Symmetric positive definite `[[g11, g12], [g12, g22]]` with rational
/// entries, plus a Lagrange-reduced basis of `ℤ²` under it.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    g11: BigRational,
    g12: BigRational,
    g22: BigRational,
    // Columns are the reduced basis vectors; `inverse` is the integer inverse.
    basis: [[i64; 2]; 2],
    inverse: [[i64; 2]; 2],
    systole_sq: BigRational,
}

impl GramMatrix {
    pub fn new(g11: BigRational, g12: BigRational, g22: BigRational) -> Result<Self> {
        let det = &g11 * &g22 - &g12 * &g12;
        if !g11.is_positive() || !det.is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        let mut gram = GramMatrix {
            g11,
            g12,
            g22,
            basis: [[1, 0], [0, 1]],
            inverse: [[1, 0], [0, 1]],
            systole_sq: BigRational::zero(),
        };
        gram.reduce();
        Ok(gram)
    }

    pub fn identity() -> Self {
        let one = BigRational::one();
        GramMatrix::new(one.clone(), BigRational::zero(), one).expect("identity is positive definite")
    }

    pub fn from_integers(g11: i64, g12: i64, g22: i64) -> Result<Self> {
        let q = |n: i64| BigRational::from_integer(n.into());
        GramMatrix::new(q(g11), q(g12), q(g22))
    }

    pub fn entries(&self) -> [&BigRational; 3] {
        [&self.g11, &self.g12, &self.g22]
    }

    /// Reduced basis vectors `b1, b2` with `|b1| ≤ |b2|`.
    pub fn reduced_basis(&self) -> [[i64; 2]; 2] {
        let [[a, b], [c, d]] = self.basis;
        [[a, c], [b, d]]
    }

    /// `xᵀ G y` on integer vectors.
    pub fn bilinear_int(&self, x: [i64; 2], y: [i64; 2]) -> BigRational {
        let r = |n: i64| BigRational::from_integer(BigInt::from(n));
        &self.g11 * r(x[0] * y[0]) + &self.g12 * r(x[0] * y[1] + x[1] * y[0]) + &self.g22 * r(x[1] * y[1])
    }

    /// `vᵀ G v`.
    pub fn quadratic_form<S: Scalar>(&self, x: &S, y: &S) -> S {
        let ctx = x.context();
        let [g11, g12, g22] = self.scalars::<S>(&ctx);
        quadratic(&g11, &g12, &g22, x, y)
    }

    fn scalars<S: Scalar>(&self, ctx: &S::Context) -> [S; 3] {
        [
            S::from_rational(ctx, &self.g11),
            S::from_rational(ctx, &self.g12),
            S::from_rational(ctx, &self.g22),
        ]
    }

    fn reduce(&mut self) {
        let mut u = [1i64, 0];
        let mut w = [0i64, 1];
        if self.bilinear_int(u, u) > self.bilinear_int(w, w) {
            core::mem::swap(&mut u, &mut w);
        }
        loop {
            let mu = round_rational(&(self.bilinear_int(u, w) / self.bilinear_int(u, u)));
            let mu: i64 = mu.try_into().expect("reduction coefficient fits in i64");
            w = [w[0] - mu * u[0], w[1] - mu * u[1]];
            if self.bilinear_int(w, w) >= self.bilinear_int(u, u) {
                break;
            }
            core::mem::swap(&mut u, &mut w);
        }
        let det = u[0] * w[1] - w[0] * u[1];
        debug_assert!(det == 1 || det == -1);
        self.basis = [[u[0], w[0]], [u[1], w[1]]];
        self.inverse = [[w[1] * det, -w[0] * det], [-u[1] * det, u[0] * det]];
        self.systole_sq = self.bilinear_int(u, u);
    }

    /// Squared length of the shortest nonzero vector of `ℤ²`.
    pub fn systole_squared(&self) -> &BigRational {
        &self.systole_sq
    }
}

fn quadratic<S: Scalar>(g11: &S, g12: &S, g22: &S, x: &S, y: &S) -> S {
    let two = S::from_i64(&x.context(), 2);
    g11.clone() * x * x + &(two * g12 * x * y) + &(g22.clone() * y * y)
}

fn round_rational(q: &BigRational) -> BigInt {
    (q + BigRational::new(1.into(), 2.into())).floor().to_integer()
}

fn round_scalar<S: Scalar>(x: &S) -> S {
    let half = S::from_rational(&x.context(), &BigRational::new(1.into(), 2.into()));
    let (n, _) = (x.clone() + &half).floor_frac();
    S::from_integer(&x.context(), &n)
}

/// A point of `Y` with coordinates reduced to `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint<S> {
    u1: S,
    u2: S,
}

impl<S: Scalar> TorusPoint<S> {
    /// Reduces both coordinates modulo 1.
    pub fn new(u1: S, u2: S) -> Self {
        TorusPoint { u1: u1.frac(), u2: u2.frac() }
    }

    pub fn identity(ctx: &S::Context) -> Self {
        TorusPoint { u1: S::zero_in(ctx), u2: S::zero_in(ctx) }
    }

    pub fn u1(&self) -> &S {
        &self.u1
    }

    pub fn u2(&self) -> &S {
        &self.u2
    }

    pub fn context(&self) -> S::Context {
        self.u1.context()
    }

    pub fn is_identity(&self) -> bool {
        self.u1.is_zero_value() && self.u2.is_zero_value()
    }

    /// Group law `x·y`, written additively on coordinates.
    pub fn translate(&self, by: &TorusPoint<S>) -> Self {
        translate(self, by)
    }

    pub fn invert(&self) -> Self {
        invert(self)
    }

    /// `other · self⁻¹`.
    pub fn difference_to(&self, other: &TorusPoint<S>) -> Self {
        TorusPoint::new(other.u1.clone() - &self.u1, other.u2.clone() - &self.u2)
    }
}

/// `frac(p + x)` componentwise.
pub fn translate<S: Scalar>(p: &TorusPoint<S>, x: &TorusPoint<S>) -> TorusPoint<S> {
    TorusPoint::new(p.u1.clone() + &x.u1, p.u2.clone() + &x.u2)
}

/// `frac(−p)` componentwise.
pub fn invert<S: Scalar>(p: &TorusPoint<S>) -> TorusPoint<S> {
    TorusPoint::new(-p.u1.clone(), -p.u2.clone())
}

/// Flat distance `d₁`; the returned [`Length`] carries the exact squared
/// distance as its radicand.
pub fn torus_distance<S: Scalar>(p: &TorusPoint<S>, q: &TorusPoint<S>, gram: &GramMatrix) -> Length<S> {
    torus_distance_window(p, q, gram, 1)
}

/// [`torus_distance`] with a configurable shift window `{-radius..=radius}²`
/// around the centered reduced coordinates.
pub fn torus_distance_window<S: Scalar>(
    p: &TorusPoint<S>,
    q: &TorusPoint<S>,
    gram: &GramMatrix,
    radius: i64,
) -> Length<S> {
    let ctx = p.context();
    let int = |n: i64| S::from_i64(&ctx, n);
    let [g11, g12, g22] = gram.scalars::<S>(&ctx);
    let d1 = q.u1.clone() - &p.u1;
    let d2 = q.u2.clone() - &p.u2;
    let inv = gram.inverse;
    let c1 = int(inv[0][0]) * &d1 + &(int(inv[0][1]) * &d2);
    let c2 = int(inv[1][0]) * &d1 + &(int(inv[1][1]) * &d2);
    let c1 = c1.clone() - &round_scalar(&c1);
    let c2 = c2.clone() - &round_scalar(&c2);
    let b = gram.basis;
    let shifts = (-radius..=radius).flat_map(|j1| (-radius..=radius).map(move |j2| (j1, j2)));
    let exact_at = |(j1, j2): (i64, i64)| {
        let e1 = c1.clone() + &int(j1);
        let e2 = c2.clone() + &int(j2);
        let w1 = int(b[0][0]) * &e1 + &(int(b[0][1]) * &e2);
        let w2 = int(b[1][0]) * &e1 + &(int(b[1][1]) * &e2);
        quadratic(&g11, &g12, &g22, &w1, &w2)
    };
    let pick = |cur: Option<S>, n: S| match cur {
        Some(cur) if cur.cmp_value(&n) != Ordering::Greater => Some(cur),
        _ => Some(n),
    };
    if !S::EXACT {
        let best = shifts.map(exact_at).fold(None, pick);
        return Length::root(best.expect("window is nonempty"));
    }
    // Screen the window in f64, then compare the near-minimal shifts exactly.
    let (f1, f2) = (c1.to_f64(), c2.to_f64());
    let [h11, h12, h22] = [g11.to_f64(), g12.to_f64(), g22.to_f64()];
    let approx: Vec<((i64, i64), f64)> = shifts
        .map(|(j1, j2)| {
            let (e1, e2) = (f1 + j1 as f64, f2 + j2 as f64);
            let w1 = b[0][0] as f64 * e1 + b[0][1] as f64 * e2;
            let w2 = b[1][0] as f64 * e1 + b[1][1] as f64 * e2;
            ((j1, j2), h11 * w1 * w1 + 2.0 * h12 * w1 * w2 + h22 * w2 * w2)
        })
        .collect();
    let lo = approx.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let slack = 1e-9 * (1.0 + lo);
    let best = approx.into_iter().filter(|e| e.1 <= lo + slack).map(|e| exact_at(e.0)).fold(None, pick);
    Length::root(best.expect("window is nonempty"))
}

/// A tangent vector at the identity, in lattice coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<S> {
    pub v1: S,
    pub v2: S,
}

impl<S: Scalar> TangentVector<S> {
    pub fn new(v1: S, v2: S) -> Self {
        TangentVector { v1, v2 }
    }
}

/// `√(vᵀ G v)`, exact squared norm in the radicand.
pub fn tangent_norm<S: Scalar>(v: &TangentVector<S>, gram: &GramMatrix) -> Length<S> {
    Length::root(gram.quadratic_form(&v.v1, &v.v2))
}

/// Length of the shortest nonzero lattice vector.
pub fn systole<S: Scalar>(gram: &GramMatrix, ctx: &S::Context) -> Length<S> {
    Length::root(S::from_rational(ctx, gram.systole_squared()))
}

/// A dense one-parameter subgroup `g(t) = frac(t·v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneParamSubgroup<S> {
    v: TangentVector<S>,
}

impl<S: Scalar> OneParamSubgroup<S> {
    /// Rejects directions whose slope is rational (closed, non-dense image).
    /// Floating-point directions are accepted when `v1 ≠ 0`.
    pub fn new(v: TangentVector<S>) -> Result<Self> {
        if v.v1.is_zero_value() {
            return Err(Error::NotDense("first component is zero"));
        }
        let slope = v.v2.clone() / &v.v1;
        if slope.is_rational() == Some(true) {
            return Err(Error::NotDense("slope is rational"));
        }
        Ok(OneParamSubgroup { v })
    }

    /// `v = (1, alpha)`.
    pub fn canonical(alpha: S) -> Result<Self> {
        let one = S::from_i64(&alpha.context(), 1);
        OneParamSubgroup::new(TangentVector::new(one, alpha))
    }

    pub fn direction(&self) -> &TangentVector<S> {
        &self.v
    }

    pub fn context(&self) -> S::Context {
        self.v.v1.context()
    }

    /// `α` for `v = (1, α)`.
    pub fn slope(&self) -> Result<&S> {
        let one = S::from_i64(&self.context(), 1);
        if self.v.v1 == one {
            Ok(&self.v.v2)
        } else {
            Err(Error::NonCanonicalSubgroup)
        }
    }

    pub fn point(&self, t: &S) -> TorusPoint<S> {
        subgroup_point(self, t)
    }
}

/// `g(t) = frac(t·v)` componentwise.
pub fn subgroup_point<S: Scalar>(subgroup: &OneParamSubgroup<S>, t: &S) -> TorusPoint<S> {
    TorusPoint::new(t.clone() * &subgroup.v.v1, t.clone() * &subgroup.v.v2)
}

/// Coordinate axis carrying a one-dimensional subtorus through the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// `{(s, 0)}`
    First,
    /// `{(0, s)}`
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subtorus {
    pub axis: Axis,
}

impl Subtorus {
    pub fn new(axis: Axis) -> Self {
        Subtorus { axis }
    }

    pub fn point<S: Scalar>(&self, s: S) -> TorusPoint<S> {
        let zero = s.zero_like();
        match self.axis {
            Axis::First => TorusPoint::new(s, zero),
            Axis::Second => TorusPoint::new(zero, s),
        }
    }

    pub fn coordinate<'a, S>(&self, p: &'a TorusPoint<S>) -> &'a S {
        match self.axis {
            Axis::First => &p.u1,
            Axis::Second => &p.u2,
        }
    }

    fn off_axis<'a, S>(&self, p: &'a TorusPoint<S>) -> &'a S {
        match self.axis {
            Axis::First => &p.u2,
            Axis::Second => &p.u1,
        }
    }

    /// Exact membership test; refused for floating-point scalars.
    pub fn contains<S: Scalar>(&self, p: &TorusPoint<S>) -> Result<bool> {
        subtorus_contains(self, p)
    }
}

pub fn subtorus_contains<S: Scalar>(sub: &Subtorus, p: &TorusPoint<S>) -> Result<bool> {
    if !S::EXACT {
        return Err(Error::ExactnessRequired("subtorus membership"));
    }
    Ok(sub.off_axis(p).sign() == Sign::Zero)
}
