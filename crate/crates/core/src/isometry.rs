//! Product isometries of `Z`, their restrictions to `X`, and the subgroup
//! acting on the one-dimensional space `Y₁ ∪ H`.
//!
//! A pair `(g_Y, g_ℝ)` of a torus isometry and a line isometry acts on `Z`
//! by `g_Y` on `Y` and by `(y, t) ↦ (g_Y(y), g_ℝ(t))` on the cylinder. Every
//! isometry of `Z` has this form. An isometry of `X` is determined by its line
//! part: the torus part is forced by `g_Y(g(t)) = g(g_ℝ(t))`.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::error::{DecomposeError, Error, Result};
use crate::flat_torus::{torus_distance, Axis, OneParamSubgroup, Subtorus, TorusPoint};
use crate::glued_space::{MetricSpace, XPoint, ZPoint};
use crate::numerics::{Scalar, ScalarMode};
use crate::sampling::PointSource;

/// `t ↦ sign·t + shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineIsometry<S> {
    pub reflect: bool,
    pub shift: S,
}

impl<S: Scalar> LineIsometry<S> {
    pub fn identity(ctx: &S::Context) -> Self {
        LineIsometry { reflect: false, shift: S::zero_in(ctx) }
    }

    /// `t ↦ t + a`.
    pub fn translation(a: S) -> Self {
        LineIsometry { reflect: false, shift: a }
    }

    /// `t ↦ c − t`, the reflection in `c/2`.
    pub fn reflection(c: S) -> Self {
        LineIsometry { reflect: true, shift: c }
    }

    pub fn sign(&self) -> i8 {
        if self.reflect {
            -1
        } else {
            1
        }
    }

    pub fn apply(&self, t: &S) -> S {
        if self.reflect {
            self.shift.clone() - t
        } else {
            t.clone() + &self.shift
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        LineIsometry { reflect: self.reflect != other.reflect, shift: self.apply(&other.shift) }
    }

    pub fn inverse(&self) -> Self {
        if self.reflect {
            self.clone()
        } else {
            LineIsometry::translation(-self.shift.clone())
        }
    }
}

/// `y ↦ x·y`, or `y ↦ x·y⁻¹` when `invert` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusIsometry<S> {
    pub invert: bool,
    pub x: TorusPoint<S>,
}

impl<S: Scalar> TorusIsometry<S> {
    pub fn identity(ctx: &S::Context) -> Self {
        TorusIsometry { invert: false, x: TorusPoint::identity(ctx) }
    }

    pub fn translation(x: TorusPoint<S>) -> Self {
        TorusIsometry { invert: false, x }
    }

    /// `y ↦ x·y⁻¹`.
    pub fn inversion_then_translation(x: TorusPoint<S>) -> Self {
        TorusIsometry { invert: true, x }
    }

    pub fn apply(&self, y: &TorusPoint<S>) -> TorusPoint<S> {
        if self.invert {
            y.difference_to(&self.x)
        } else {
            self.x.translate(y)
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        TorusIsometry { invert: self.invert != other.invert, x: self.apply(&other.x) }
    }

    pub fn inverse(&self) -> Self {
        if self.invert {
            self.clone()
        } else {
            TorusIsometry::translation(self.x.invert())
        }
    }
}

/// `g(g_Y, g_ℝ)` acting on `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductIsometry<S> {
    pub torus: TorusIsometry<S>,
    pub line: LineIsometry<S>,
}

impl<S: Scalar> ProductIsometry<S> {
    pub fn new(torus: TorusIsometry<S>, line: LineIsometry<S>) -> Self {
        ProductIsometry { torus, line }
    }

    pub fn identity(ctx: &S::Context) -> Self {
        ProductIsometry::new(TorusIsometry::identity(ctx), LineIsometry::identity(ctx))
    }

    pub fn apply(&self, p: &ZPoint<S>) -> ZPoint<S> {
        match p {
            ZPoint::Compact(y) => ZPoint::Compact(self.torus.apply(y)),
            ZPoint::Cylinder(y, t) => ZPoint::Cylinder(self.torus.apply(y), self.line.apply(t)),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        ProductIsometry::new(self.torus.compose(&other.torus), self.line.compose(&other.line))
    }

    pub fn inverse(&self) -> Self {
        ProductIsometry::new(self.torus.inverse(), self.line.inverse())
    }

    /// Whether the map sends `H` into `H`, checked at the given parameters.
    pub fn preserves_graph(&self, subgroup: &OneParamSubgroup<S>, ts: &[S]) -> bool {
        ts.iter().all(|t| self.torus.apply(&subgroup.point(t)) == subgroup.point(&self.line.apply(t)))
    }
}

/// An isometry of `X`: a product isometry mapping `H` onto itself.
#[derive(Debug, Clone, PartialEq)]
pub struct XIsometry<S> {
    product: ProductIsometry<S>,
}

impl<S: Scalar> XIsometry<S> {
    pub fn line(&self) -> &LineIsometry<S> {
        &self.product.line
    }

    pub fn torus(&self) -> &TorusIsometry<S> {
        &self.product.torus
    }

    pub fn as_product(&self) -> &ProductIsometry<S> {
        &self.product
    }

    pub fn apply(&self, p: &XPoint<S>) -> XPoint<S> {
        match p {
            XPoint::Compact(y) => XPoint::Compact(self.product.torus.apply(y)),
            XPoint::Graph(t) => XPoint::Graph(self.product.line.apply(t)),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        XIsometry { product: self.product.compose(&other.product) }
    }

    pub fn inverse(&self) -> Self {
        XIsometry { product: self.product.inverse() }
    }

    /// The translation carrying `Graph(t)` to `Graph(s)`; `H` is one orbit.
    pub fn carrying(t: &S, s: &S, subgroup: &OneParamSubgroup<S>) -> Self {
        construct_x_isometry(&LineIsometry::translation(s.clone() - t), subgroup)
    }
}

/// The unique isometry of `X` over `g_ℝ`: `L_{g(a)}` for `t ↦ t + a` and
/// `L_{g(c)} ∘ inv` for `t ↦ c − t`.
pub fn construct_x_isometry<S: Scalar>(line: &LineIsometry<S>, subgroup: &OneParamSubgroup<S>) -> XIsometry<S> {
    let x = subgroup.point(&line.shift);
    let torus = TorusIsometry { invert: line.reflect, x };
    XIsometry { product: ProductIsometry::new(torus, line.clone()) }
}

/// Solves `g_Y(g(t)) = g(g_ℝ(t))` for `g_Y` within the translation and
/// inversion families, using two parameters. Returns `None` when neither
/// family is consistent at both parameters.
pub fn solve_torus_part<S: Scalar>(
    line: &LineIsometry<S>,
    subgroup: &OneParamSubgroup<S>,
    t1: &S,
    t2: &S,
) -> Option<TorusIsometry<S>> {
    let image = |t: &S| subgroup.point(&line.apply(t));
    let mut found = Vec::new();
    for invert in [false, true] {
        // x = g(gR(t)) · g(t)^{∓1}
        let x_at = |t: &S| {
            let g = subgroup.point(t);
            if invert {
                image(t).translate(&g)
            } else {
                g.difference_to(&image(t))
            }
        };
        let x1 = x_at(t1);
        if x1 == x_at(t2) {
            found.push(TorusIsometry { invert, x: x1 });
        }
    }
    (found.len() == 1).then(|| found.remove(0))
}

/// A failed distance-preservation sample.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryFailure<P> {
    pub index: u64,
    pub p: P,
    pub q: P,
    pub d_before: f64,
    pub d_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<P> {
    pub kind: &'static str,
    pub mode: ScalarMode,
    pub samples: u64,
    /// Largest `|d(f(p), f(q)) − d(p, q)|`; identically zero in exact mode
    /// unless a failure is reported.
    pub max_error: f64,
    pub failures: Vec<IsometryFailure<P>>,
}

impl<P> VerificationReport<P> {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `d(f(p), f(q)) = d(p, q)` on `n` sampled pairs.
pub fn verify_isometry<M, F, Src>(space: &M, f: F, source: &Src, n: u64, mode: ScalarMode) -> Result<VerificationReport<M::Point>>
where
    M: MetricSpace,
    F: Fn(&M::Point) -> M::Point,
    Src: PointSource<[M::Point; 2]> + ?Sized,
{
    mode.check_supported::<M::Scalar>()?;
    let mut report = VerificationReport { kind: space.name(), mode, samples: 0, max_error: 0.0, failures: Vec::new() };
    for index in 0..n {
        let [p, q] = source.sample(index);
        let before = space.distance(&p, &q);
        let after = space.distance(&f(&p), &f(&q));
        let (ok, err) = match mode {
            ScalarMode::Exact => {
                let ok = before.exact_eq(&after);
                (ok, if ok { 0.0 } else { (before.value() - after.value()).abs() })
            }
            ScalarMode::Float { epsilon } => {
                let err = (before.value() - after.value()).abs();
                (err <= epsilon, err)
            }
        };
        report.samples += 1;
        report.max_error = report.max_error.max(err);
        if !ok {
            report.failures.push(IsometryFailure { index, p, q, d_before: before.value(), d_after: after.value() });
        }
    }
    Ok(report)
}

fn same_torus_point<S: Scalar>(a: &TorusPoint<S>, b: &TorusPoint<S>, mode: ScalarMode) -> bool {
    match mode {
        ScalarMode::Exact => a == b,
        ScalarMode::Float { epsilon } => {
            torus_distance(a, b, &crate::flat_torus::GramMatrix::identity()).value() <= epsilon
        }
    }
}

fn same_scalar<S: Scalar>(a: &S, b: &S, mode: ScalarMode) -> bool {
    match mode {
        ScalarMode::Exact => a == b,
        ScalarMode::Float { epsilon } => (a.to_f64() - b.to_f64()).abs() <= epsilon,
    }
}

/// Recovers `(g_Y, g_ℝ)` from a black-box map of `Z`.
///
/// `g_Y` is read off `f(identity)` and fit to the translation or inversion
/// family on the sampled torus points; `g_ℝ` is read off the line over the
/// identity and cross-checked on every sampled line. The returned pair agrees
/// with `f` on all samples.
pub fn decompose_z_isometry<S, F, Src>(f: F, source: &Src, n: u64, mode: ScalarMode) -> Result<ProductIsometry<S>>
where
    S: Scalar,
    F: Fn(&ZPoint<S>) -> ZPoint<S>,
    Src: PointSource<(TorusPoint<S>, S)> + ?Sized,
{
    mode.check_supported::<S>()?;
    let (probe, _) = source.sample(0);
    let ctx = probe.context();
    let origin = TorusPoint::identity(&ctx);
    let compact_image = |y: &TorusPoint<S>, sample: u64| match f(&ZPoint::Compact(y.clone())) {
        ZPoint::Compact(img) => Ok(img),
        ZPoint::Cylinder(..) => Err(DecomposeError::ComponentSwap { sample }),
    };
    let x0 = compact_image(&origin, 0)?;

    let translation = TorusIsometry::translation(x0.clone());
    let inversion = TorusIsometry::inversion_then_translation(x0);
    let (mut fits_t, mut fits_i) = (true, true);
    let mut samples = Vec::with_capacity(n as usize);
    for i in 0..n {
        let (y, t) = source.sample(i);
        let img = compact_image(&y, i)?;
        fits_t &= same_torus_point(&translation.apply(&y), &img, mode);
        fits_i &= same_torus_point(&inversion.apply(&y), &img, mode);
        if !fits_t && !fits_i {
            return Err(DecomposeError::UnrecognizedTorusIsometry { sample: i }.into());
        }
        samples.push((y, t));
    }
    let torus = if fits_t { translation } else { inversion };

    let cylinder_image = |y: &TorusPoint<S>, t: &S, sample: u64| match f(&ZPoint::Cylinder(y.clone(), t.clone())) {
        ZPoint::Cylinder(img, s) => Ok((img, s)),
        ZPoint::Compact(_) => Err(DecomposeError::ComponentSwap { sample }),
    };
    let zero = S::zero_in(&ctx);
    let one = S::from_i64(&ctx, 1);
    let (_, a0) = cylinder_image(&origin, &zero, 0)?;
    let (_, a1) = cylinder_image(&origin, &one, 0)?;
    let slope = a1 - &a0;
    let line = if same_scalar(&slope, &one, mode) {
        LineIsometry::translation(a0)
    } else if same_scalar(&slope, &-one, mode) {
        LineIsometry::reflection(a0)
    } else {
        return Err(DecomposeError::LineMapNotIsometric { slope: alloc::format!("{slope:?}") }.into());
    };

    let pair = ProductIsometry::new(torus, line);
    for (i, (y, t)) in samples.iter().enumerate() {
        let i = i as u64;
        let (img, s) = cylinder_image(y, t, i)?;
        let expected = pair.apply(&ZPoint::Cylinder(y.clone(), t.clone()));
        let ZPoint::Cylinder(ey, es) = expected else { unreachable!("cylinder maps to cylinder") };
        if !same_torus_point(&ey, &img, mode) || !same_scalar(&es, &s, mode) {
            return Err(DecomposeError::NotProductForm { sample: i }.into());
        }
    }
    Ok(pair)
}

/// Family of an element of the isometry group of `Y₁ ∪ H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum X1Kind {
    /// `t ↦ t + a` with `g(a) ∈ Y₁`.
    Translation,
    /// `t ↦ 2a − t` with `g(2a) ∈ Y₁`.
    Reflection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct X1Element<S> {
    pub k: i64,
    pub kind: X1Kind,
    pub isometry: XIsometry<S>,
    /// `g(a)` (translations) or `g(2a)` (reflections), on `Y₁`.
    pub anchor: TorusPoint<S>,
    /// Coordinate of the anchor along `Y₁`: the rotation angle for
    /// translations.
    pub rotation: S,
}

/// The parameters `a` with `g(a) ∈ Y₁` are `k·p` for integers `k`, where
/// `p = 1/α` on `{(s, 0)}` and `p = 1` on `{(0, s)}`.
pub fn subtorus_period<S: Scalar>(subgroup: &OneParamSubgroup<S>, sub: &Subtorus) -> Result<S> {
    let alpha = subgroup.slope()?;
    let one = S::from_i64(&alpha.context(), 1);
    Ok(match sub.axis {
        Axis::First => one / alpha,
        Axis::Second => one,
    })
}

/// Translations `a = k·p` and reflections `2a = k·p` for `k` in range, each
/// restricted to `Y₁ ∪ H`; membership of every anchor in `Y₁` is verified
/// exactly.
pub fn x1_group_elements<S: Scalar>(
    subgroup: &OneParamSubgroup<S>,
    sub: &Subtorus,
    ks: RangeInclusive<i64>,
) -> Result<Vec<X1Element<S>>> {
    if !S::EXACT {
        return Err(Error::ExactnessRequired("subtorus group elements"));
    }
    let period = subtorus_period(subgroup, sub)?;
    let ctx = period.context();
    let mut out = Vec::new();
    for k in ks {
        let shift = period.clone() * &S::from_i64(&ctx, k);
        for kind in [X1Kind::Translation, X1Kind::Reflection] {
            let line = match kind {
                X1Kind::Translation => LineIsometry::translation(shift.clone()),
                X1Kind::Reflection => LineIsometry::reflection(shift.clone()),
            };
            let isometry = construct_x_isometry(&line, subgroup);
            let anchor = isometry.torus().x.clone();
            if !sub.contains(&anchor)? {
                return Err(Error::NotOnSubtorus);
            }
            let rotation = sub.coordinate(&anchor).clone();
            out.push(X1Element { k, kind, isometry, anchor, rotation });
        }
    }
    Ok(out)
}

/// Whether a torus isometry maps `Y₁` into itself (exact).
pub fn preserves_subtorus<S: Scalar>(iso: &TorusIsometry<S>, sub: &Subtorus) -> Result<bool> {
    sub.contains(&iso.x)
}
