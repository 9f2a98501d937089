//! The glued spaces `Z = Y ∪ (Y × ℝ)` and `X = Y ∪ H`.
//!
//! With torus distance `d₁` and constants `R, M > 0`:
//!
//! ```text
//! d(y₁, y₂)           = d₁(y₁, y₂)
//! d((y₁,t₁), (y₂,t₂)) = d₁(y₁, y₂) + min(|t₁ − t₂|, M)
//! d(y₁, (y₂,t₂))      = d₁(y₁, y₂) + R
//! ```
//!
//! This is a metric exactly when `2R ≥ M`. `X` carries the metric induced
//! from `Z` along the embedding `Graph(t) ↦ (g(t), t)`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::flat_torus::{
    systole, tangent_norm, torus_distance, GramMatrix, OneParamSubgroup, TorusPoint,
};
use crate::numerics::{triangle_sign, Length, Scalar, ScalarMode, Sign};
use crate::sampling::PointSource;

/// The offset `R` and the cap `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingParams<S> {
    r: S,
    m: S,
    strict: bool,
}

impl<S: Scalar> GluingParams<S> {
    /// In strict mode the constructor also enforces `2R ≥ M`.
    pub fn new(r: S, m: S, strict: bool) -> Result<Self> {
        if r.sign() != Sign::Positive {
            return Err(Error::InvalidParams("R must be positive"));
        }
        if m.sign() != Sign::Positive {
            return Err(Error::InvalidParams("M must be positive"));
        }
        let params = GluingParams { r, m, strict };
        if strict && !params.is_metric() {
            return Err(Error::InvalidParams("2R >= M is required in strict mode"));
        }
        Ok(params)
    }

    pub fn strict(r: S, m: S) -> Result<Self> {
        GluingParams::new(r, m, true)
    }

    pub fn r(&self) -> &S {
        &self.r
    }

    pub fn m(&self) -> &S {
        &self.m
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// `2R ≥ M`.
    pub fn is_metric(&self) -> bool {
        let two_r = self.r.clone() + &self.r;
        two_r.cmp_value(&self.m) != Ordering::Less
    }
}

/// A point of `Z`.
#[derive(Debug, Clone, PartialEq)]
pub enum ZPoint<S> {
    Compact(TorusPoint<S>),
    Cylinder(TorusPoint<S>, S),
}

impl<S> ZPoint<S> {
    pub fn torus(&self) -> &TorusPoint<S> {
        match self {
            ZPoint::Compact(y) | ZPoint::Cylinder(y, _) => y,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, ZPoint::Compact(_))
    }
}

/// A point of `X`; `Graph(t)` stands for `(g(t), t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum XPoint<S> {
    Compact(TorusPoint<S>),
    Graph(S),
}

/// Three-case distance on `Z`.
pub fn z_distance<S: Scalar>(a: &ZPoint<S>, b: &ZPoint<S>, params: &GluingParams<S>, gram: &GramMatrix) -> Length<S> {
    let base = torus_distance(a.torus(), b.torus(), gram);
    match (a, b) {
        (ZPoint::Compact(_), ZPoint::Compact(_)) => base,
        (ZPoint::Cylinder(_, t1), ZPoint::Cylinder(_, t2)) => {
            let dt = (t1.clone() - t2).abs();
            base.plus_offset(&dt.min_value(&params.m))
        }
        _ => base.plus_offset(&params.r),
    }
}

/// A metric on some point type, with distances of the form `√A + B`.
pub trait MetricSpace {
    type Scalar: Scalar;
    type Point: Clone + core::fmt::Debug + PartialEq;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Length<Self::Scalar>;

    fn name(&self) -> &'static str;
}

/// `Z` (and, through [`GluedSpace::x`], `X`) for fixed `R, M, G` and `g(t)`.
#[derive(Debug, Clone)]
pub struct GluedSpace<S> {
    pub params: GluingParams<S>,
    pub gram: GramMatrix,
    pub subgroup: OneParamSubgroup<S>,
}

impl<S: Scalar> GluedSpace<S> {
    pub fn new(params: GluingParams<S>, gram: GramMatrix, subgroup: OneParamSubgroup<S>) -> Self {
        GluedSpace { params, gram, subgroup }
    }

    pub fn context(&self) -> S::Context {
        self.params.r.context()
    }

    pub fn z_distance(&self, a: &ZPoint<S>, b: &ZPoint<S>) -> Length<S> {
        z_distance(a, b, &self.params, &self.gram)
    }

    pub fn embed(&self, p: &XPoint<S>) -> ZPoint<S> {
        match p {
            XPoint::Compact(y) => ZPoint::Compact(y.clone()),
            XPoint::Graph(t) => ZPoint::Cylinder(self.subgroup.point(t), t.clone()),
        }
    }

    pub fn x_distance(&self, a: &XPoint<S>, b: &XPoint<S>) -> Length<S> {
        self.z_distance(&self.embed(a), &self.embed(b))
    }

    pub fn z(&self) -> ZView<'_, S> {
        ZView(self)
    }

    pub fn x(&self) -> XView<'_, S> {
        XView(self)
    }

    /// `min(M, systole/2) / max(1, ‖v‖)`.
    pub fn validity_radius(&self) -> f64 {
        let norm = tangent_norm(self.subgroup.direction(), &self.gram).value();
        let sys = systole::<S>(&self.gram, &self.context()).value();
        (self.params.m.to_f64()).min(sys / 2.0) / norm.max(1.0)
    }

    /// Exact test of `|Δ|·max(1, ‖v‖) ≤ min(M, systole/2)`, by squaring
    /// nonnegative quantities.
    pub fn within_validity_radius(&self, delta: &S) -> bool {
        let ctx = self.context();
        let one = S::from_i64(&ctx, 1);
        let four = S::from_i64(&ctx, 4);
        let norm_sq = tangent_norm(self.subgroup.direction(), &self.gram).radicand;
        let scale_sq = norm_sq.max_value(&one);
        let lhs = delta.clone() * delta * &scale_sq;
        let m_sq = self.params.m.clone() * &self.params.m;
        let sys_sq = S::from_rational(&ctx, self.gram.systole_squared());
        lhs.cmp_value(&m_sq) != Ordering::Greater
            && (four * &lhs).cmp_value(&sys_sq) != Ordering::Greater
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZView<'a, S>(pub &'a GluedSpace<S>);

#[derive(Debug, Clone, Copy)]
pub struct XView<'a, S>(pub &'a GluedSpace<S>);

impl<S: Scalar> MetricSpace for ZView<'_, S> {
    type Scalar = S;
    type Point = ZPoint<S>;

    fn distance(&self, a: &ZPoint<S>, b: &ZPoint<S>) -> Length<S> {
        self.0.z_distance(a, b)
    }

    fn name(&self) -> &'static str {
        "Z"
    }
}

impl<S: Scalar> MetricSpace for XView<'_, S> {
    type Scalar = S;
    type Point = XPoint<S>;

    fn distance(&self, a: &XPoint<S>, b: &XPoint<S>) -> Length<S> {
        self.0.x_distance(a, b)
    }

    fn name(&self) -> &'static str {
        "X"
    }
}

/// Which axiom a sampled triple violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Symmetry,
    Identity,
    Triangle,
}

/// A failed axiom. For the triangle inequality `lhs = d(x, z)`,
/// `rhs = d(x, y) + d(y, z)` and `slack = lhs − rhs > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<P> {
    pub index: u64,
    pub kind: ViolationKind,
    pub a: P,
    pub b: P,
    pub c: P,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Result of checking one sampled triple.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleOutcome<P> {
    pub violations: Vec<Violation<P>>,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport<P> {
    pub space: &'static str,
    pub mode: ScalarMode,
    pub samples: u64,
    pub violations: Vec<Violation<P>>,
    /// Largest floating-point deviation from the exact laws
    /// `d(x, y) = d(y, x)` and `d(x, x) = 0`.
    pub max_abs_error: f64,
}

impl<P> AxiomReport<P> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Assembles a report from per-sample outcomes given in index order.
    pub fn assemble(
        space: &'static str,
        mode: ScalarMode,
        outcomes: impl IntoIterator<Item = TripleOutcome<P>>,
    ) -> Self {
        let mut report = AxiomReport { space, mode, samples: 0, violations: Vec::new(), max_abs_error: 0.0 };
        for outcome in outcomes {
            report.samples += 1;
            report.max_abs_error = report.max_abs_error.max(outcome.max_abs_error);
            report.violations.extend(outcome.violations);
        }
        report
    }
}

/// Checks symmetry, identity of indiscernibles and all three triangle
/// inequalities on one triple.
///
/// Exact mode decides every axiom exactly (the identity axiom in both
/// directions); float mode compares `f64` values with the mode's epsilon and
/// checks only `d(x, x) = 0` for identity.
pub fn check_triple<M: MetricSpace>(
    space: &M,
    index: u64,
    triple: &[M::Point; 3],
    mode: ScalarMode,
) -> TripleOutcome<M::Point> {
    let [a, b, c] = triple;
    let pts = [a, b, c];
    let mut d = [[None, None, None], [None, None, None], [None, None, None]];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = Some(space.distance(pts[i], pts[j]));
        }
    }
    let d = |i: usize, j: usize| d[i][j].as_ref().expect("filled");
    let mut violations = Vec::new();
    let mut max_abs_error: f64 = 0.0;
    let mut push = |kind, lhs: f64, rhs: f64, slack: f64| {
        violations.push(Violation { index, kind, a: a.clone(), b: b.clone(), c: c.clone(), lhs, rhs, slack });
    };

    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let (dij, dji) = (d(i, j), d(j, i));
        let err = (dij.value() - dji.value()).abs();
        max_abs_error = max_abs_error.max(err);
        let bad = match mode {
            ScalarMode::Exact => !dij.exact_eq(dji),
            ScalarMode::Float { epsilon } => !(err <= epsilon),
        };
        if bad {
            push(ViolationKind::Symmetry, dij.value(), dji.value(), err);
        }
    }

    for i in 0..3 {
        let v = d(i, i).value();
        max_abs_error = max_abs_error.max(v.abs());
        let bad = match mode {
            ScalarMode::Exact => !d(i, i).is_zero(),
            ScalarMode::Float { epsilon } => !(v.abs() <= epsilon),
        };
        if bad {
            push(ViolationKind::Identity, v, 0.0, v.abs());
        }
    }
    if mode.is_exact() {
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            if (pts[i] == pts[j]) != d(i, j).is_zero() {
                push(ViolationKind::Identity, d(i, j).value(), 0.0, d(i, j).value());
            }
        }
    }

    // d(x, z) ≤ d(x, y) + d(y, z) for each choice of the middle point.
    for (x, y, z) in [(0, 1, 2), (0, 2, 1), (1, 0, 2)] {
        let lhs = d(x, z).value();
        let rhs = d(x, y).value() + d(y, z).value();
        let bad = match mode {
            ScalarMode::Exact => triangle_sign(d(x, y), d(y, z), d(x, z)) == Sign::Negative,
            ScalarMode::Float { epsilon } => !(lhs <= rhs + epsilon),
        };
        if bad {
            push(ViolationKind::Triangle, lhs, rhs, lhs - rhs);
        }
    }
    TripleOutcome { violations, max_abs_error }
}

/// Samples `n` triples from `source` and checks the metric axioms on each.
pub fn check_metric_axioms<M, Src>(space: &M, source: &Src, n: u64, mode: ScalarMode) -> Result<AxiomReport<M::Point>>
where
    M: MetricSpace,
    Src: PointSource<[M::Point; 3]> + ?Sized,
{
    mode.check_supported::<M::Scalar>()?;
    let outcomes = (0..n).map(|i| check_triple(space, i, &source.sample(i), mode));
    Ok(AxiomReport::assemble(space.name(), mode, outcomes))
}

/// A triple witnessing the failure of the triangle inequality when `2R < M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample<S> {
    pub a: ZPoint<S>,
    pub b: ZPoint<S>,
    pub c: ZPoint<S>,
    /// `d(a, b) − d(a, c) − d(c, b) = M − 2R`, exact.
    pub slack: S,
}

/// `a = (y, 0)`, `b = (y, M)`, `c = y`: `d(a, b) = M > 2R = d(a, c) + d(c, b)`.
pub fn triangle_counterexample<S: Scalar>(params: &GluingParams<S>) -> Result<Counterexample<S>> {
    if params.is_metric() {
        return Err(Error::InvalidParams("2R >= M: the glued distance is a metric"));
    }
    let ctx = params.r.context();
    let y = TorusPoint::identity(&ctx);
    let slack = params.m.clone() - &params.r - &params.r;
    Ok(Counterexample {
        a: ZPoint::Cylinder(y.clone(), S::zero_in(&ctx)),
        b: ZPoint::Cylinder(y.clone(), params.m.clone()),
        c: ZPoint::Compact(y),
        slack,
    })
}

/// Closest point of `Y` to a cylinder point.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestCompact<S> {
    pub point: TorusPoint<S>,
    pub distance: Length<S>,
    /// Smallest excess `d(p, y') − d(p, y)` over the verification grid,
    /// `y' ≠ y`.
    pub gap: Length<S>,
}

/// `(y, r) ↦ y`, verified against an `n × n` grid of alternatives.
pub fn nearest_in_compact<S: Scalar>(
    p: &ZPoint<S>,
    params: &GluingParams<S>,
    gram: &GramMatrix,
    grid: usize,
) -> Result<NearestCompact<S>> {
    let y = match p {
        ZPoint::Cylinder(y, _) => y.clone(),
        ZPoint::Compact(_) => return Err(Error::NotACylinderPoint),
    };
    let target = ZPoint::Compact(y.clone());
    let distance = z_distance(p, &target, params, gram);
    let ctx = y.context();
    let candidates = grid_points(&ctx, grid).filter(|c| *c != y).map(ZPoint::Compact);
    let best = min_screened(candidates, |c| approx_distance(p, c, params, gram), |c| z_distance(p, c, params, gram));
    let gap = match best {
        Some(b) => Length::new(b.radicand, b.offset - &distance.offset),
        None => Length::root(S::zero_in(&ctx)),
    };
    Ok(NearestCompact { point: y, distance, gap })
}

/// Exact minimum of `exact` over `items`. Candidates are screened with the
/// `f64` distance first, so only near-ties are evaluated exactly.
fn min_screened<S: Scalar, T>(
    items: impl Iterator<Item = T>,
    approx: impl Fn(&T) -> f64,
    exact: impl Fn(&T) -> Length<S>,
) -> Option<Length<S>> {
    let all: Vec<(f64, T)> = items.map(|t| (approx(&t), t)).collect();
    let lo = all.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    let slack = 1e-9 * (1.0 + lo.abs());
    all.into_iter()
        .filter(|e| e.0 <= lo + slack)
        .map(|e| exact(&e.1))
        .reduce(|a, b| if b.compare(&a) == Ordering::Less { b } else { a })
}

fn to_f64_point<S: Scalar>(p: &ZPoint<S>) -> ZPoint<f64> {
    let y = |y: &TorusPoint<S>| TorusPoint::new(y.u1().to_f64(), y.u2().to_f64());
    match p {
        ZPoint::Compact(a) => ZPoint::Compact(y(a)),
        ZPoint::Cylinder(a, t) => ZPoint::Cylinder(y(a), t.to_f64()),
    }
}

fn approx_distance<S: Scalar>(a: &ZPoint<S>, b: &ZPoint<S>, params: &GluingParams<S>, gram: &GramMatrix) -> f64 {
    let fp = GluingParams { r: params.r.to_f64(), m: params.m.to_f64(), strict: false };
    z_distance(&to_f64_point(a), &to_f64_point(b), &fp, gram).value()
}

/// The `n × n` grid `{(i/n, j/n)}`.
pub fn grid_points<S: Scalar>(ctx: &S::Context, n: usize) -> impl Iterator<Item = TorusPoint<S>> + '_ {
    let n = n as i64;
    (0..n).flat_map(move |i| {
        (0..n).map(move |j| {
            let q = |k: i64| S::from_rational(ctx, &num_rational::BigRational::new(k.into(), n.into()));
            TorusPoint::new(q(i), q(j))
        })
    })
}

/// The line `{y} × ℝ`: the points of the cylinder closest to `y ∈ Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSet<S> {
    pub base: TorusPoint<S>,
}

/// Outcome of [`LineSet::check`].
#[derive(Debug, Clone, PartialEq)]
pub struct LineSetCheck<S> {
    /// `d(y, (y, t)) = R` for every sampled `t`.
    pub on_line_at_r: bool,
    /// Smallest `d(y, (y', t)) − R` over sampled `y' ≠ y`, or `None` if no
    /// alternatives were given.
    pub off_line_excess: Option<Length<S>>,
}

impl<S> LineSetCheck<S> {
    pub fn holds(&self) -> bool
    where
        S: Scalar,
    {
        self.on_line_at_r && self.off_line_excess.as_ref().is_none_or(|e| e.compare(&Length::root(e.radicand.zero_like())) == Ordering::Greater)
    }
}

impl<S: Scalar> LineSet<S> {
    pub fn contains(&self, p: &ZPoint<S>) -> bool {
        matches!(p, ZPoint::Cylinder(y, _) if *y == self.base)
    }

    pub fn check(&self, params: &GluingParams<S>, gram: &GramMatrix, ts: &[S], others: &[TorusPoint<S>]) -> LineSetCheck<S> {
        let y = ZPoint::Compact(self.base.clone());
        let r = Length::root(params.r.zero_like()).plus_offset(&params.r);
        let on_line_at_r = ts.iter().all(|t| {
            z_distance(&y, &ZPoint::Cylinder(self.base.clone(), t.clone()), params, gram).exact_eq(&r)
        });
        let excess = others
            .iter()
            .filter(|o| **o != self.base)
            .flat_map(|o| ts.iter().map(move |t| ZPoint::Cylinder(o.clone(), t.clone())));
        let best = min_screened(excess, |p| approx_distance(&y, p, params, gram), |p| z_distance(&y, p, params, gram));
        let off_line_excess = best.map(|d| Length::new(d.radicand, d.offset - &params.r));
        LineSetCheck { on_line_at_r, off_line_excess }
    }
}

pub fn nearest_line_set<S: Scalar>(y: &TorusPoint<S>) -> LineSet<S> {
    LineSet { base: y.clone() }
}

/// Closest point of the line `{y'} × ℝ` to a cylinder point `(y, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestOnLine<S> {
    pub point: ZPoint<S>,
    pub distance: Length<S>,
    /// `min(|Δt|, M)` vanishes only at `Δt = 0` because `M > 0`.
    pub unique: bool,
}

pub fn nearest_on_line<S: Scalar>(
    p: &ZPoint<S>,
    line: &TorusPoint<S>,
    params: &GluingParams<S>,
    gram: &GramMatrix,
) -> Result<NearestOnLine<S>> {
    let r = match p {
        ZPoint::Cylinder(_, r) => r.clone(),
        ZPoint::Compact(_) => return Err(Error::NotACylinderPoint),
    };
    let point = ZPoint::Cylinder(line.clone(), r);
    let distance = z_distance(p, &point, params, gram);
    Ok(NearestOnLine { point, distance, unique: params.m.sign() == Sign::Positive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ExactScalar, QuadraticField};

    fn f() -> QuadraticField {
        QuadraticField::default()
    }

    fn space(r: (i64, i64), m: (i64, i64), strict: bool) -> GluedSpace<ExactScalar> {
        let params = GluingParams::new(f().ratio(r.0, r.1), f().ratio(m.0, m.1), strict).unwrap();
        GluedSpace::new(params, GramMatrix::identity(), OneParamSubgroup::canonical(f().sqrt_d()).unwrap())
    }

    fn tp(a: (i64, i64), b: (i64, i64)) -> TorusPoint<ExactScalar> {
        TorusPoint::new(f().ratio(a.0, a.1), f().ratio(b.0, b.1))
    }

    #[test]
    fn params_validation() {
        let q = |n, d| f().ratio(n, d);
        assert!(GluingParams::strict(q(1, 1), q(2, 1)).is_ok());
        assert!(GluingParams::strict(q(2, 5), q(1, 1)).is_err());
        assert!(GluingParams::new(q(2, 5), q(1, 1), false).is_ok());
        assert!(GluingParams::new(q(-1, 1), q(1, 1), false).is_err());
        assert!(GluingParams::new(q(1, 1), q(0, 1), false).is_err());
    }

    #[test]
    fn z_distance_cases() {
        let s = space((1, 1), (2, 1), true);
        let y = tp((0, 1), (0, 1));
        let a = ZPoint::Cylinder(y.clone(), f().zero());
        assert!(s.z_distance(&a, &a).is_zero());
        let b = ZPoint::Cylinder(y.clone(), f().integer(10));
        assert_eq!(s.z_distance(&a, &b).value(), 2.0);
        let c = ZPoint::Compact(tp((1, 2), (0, 1)));
        let far = ZPoint::Cylinder(y, f().integer(7));
        let d = s.z_distance(&c, &far);
        assert_eq!(d.value(), 1.5);
        assert!(d.exact_eq(&Length::new(f().ratio(1, 4), f().one())));
    }

    #[test]
    fn x_distance_examples() {
        let s = space((1, 1), (2, 1), true);
        let g0 = XPoint::Graph(f().zero());
        assert!(s.x_distance(&g0, &g0).is_zero());
        let g1 = XPoint::Graph(f().ratio(1, 100));
        let d = s.x_distance(&g0, &g1);
        // (1 + √3)/100
        assert!(d.exact_eq(&Length::new(f().ratio(3, 10000), f().ratio(1, 100))));
        assert!((d.value() - 0.027_320_508_075_688_77).abs() < 1e-15);
        let t = f().integer(3);
        let d = s.x_distance(&XPoint::Compact(s.subgroup.point(&t)), &XPoint::Graph(t));
        assert!(d.exact_eq(&Length::new(f().zero(), f().one())));
    }

    #[test]
    fn counterexample_slack() {
        let p = GluingParams::new(f().ratio(2, 5), f().one(), false).unwrap();
        let ce = triangle_counterexample(&p).unwrap();
        assert_eq!(ce.slack, f().ratio(1, 5));
        let gram = GramMatrix::identity();
        let ab = z_distance(&ce.a, &ce.b, &p, &gram);
        let ac = z_distance(&ce.a, &ce.c, &p, &gram);
        let cb = z_distance(&ce.c, &ce.b, &p, &gram);
        assert_eq!(triangle_sign(&ac, &cb, &ab), Sign::Negative);
        let p = GluingParams::new(f().ratio(49, 100), f().one(), false).unwrap();
        assert_eq!(triangle_counterexample(&p).unwrap().slack, f().ratio(1, 50));
        let p = GluingParams::new(f().ratio(1, 2), f().one(), false).unwrap();
        assert!(triangle_counterexample(&p).is_err());
    }

    #[test]
    fn axiom_check_on_counterexample_triple() {
        let s = space((2, 5), (1, 1), false);
        let ce = triangle_counterexample(&s.params).unwrap();
        let triples = alloc::vec![[ce.a, ce.b, ce.c]];
        let report = check_metric_axioms(&s.z(), &triples, 1, ScalarMode::Exact).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::Triangle);
        assert!((report.violations[0].slack - 0.2).abs() < 1e-15);
        let empty = check_metric_axioms(&s.z(), &triples, 0, ScalarMode::Exact).unwrap();
        assert!(empty.passed() && empty.samples == 0);
    }

    #[test]
    fn exact_mode_refused_for_floats() {
        let params = GluingParams::strict(1.0, 2.0).unwrap();
        let s = GluedSpace::new(params, GramMatrix::identity(), OneParamSubgroup::canonical(core::f64::consts::SQRT_2).unwrap());
        let triples: Vec<[ZPoint<f64>; 3]> = Vec::new();
        assert!(check_metric_axioms(&s.z(), &triples, 0, ScalarMode::Exact).is_err());
    }

    #[test]
    fn nearest_points() {
        let s = space((1, 1), (2, 1), true);
        let y = tp((3, 10), (7, 10));
        let p = ZPoint::Cylinder(y.clone(), f().integer(5));
        let n = nearest_in_compact(&p, &s.params, &s.gram, 10).unwrap();
        assert_eq!(n.point, y);
        assert!(n.distance.exact_eq(&Length::new(f().zero(), f().one())));
        // nearest other grid point is at distance 1/10
        assert!(n.gap.exact_eq(&Length::root(f().ratio(1, 100))));
        assert!(nearest_in_compact(&ZPoint::Compact(y.clone()), &s.params, &s.gram, 10).is_err());

        let line = nearest_line_set(&y);
        let ts = [f().integer(-10), f().zero(), f().ratio(37, 10)];
        let check = line.check(&s.params, &s.gram, &ts, &[tp((1, 2), (1, 2)), y.clone()]);
        assert!(check.holds());

        let q = ZPoint::Cylinder(tp((1, 10), (2, 10)), f().integer(4));
        let on = nearest_on_line(&q, &tp((8, 10), (9, 10)), &s.params, &s.gram).unwrap();
        assert_eq!(on.point, ZPoint::Cylinder(tp((8, 10), (9, 10)), f().integer(4)));
        assert!(on.distance.exact_eq(&Length::root(f().ratio(18, 100))));
        assert!(on.unique);
    }

    #[test]
    fn validity_radius_canonical() {
        let s = space((1, 1), (2, 1), true);
        // min(2, 1/2) / √3
        assert!((s.validity_radius() - 0.5 / 3f64.sqrt()).abs() < 1e-15);
        assert!(s.within_validity_radius(&f().ratio(1, 100)));
        assert!(s.within_validity_radius(&f().ratio(28, 100)));
        assert!(!s.within_validity_radius(&f().ratio(29, 100)));
    }
}
