//! Orbits of the isometry group on the compact component.
//!
//! The group acts on `Y` by `y ↦ g(a)·y` and `y ↦ g(c)·y⁻¹`, so the orbit of
//! a point is the union of two cosets of the dense subgroup `g(ℝ)`. This
//! module produces two kinds of evidence that such orbits are dense but not
//! closed:
//!
//! * density: explicit parameters whose orbit points are `ε`-close to a
//!   target, found by continued-fraction stepping on a circle or by a
//!   bounded search along the subgroup on the 2-torus;
//! * non-membership: an exact proof that a target solves no orbit equation,
//!   by splitting the equation over the basis `{1, √d}`.
//!
//! All of it runs on [`ExactScalar`]; the local-isometry identity along `H` is
//! generic and also runs in float mode.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::flat_torus::{torus_distance, Axis, GramMatrix, OneParamSubgroup, Subtorus, TorusPoint};
use crate::glued_space::{GluedSpace, XPoint};
use crate::isometry::subtorus_period;
use crate::numerics::{ExactScalar, Length, Scalar, ScalarMode, Sign, IDENTITY_EPSILON};

/// Convergent `p/q` of a continued fraction, with `err = q·α − p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergent {
    pub index: usize,
    pub partial_quotient: BigInt,
    pub p: BigInt,
    pub q: BigInt,
    pub err: ExactScalar,
}

/// First `n` convergents of an irrational `α`, by exact expansion.
pub fn cf_convergents(alpha: &ExactScalar, n: usize) -> Result<Vec<Convergent>> {
    if alpha.as_rational().is_some() {
        return Err(Error::RationalInput);
    }
    if n == 0 {
        return Err(Error::NonPositive("convergent count"));
    }
    let field = alpha.field();
    let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    let mut x = alpha.clone();
    let mut out = Vec::with_capacity(n);
    for index in 0..n {
        let (a, frac) = x.floor_frac();
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        let err = alpha.scale(&BigRational::from_integer(q.clone())) - &field.rational(BigRational::from_integer(p.clone()));
        out.push(Convergent { index, partial_quotient: a, p: p.clone(), q: q.clone(), err });
        (p2, p1) = (p1, p);
        (q2, q1) = (q1, q);
        // frac is irrational, hence nonzero
        x = frac.checked_recip()?;
    }
    Ok(out)
}

/// How [`density_search`] looks for orbit points near a target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Continued-fraction stepping on the subtorus `Y₁` along `axis`, using
    /// the group parameters `a` with `g(a) ∈ Y₁`.
    CfCircle(Axis),
    /// Search along `t = δ₁ + m`, `m = 0, 1, −1, 2, …`, which matches the
    /// first coordinate exactly and scans the second.
    GridTorus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Continued-fraction terms available to `CfCircle`.
    pub max_convergents: usize,
    /// Candidate parameters available to `GridTorus`, per target.
    pub grid_steps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_convergents: 60, grid_steps: 10_000_000 }
    }
}

/// Best orbit point found for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityHit {
    pub target: TorusPoint<ExactScalar>,
    /// Parameter with `g(t)·y₀` close to the target.
    pub t: ExactScalar,
    pub squared_distance: ExactScalar,
    pub distance: f64,
    /// `distance < ε`, decided exactly.
    pub within: bool,
    /// Candidates examined.
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub epsilon: f64,
    pub strategy: SearchStrategy,
    pub budget: Budget,
    pub hits: Vec<DensityHit>,
    pub worst: f64,
    pub success: bool,
}

impl DensityReport {
    /// Recomputes every hit from its parameter and checks the claims.
    pub fn revalidate(&self, y0: &TorusPoint<ExactScalar>, subgroup: &OneParamSubgroup<ExactScalar>, gram: &GramMatrix) -> bool {
        let eps_sq = epsilon_squared(self.epsilon, y0.u1().field());
        self.hits.iter().all(|h| {
            let p = subgroup.point(&h.t).translate(y0);
            let d = torus_distance(&p, &h.target, gram).radicand;
            d == h.squared_distance && (d < eps_sq) == h.within
        }) && self.success == self.hits.iter().all(|h| h.within)
    }
}

fn epsilon_squared(epsilon: f64, field: crate::numerics::QuadraticField) -> ExactScalar {
    let e = BigRational::from_float(epsilon).unwrap_or_else(BigRational::zero);
    field.rational(&e * &e)
}

/// For each target, a parameter `t` with `d₁(g(t)·y₀, target) < ε`, or the
/// best one found within budget.
pub fn density_search(
    y0: &TorusPoint<ExactScalar>,
    targets: &[TorusPoint<ExactScalar>],
    epsilon: f64,
    subgroup: &OneParamSubgroup<ExactScalar>,
    gram: &GramMatrix,
    strategy: SearchStrategy,
    budget: Budget,
) -> Result<DensityReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::NonPositive("epsilon"));
    }
    let field = y0.u1().field();
    let eps_sq = epsilon_squared(epsilon, field);
    let mut hits = Vec::with_capacity(targets.len());
    match strategy {
        SearchStrategy::CfCircle(axis) => {
            let sub = Subtorus::new(axis);
            if !sub.contains(y0)? {
                return Err(Error::NotOnSubtorus);
            }
            let period = subtorus_period(subgroup, &sub)?;
            // rotation of Y₁ induced by the generator g(period)
            let theta = sub.coordinate(&subgroup.point(&period)).clone();
            let convergents = cf_convergents(&theta, budget.max_convergents.max(1))?;
            let axis_weight = field.rational(match axis {
                Axis::First => gram.entries()[0].clone(),
                Axis::Second => gram.entries()[2].clone(),
            });
            for target in targets {
                if !sub.contains(target)? {
                    return Err(Error::NotOnSubtorus);
                }
                hits.push(circle_hit(
                    y0, target, &sub, &period, &convergents, &axis_weight, &eps_sq, subgroup, gram,
                ));
            }
        }
        SearchStrategy::GridTorus => {
            let alpha = subgroup.slope()?.clone();
            for target in targets {
                hits.push(grid_hit(y0, target, &alpha, &eps_sq, epsilon, budget.grid_steps, subgroup, gram));
            }
        }
    }
    let worst = hits.iter().map(|h| h.distance).fold(0.0, f64::max);
    let success = hits.iter().all(|h| h.within);
    Ok(DensityReport { epsilon, strategy, budget, hits, worst, success })
}

fn hit_at(
    y0: &TorusPoint<ExactScalar>,
    target: &TorusPoint<ExactScalar>,
    t: ExactScalar,
    eps_sq: &ExactScalar,
    steps: u64,
    subgroup: &OneParamSubgroup<ExactScalar>,
    gram: &GramMatrix,
) -> DensityHit {
    let p = subgroup.point(&t).translate(y0);
    let d = torus_distance(&p, target, gram);
    let within = (d.radicand.clone() - eps_sq).sign() == Sign::Negative;
    DensityHit { target: target.clone(), t, distance: d.value(), squared_distance: d.radicand, within, steps }
}

#[allow(clippy::too_many_arguments)]
fn circle_hit(
    y0: &TorusPoint<ExactScalar>,
    target: &TorusPoint<ExactScalar>,
    sub: &Subtorus,
    period: &ExactScalar,
    convergents: &[Convergent],
    axis_weight: &ExactScalar,
    eps_sq: &ExactScalar,
    subgroup: &OneParamSubgroup<ExactScalar>,
    gram: &GramMatrix,
) -> DensityHit {
    let field = axis_weight.field();
    let delta = (sub.coordinate(target).clone() - sub.coordinate(y0)).frac();
    if delta.is_zero() {
        return hit_at(y0, target, field.zero(), eps_sq, 0, subgroup, gram);
    }
    let four = field.integer(4);
    let half = field.ratio(1, 2);
    let mut best: Option<DensityHit> = None;
    for (j, c) in convergents.iter().enumerate() {
        let s = &c.err;
        // residual of the nearest multiple of s is at most |s|/2
        let fine = (axis_weight.clone() * s * s - &(four.clone() * eps_sq)).sign() == Sign::Negative;
        if !fine && j + 1 < convergents.len() {
            continue;
        }
        let shifted = if s.sign() == Sign::Positive { delta.clone() } else { delta.clone() - &field.one() };
        let m = (shifted / s + &half).floor();
        let k = m * &c.q;
        let t = period.clone() * &field.rational(BigRational::from_integer(k));
        let hit = hit_at(y0, target, t, eps_sq, (j + 1) as u64, subgroup, gram);
        if hit.within {
            return hit;
        }
        best = Some(hit);
        if fine {
            break;
        }
    }
    best.expect("at least one convergent")
}

#[allow(clippy::too_many_arguments)]
fn grid_hit(
    y0: &TorusPoint<ExactScalar>,
    target: &TorusPoint<ExactScalar>,
    alpha: &ExactScalar,
    eps_sq: &ExactScalar,
    epsilon: f64,
    max_steps: u64,
    subgroup: &OneParamSubgroup<ExactScalar>,
    gram: &GramMatrix,
) -> DensityHit {
    let delta = y0.difference_to(target);
    let d1 = delta.u1().clone();
    // second-coordinate residual at m: frac(c + m·α), c = α·δ₁ − δ₂
    let c = (alpha.clone() * &d1 - delta.u2()).frac().to_f64();
    let a = alpha.to_f64();
    let g22 = num_traits::ToPrimitive::to_f64(gram.entries()[2]).unwrap_or(1.0);
    let threshold = epsilon * epsilon;
    let field = alpha.field();
    let t_of = |m: i64| d1.clone() + &field.integer(m);
    let mut best_m = 0i64;
    let mut best_e = f64::INFINITY;
    let mut best: Option<DensityHit> = None;
    for step in 0..max_steps.max(1) {
        let m = if step % 2 == 0 { (step / 2) as i64 } else { -(step.div_ceil(2) as i64) };
        let r = c + (m as f64) * a;
        let e = r - libm::round(r);
        if e.abs() < best_e {
            best_e = e.abs();
            best_m = m;
        }
        if g22 * e * e < threshold {
            let hit = hit_at(y0, target, t_of(m), eps_sq, step + 1, subgroup, gram);
            if hit.within {
                return hit;
            }
            if best.as_ref().is_none_or(|b| hit.distance < b.distance) {
                best = Some(hit);
            }
        }
    }
    let fallback = hit_at(y0, target, t_of(best_m), eps_sq, max_steps.max(1), subgroup, gram);
    match best {
        Some(b) if b.distance <= fallback.distance => DensityHit { steps: max_steps.max(1), ..b },
        _ => fallback,
    }
}

/// `∃ m ∈ ℤ : offset + m·step ∈ ℤ`, with `step` irrational.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitEquation {
    pub offset: ExactScalar,
    pub step: ExactScalar,
}

/// Why an [`OrbitEquation`] has no integer solution. Comparing `√d`
/// coefficients forces `m = −offset_b / step_b`; comparing rational parts then
/// forces `n = offset_a + m·step_a`.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstruction {
    /// The forced `m` is not an integer.
    ShiftNotIntegral { required: BigRational },
    /// `m` is an integer but the forced rational part `n` is not.
    ResidueNotIntegral { shift: BigInt, residue: BigRational },
}

enum Solution {
    Solved { shift: BigInt },
    Blocked(Obstruction),
}

impl OrbitEquation {
    fn solve(&self) -> Result<Solution> {
        let wb = self.step.surd_part();
        if wb.is_zero() {
            return Err(Error::RationalInput);
        }
        let m = -(self.offset.surd_part() / wb);
        if !m.is_integer() {
            return Ok(Solution::Blocked(Obstruction::ShiftNotIntegral { required: m }));
        }
        let n = self.offset.rational_part() + &m * self.step.rational_part();
        let shift = m.to_integer();
        if !n.is_integer() {
            return Ok(Solution::Blocked(Obstruction::ResidueNotIntegral { shift, residue: n }));
        }
        Ok(Solution::Solved { shift })
    }
}

/// Which coset of the subgroup an orbit equation describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitFamily {
    /// Orbit of the identity under `g(ℝ)`: `frac(t) = u₁`, `frac(α·t) = u₂`.
    Subgroup,
    /// `g(a)·y₀ = target`.
    Translations,
    /// `g(c)·y₀⁻¹ = target`.
    Reflections,
    /// `y₀ + k·θ ≡ target` on a circle `Y₁`.
    CircleRotations,
    /// `k·θ − y₀ ≡ target` on a circle `Y₁`.
    CircleReflections,
}

/// Exact proof that a target is not hit by one orbit family.
#[derive(Debug, Clone, PartialEq)]
pub struct NonMembershipCertificate {
    pub family: OrbitFamily,
    pub basepoint: TorusPoint<ExactScalar>,
    pub target: TorusPoint<ExactScalar>,
    pub equation: OrbitEquation,
    pub obstruction: Obstruction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    /// The target is `g(t)` (translated or reflected as the family says).
    Member { t: ExactScalar },
    NonMember(NonMembershipCertificate),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    pub fn certificate(&self) -> Option<&NonMembershipCertificate> {
        match self {
            Membership::NonMember(c) => Some(c),
            Membership::Member { .. } => None,
        }
    }
}

/// Equation and parameter map for a torus family: `t = u₁ + m` where `u`
/// is the point required to lie in `g(ℝ)`.
fn torus_equation(u: &TorusPoint<ExactScalar>, alpha: &ExactScalar) -> OrbitEquation {
    OrbitEquation { offset: alpha.clone() * u.u1() - u.u2(), step: alpha.clone() }
}

fn decide_torus(
    family: OrbitFamily,
    basepoint: &TorusPoint<ExactScalar>,
    target: &TorusPoint<ExactScalar>,
    subgroup: &OneParamSubgroup<ExactScalar>,
) -> Result<Membership> {
    let alpha = subgroup.slope()?;
    let u = required_subgroup_point(family, basepoint, target);
    let equation = torus_equation(&u, alpha);
    Ok(match equation.solve()? {
        Solution::Solved { shift } => {
            let t = u.u1().clone() + &alpha.field().rational(BigRational::from_integer(shift));
            debug_assert_eq!(subgroup.point(&t), u);
            Membership::Member { t }
        }
        Solution::Blocked(obstruction) => Membership::NonMember(NonMembershipCertificate {
            family,
            basepoint: basepoint.clone(),
            target: target.clone(),
            equation,
            obstruction,
        }),
    })
}

fn required_subgroup_point(
    family: OrbitFamily,
    basepoint: &TorusPoint<ExactScalar>,
    target: &TorusPoint<ExactScalar>,
) -> TorusPoint<ExactScalar> {
    match family {
        OrbitFamily::Translations => basepoint.difference_to(target),
        OrbitFamily::Reflections => target.translate(basepoint),
        _ => target.clone(),
    }
}

/// Decides whether `target ∈ g(ℝ)`: either the parameter `t` with
/// `g(t) = target`, or a replayable certificate that none exists.
pub fn non_membership_certificate(
    target: &TorusPoint<ExactScalar>,
    subgroup: &OneParamSubgroup<ExactScalar>,
) -> Result<Membership> {
    let origin = TorusPoint::identity(&target.u1().field());
    decide_torus(OrbitFamily::Subgroup, &origin, target, subgroup)
}

/// Membership of `target` in both cosets forming the group orbit of `y₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupOrbitCertificate {
    pub translations: Membership,
    pub reflections: Membership,
}

impl GroupOrbitCertificate {
    pub fn outside_orbit(&self) -> bool {
        !self.translations.is_member() && !self.reflections.is_member()
    }

    fn member_parameter(&self) -> Option<&ExactScalar> {
        [&self.translations, &self.reflections].into_iter().find_map(|m| match m {
            Membership::Member { t } => Some(t),
            Membership::NonMember(_) => None,
        })
    }
}

/// Group orbit of `y₀ ∈ Y` under all isometries of `X`.
pub fn group_orbit_membership(
    y0: &TorusPoint<ExactScalar>,
    target: &TorusPoint<ExactScalar>,
    subgroup: &OneParamSubgroup<ExactScalar>,
) -> Result<GroupOrbitCertificate> {
    Ok(GroupOrbitCertificate {
        translations: decide_torus(OrbitFamily::Translations, y0, target, subgroup)?,
        reflections: decide_torus(OrbitFamily::Reflections, y0, target, subgroup)?,
    })
}

/// Group orbit of `y₀ ∈ Y₁` under the isometries of `Y₁ ∪ H`: rotations by
/// `k·θ` and reflections `s ↦ k·θ − s`. Member parameters are line
/// parameters `k·p` of the corresponding isometries.
pub fn circle_orbit_membership(
    y0: &TorusPoint<ExactScalar>,
    target: &TorusPoint<ExactScalar>,
    subgroup: &OneParamSubgroup<ExactScalar>,
    sub: &Subtorus,
) -> Result<GroupOrbitCertificate> {
    if !sub.contains(y0)? || !sub.contains(target)? {
        return Err(Error::NotOnSubtorus);
    }
    let period = subtorus_period(subgroup, sub)?;
    let theta = sub.coordinate(&subgroup.point(&period)).clone();
    let s0 = sub.coordinate(y0).clone();
    let s = sub.coordinate(target).clone();
    let decide = |family: OrbitFamily, offset: ExactScalar| -> Result<Membership> {
        let equation = OrbitEquation { offset, step: theta.clone() };
        Ok(match equation.solve()? {
            Solution::Solved { shift } => {
                Membership::Member { t: period.clone() * &theta.field().rational(BigRational::from_integer(shift)) }
            }
            Solution::Blocked(obstruction) => Membership::NonMember(NonMembershipCertificate {
                family,
                basepoint: y0.clone(),
                target: target.clone(),
                equation,
                obstruction,
            }),
        })
    };
    Ok(GroupOrbitCertificate {
        translations: decide(OrbitFamily::CircleRotations, s0.clone() - &s)?,
        reflections: decide(OrbitFamily::CircleReflections, -(s0 + &s))?,
    })
}

impl NonMembershipCertificate {
    /// Rebuilds the equation from the target and the subgroup and re-derives
    /// the obstruction with exact arithmetic.
    pub fn replay(&self, subgroup: &OneParamSubgroup<ExactScalar>, circle: Option<&Subtorus>) -> Result<()> {
        let expected = match (self.family, circle) {
            (OrbitFamily::CircleRotations | OrbitFamily::CircleReflections, Some(sub)) => {
                let period = subtorus_period(subgroup, sub)?;
                let theta = sub.coordinate(&subgroup.point(&period)).clone();
                let s0 = sub.coordinate(&self.basepoint).clone();
                let s = sub.coordinate(&self.target).clone();
                let offset = if self.family == OrbitFamily::CircleRotations { s0 - &s } else { -(s0 + &s) };
                OrbitEquation { offset, step: theta }
            }
            (OrbitFamily::CircleRotations | OrbitFamily::CircleReflections, None) => {
                return Err(Error::CertificateInvalid("circle certificate needs its subtorus"));
            }
            (family, _) => {
                let u = required_subgroup_point(family, &self.basepoint, &self.target);
                torus_equation(&u, subgroup.slope()?)
            }
        };
        if expected != self.equation {
            return Err(Error::CertificateInvalid("equation does not match the target"));
        }
        match self.equation.solve()? {
            Solution::Blocked(o) if o == self.obstruction => Ok(()),
            Solution::Blocked(_) => Err(Error::CertificateInvalid("obstruction differs")),
            Solution::Solved { .. } => Err(Error::CertificateInvalid("equation is solvable")),
        }
    }
}

impl fmt::Display for NonMembershipCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + m*({}) in Z: ", self.equation.offset, self.equation.step)?;
        match &self.obstruction {
            Obstruction::ShiftNotIntegral { required } => {
                write!(f, "sqrt part forces m = {}, not an integer", crate::numerics::format_rational(required))
            }
            Obstruction::ResidueNotIntegral { shift, residue } => write!(
                f,
                "sqrt part forces m = {shift}, rational part is then {}, not an integer",
                crate::numerics::format_rational(residue)
            ),
        }
    }
}

/// A non-membership certificate paired with `ε`-approximations: the target
/// is in the closure of the orbit but not in the orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct NonClosureReport {
    pub basepoint: TorusPoint<ExactScalar>,
    pub target: TorusPoint<ExactScalar>,
    pub certificate: GroupOrbitCertificate,
    pub searches: Vec<DensityReport>,
}

impl NonClosureReport {
    pub fn passed(&self) -> bool {
        self.certificate.outside_orbit() && self.searches.iter().all(|s| s.success)
    }
}

pub fn non_closure_report(
    y0: &TorusPoint<ExactScalar>,
    target: &TorusPoint<ExactScalar>,
    epsilons: &[f64],
    subgroup: &OneParamSubgroup<ExactScalar>,
    gram: &GramMatrix,
    budget: Budget,
) -> Result<NonClosureReport> {
    let certificate = group_orbit_membership(y0, target, subgroup)?;
    if let Some(t) = certificate.member_parameter() {
        return Err(Error::on_orbit(t));
    }
    let searches = epsilons
        .iter()
        .map(|&eps| density_search(y0, core::slice::from_ref(target), eps, subgroup, gram, SearchStrategy::GridTorus, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(NonClosureReport { basepoint: y0.clone(), target: target.clone(), certificate, searches })
}

/// Comparison of `d((g(t),t), (g(s),s))` with `(1 + ‖v‖)·|t − s|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalIsometryCheck<S> {
    pub t: S,
    pub s: S,
    pub lhs: Length<S>,
    /// `|t − s| + √(‖v‖²·(t − s)²)`.
    pub rhs: Length<S>,
    pub radius: f64,
    pub holds: bool,
}

/// The identity along `H`, without the radius guard.
pub fn compare_local_identity<S: Scalar>(t: &S, s: &S, space: &GluedSpace<S>, mode: ScalarMode) -> Result<LocalIsometryCheck<S>> {
    mode.check_supported::<S>()?;
    let delta = s.clone() - t;
    let lhs = space.x_distance(&XPoint::Graph(t.clone()), &XPoint::Graph(s.clone()));
    let norm_sq = crate::flat_torus::tangent_norm(space.subgroup.direction(), &space.gram).radicand;
    let rhs = Length::new(norm_sq * &delta * &delta, delta.abs());
    let holds = match mode {
        ScalarMode::Exact => lhs.radicand == rhs.radicand && lhs.offset == rhs.offset,
        ScalarMode::Float { .. } => (lhs.value() - rhs.value()).abs() <= IDENTITY_EPSILON,
    };
    Ok(LocalIsometryCheck { t: t.clone(), s: s.clone(), lhs, rhs, radius: space.validity_radius(), holds })
}

/// Checks the identity for `|t − s|` within the validity radius; refuses
/// larger separations, reporting the radius.
pub fn local_isometry_check<S: Scalar>(t: &S, s: &S, space: &GluedSpace<S>, mode: ScalarMode) -> Result<LocalIsometryCheck<S>> {
    let delta = s.clone() - t;
    if !space.within_validity_radius(&delta.abs()) {
        return Err(Error::OutsideValidityRadius { radius: space.validity_radius() });
    }
    compare_local_identity(t, s, space, mode)
}
