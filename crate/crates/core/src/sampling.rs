//! Deterministic, index-addressed sampling.
//!
//! Sample `i` of a run with seed `s` is drawn from a generator seeded by a
//! hash of `(s, i)`, so results do not depend on evaluation order or thread
//! count.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flat_torus::TorusPoint;
use crate::glued_space::{XPoint, ZPoint};
use crate::numerics::{ExactScalar, QuadraticField, Scalar};

/// Indexed source of sample points (or pairs, triples).
pub trait PointSource<P> {
    fn sample(&self, index: u64) -> P;
}

impl<P: Clone> PointSource<P> for [P] {
    /// Cycles through the slice.
    fn sample(&self, index: u64) -> P {
        self[(index % self.len() as u64) as usize].clone()
    }
}

impl<P: Clone> PointSource<P> for Vec<P> {
    fn sample(&self, index: u64) -> P {
        self.as_slice().sample(index)
    }
}

/// Adapts a closure into a [`PointSource`].
pub struct FromFn<F>(pub F);

impl<P, F: Fn(u64) -> P> PointSource<P> for FromFn<F> {
    fn sample(&self, index: u64) -> P {
        (self.0)(index)
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

/// Scalars that can be drawn at random.
pub trait RandomScalar: Scalar {
    /// A value in `[0, 1)`.
    fn random_unit<R: Rng>(rng: &mut R, ctx: &Self::Context) -> Self;

    /// A value in `[lo, hi)`.
    fn random_between<R: Rng>(rng: &mut R, ctx: &Self::Context, lo: i64, hi: i64) -> Self {
        let n = rng.gen_range(lo..hi);
        Self::from_i64(ctx, n) + &Self::random_unit(rng, ctx)
    }
}

impl RandomScalar for f64 {
    fn random_unit<R: Rng>(rng: &mut R, _: &()) -> f64 {
        rng.gen::<f64>()
    }
}

impl RandomScalar for ExactScalar {
    /// `frac(p/q + (p'/q')·√d)` with small denominators; one draw in four is
    /// rational.
    fn random_unit<R: Rng>(rng: &mut R, ctx: &QuadraticField) -> ExactScalar {
        let q: i64 = rng.gen_range(1..=64);
        let p: i64 = rng.gen_range(0..q);
        let a = BigRational::new(BigInt::from(p), BigInt::from(q));
        let b = if rng.gen_range(0..4) == 0 {
            BigRational::from_integer(BigInt::from(0))
        } else {
            let q2: i64 = rng.gen_range(1..=16);
            let p2: i64 = rng.gen_range(-q2..=q2);
            BigRational::new(BigInt::from(p2), BigInt::from(q2))
        };
        ctx.element(a, b).frac()
    }
}

/// Seeded sampler of torus, `Z` and `X` points.
#[derive(Debug, Clone)]
pub struct Sampler<S: Scalar> {
    seed: u64,
    ctx: S::Context,
    t_span: i64,
}

impl<S: RandomScalar> Sampler<S> {
    pub fn new(seed: u64, ctx: S::Context) -> Self {
        Sampler { seed, ctx, t_span: 6 }
    }

    /// Line parameters are drawn from `[-span, span)`.
    pub fn with_t_span(mut self, span: i64) -> Self {
        self.t_span = span.max(1);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        sample_rng(self.seed, index)
    }

    pub fn torus_point<R: Rng>(&self, rng: &mut R) -> TorusPoint<S> {
        TorusPoint::new(S::random_unit(rng, &self.ctx), S::random_unit(rng, &self.ctx))
    }

    pub fn line_parameter<R: Rng>(&self, rng: &mut R) -> S {
        S::random_between(rng, &self.ctx, -self.t_span, self.t_span)
    }

    fn z_point_near<R: Rng>(&self, rng: &mut R, earlier: &[ZPoint<S>]) -> ZPoint<S> {
        let y = match earlier.last() {
            Some(p) if rng.gen_range(0..4) == 0 => p.torus().clone(),
            _ => self.torus_point(rng),
        };
        if rng.gen_range(0..3) == 0 {
            ZPoint::Compact(y)
        } else {
            ZPoint::Cylinder(y, self.line_parameter(rng))
        }
    }

    fn x_point<R: Rng>(&self, rng: &mut R) -> XPoint<S> {
        if rng.gen_range(0..3) == 0 {
            XPoint::Compact(self.torus_point(rng))
        } else {
            XPoint::Graph(self.line_parameter(rng))
        }
    }

    fn z_points(&self, index: u64, n: usize) -> Vec<ZPoint<S>> {
        let mut rng = self.rng(index);
        let mut out: Vec<ZPoint<S>> = Vec::with_capacity(n);
        for _ in 0..n {
            // Occasional repeated points exercise the identity axiom.
            let p = match out.first() {
                Some(first) if rng.gen_range(0..8) == 0 => first.clone(),
                _ => self.z_point_near(&mut rng, &out),
            };
            out.push(p);
        }
        out
    }

    fn x_points(&self, index: u64, n: usize) -> Vec<XPoint<S>> {
        let mut rng = self.rng(index);
        (0..n).map(|_| self.x_point(&mut rng)).collect()
    }
}

impl<S: RandomScalar> PointSource<TorusPoint<S>> for Sampler<S> {
    fn sample(&self, index: u64) -> TorusPoint<S> {
        self.torus_point(&mut self.rng(index))
    }
}

impl<S: RandomScalar> PointSource<[TorusPoint<S>; 2]> for Sampler<S> {
    fn sample(&self, index: u64) -> [TorusPoint<S>; 2] {
        let mut rng = self.rng(index);
        [self.torus_point(&mut rng), self.torus_point(&mut rng)]
    }
}

impl<S: RandomScalar> PointSource<[TorusPoint<S>; 3]> for Sampler<S> {
    fn sample(&self, index: u64) -> [TorusPoint<S>; 3] {
        let mut rng = self.rng(index);
        [self.torus_point(&mut rng), self.torus_point(&mut rng), self.torus_point(&mut rng)]
    }
}

impl<S: RandomScalar> PointSource<(TorusPoint<S>, S)> for Sampler<S> {
    fn sample(&self, index: u64) -> (TorusPoint<S>, S) {
        let mut rng = self.rng(index);
        (self.torus_point(&mut rng), self.line_parameter(&mut rng))
    }
}

impl<S: RandomScalar> PointSource<ZPoint<S>> for Sampler<S> {
    fn sample(&self, index: u64) -> ZPoint<S> {
        self.z_points(index, 1).remove(0)
    }
}

impl<S: RandomScalar> PointSource<[ZPoint<S>; 2]> for Sampler<S> {
    fn sample(&self, index: u64) -> [ZPoint<S>; 2] {
        let mut v = self.z_points(index, 2);
        let b = v.pop().expect("two points");
        let a = v.pop().expect("two points");
        [a, b]
    }
}

impl<S: RandomScalar> PointSource<[ZPoint<S>; 3]> for Sampler<S> {
    fn sample(&self, index: u64) -> [ZPoint<S>; 3] {
        let mut v = self.z_points(index, 3);
        let c = v.pop().expect("three points");
        let b = v.pop().expect("three points");
        let a = v.pop().expect("three points");
        [a, b, c]
    }
}

impl<S: RandomScalar> PointSource<XPoint<S>> for Sampler<S> {
    fn sample(&self, index: u64) -> XPoint<S> {
        self.x_points(index, 1).remove(0)
    }
}

impl<S: RandomScalar> PointSource<[XPoint<S>; 2]> for Sampler<S> {
    fn sample(&self, index: u64) -> [XPoint<S>; 2] {
        let mut v = self.x_points(index, 2);
        let b = v.pop().expect("two points");
        let a = v.pop().expect("two points");
        [a, b]
    }
}

impl<S: RandomScalar> PointSource<[XPoint<S>; 3]> for Sampler<S> {
    fn sample(&self, index: u64) -> [XPoint<S>; 3] {
        let mut v = self.x_points(index, 3);
        let c = v.pop().expect("three points");
        let b = v.pop().expect("three points");
        let a = v.pop().expect("three points");
        [a, b, c]
    }
}
