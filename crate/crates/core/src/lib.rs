//! Exact geometry of a glued compact/non-compact metric space and the orbits
//! of its isometry group.
//!
//! The compact component is a flat 2-torus `Y`; the non-compact component is
//! either the cylinder `Y × ℝ` (the space `Z`) or the graph `H` of a dense
//! one-parameter subgroup of `Y` (the space `X`). Every decision that matters
//! (equal distances, orbit membership, density hits) is made with exact
//! arithmetic in a real quadratic field, with a parallel `f64` mode for bulk
//! sampling.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod flat_torus;
pub mod glued_space;
pub mod isometry;
pub mod numerics;
pub mod oracle;
pub mod orbit;
pub mod sampling;

pub use error::{Error, Result};
pub use flat_torus::{
    Axis, GramMatrix, OneParamSubgroup, Subtorus, TangentVector, TorusPoint,
};
pub use glued_space::{GluedSpace, GluingParams, XPoint, ZPoint};
pub use isometry::{LineIsometry, ProductIsometry, TorusIsometry, XIsometry};
pub use numerics::{ExactScalar, Length, QuadraticField, Scalar, ScalarMode, Sign};
