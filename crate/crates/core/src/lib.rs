//! Exact lattice ball enumeration and numerical checks of ergodic theorems for
//! lattice orbits on infinite-volume homogeneous spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`gauge`]: height functions `t = log P(m)` and ball predicates.
//! - [`arith`]: exact arithmetic groups (SL₂(ℤ), SL₂(ℤ[i]), their images in
//!   SO(2,1) and SO(3,1), the affine groups) and duplicate-free ball
//!   enumeration by column completion.
//! - [`spaces`]: homogeneous-space models with right actions, charts,
//!   reference densities and closed-form limiting densities.
//! - [`volumes`]: Haar and skew-ball volumes of stabilizers, the Θ kernel,
//!   growth fits and regularity checks.
//! - [`sampling`]: normalized orbit sums, ratio averages, the continuous
//!   comparison operator and convergence reports.
//! - [`harness`]: configuration, experiment orchestration, output schemas,
//!   run manifests and the acceptance suite.

pub mod arith;
pub mod error;
pub mod gauge;
pub mod harness;
pub mod matrix;
pub mod sampling;
pub mod spaces;
pub mod stats;
pub mod volumes;

pub use error::{Error, Result};
pub use gauge::{BallBound, GaugeFunction, GaugeKind, Height};
