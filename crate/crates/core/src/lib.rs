//! Numerical core for random shadows of `ℓ_p` balls.
//!
//! The rescaled projection `Z_{n,p} = n^{1/p-1/2} Πᵀ B_p^n` of the `ℓ_p` ball onto a
//! Haar-random `k`-dimensional subspace is an `L_q`-zonotope (`1/p + 1/q = 1`), and
//! the matching section `K_{n,q}` is its polar. This crate provides
//!
//! - [`specfun`]: log-gamma, the Gaussian moment norm `m_q` and the closed-form
//!   small-ball constants;
//! - [`geometry`]: origin-symmetric convex bodies given by support functions, with
//!   polarity, certified Hausdorff distances and ball sandwiches;
//! - [`sampling`]: seeded Haar Stiefel frames and the projection/section bodies
//!   built from them;
//! - [`maxent`]: the radial maximum-entropy problem behind the large-deviation
//!   exponents, including the two-multiplier regime with no closed form.
//!
//! The crate is `no_std` (it needs `alloc`). IO, parallel fan-out and the CLI live in
//! the `shadows` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
pub mod geometry;
pub mod linalg;
pub mod maxent;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod specfun;

pub use error::{Error, Result};
pub use geometry::{DirectionGrid, Representation, SymmetricBody, Verdict};
pub use maxent::{InnerOutcome, MaxEntSolution, RadialDensity, Regime};
pub use rng::SeedSpec;
pub use sampling::{EmpiricalMeasure, StiefelFrame};
pub use specfun::{HolderPair, PaperConstants};
