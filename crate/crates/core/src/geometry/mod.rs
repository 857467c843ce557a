//! Origin-symmetric convex bodies described by their support functions.
//!
//! A body is never stored as vertices or half-spaces. Distances and containment are
//! evaluated as sup-norms of support functions over a [`DirectionGrid`], and every
//! grid-based answer comes with the bound `L · mesh` on what the grid can miss,
//! where `L` is a Lipschitz constant of the support function.

mod body;
mod grid;
mod measure;

pub use body::{Ball, SymmetricBody, TabulatedBody, Zonotope};
pub use grid::{make_grid, DirectionGrid};
pub use measure::{
    ball_sandwich, hausdorff, mean_width, polar_radial, volume2d, HausdorffEstimate, Sandwich, Verdict,
};

/// Alias kept for readers coming from the representation-centric description.
pub type Representation = SymmetricBody;
