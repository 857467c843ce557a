//! Radial maximum-entropy problems and the large-deviation rates built on them.
//!
//! Among rotation-invariant laws on `R^k` with `a_{k,q} E|x|^q` and `E|x|²` capped,
//! the entropy maximiser has radial profile `r^{k−1} exp(−λ₁ r^q − λ₂ r²)`. The
//! exponent of `P[Z ⊆ βB]` is its entropy minus that of the standard Gaussian.

mod radial;
mod rates;
mod solve;

pub use radial::{log_radial_moment, radial_moment, RadialDensity};
pub use rates::{hk_gaussian, onedim_rate, rate_ball, rate_section_ball};
pub use solve::{solve_inner, solve_small_ball, InnerOutcome, MaxEntSolution, Regime};
