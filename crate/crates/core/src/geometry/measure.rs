use core::f64::consts::PI;

use super::body::SymmetricBody;
use super::grid::{random_unit, DirectionGrid};
use crate::{Error, Result, SeedSpec};

/// Radial function of the polar body, `ρ(K°, u) = 1/h(K, u)`.
pub fn polar_radial(body: &SymmetricBody, u: &[f64]) -> Result<f64> {
    let h = body.support(u)?;
    if !(h > 0.0) {
        return Err(Error::DegenerateDirection);
    }
    Ok(1.0 / h)
}

/// Grid estimate of a Hausdorff distance; the true value lies in
/// `[estimate, estimate + error_bound]` when `certified` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffEstimate {
    pub estimate: f64,
    pub error_bound: f64,
    pub certified: bool,
}

fn check_grid(body: &SymmetricBody, grid: &DirectionGrid) -> Result<()> {
    if body.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: grid.dim(),
        });
    }
    Ok(())
}

fn lipschitz_term(body: &SymmetricBody, grid: &DirectionGrid) -> Result<f64> {
    if grid.mesh() == 0.0 {
        return Ok(0.0);
    }
    body.lipschitz_bound()
}

/// Sup-norm distance of the support functions over the grid.
pub fn hausdorff(b1: &SymmetricBody, b2: &SymmetricBody, grid: &DirectionGrid) -> Result<HausdorffEstimate> {
    check_grid(b1, grid)?;
    check_grid(b2, grid)?;
    let lip = lipschitz_term(b1, grid)? + lipschitz_term(b2, grid)?;
    let mut estimate = 0.0f64;
    for u in grid.iter() {
        let d = (b1.support(u)? - b2.support(u)?).abs();
        estimate = estimate.max(d);
    }
    Ok(HausdorffEstimate {
        estimate,
        error_bound: lip * grid.mesh(),
        certified: grid.certified(),
    })
}

/// Outcome of a grid containment test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Contained,
    NotContained,
    /// The answer is within the grid error and cannot be decided at this mesh.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Contained => "contained",
            Verdict::NotContained => "not_contained",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Extreme support values of a body over a grid.
///
/// `inner` and `outer` are the grid minimum and maximum of `h`; the true extremes
/// over the sphere lie within `error_bound` of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub inner: f64,
    pub outer: f64,
    pub error_bound: f64,
    pub certified: bool,
}

impl Sandwich {
    /// Tests `K ⊆ βB`.
    pub fn contained_in_ball(&self, beta: f64) -> Verdict {
        if self.outer > beta {
            Verdict::NotContained
        } else if self.certified && self.outer + self.error_bound <= beta {
            Verdict::Contained
        } else {
            Verdict::Inconclusive
        }
    }

    /// Tests `αB ⊆ K`.
    pub fn contains_ball(&self, alpha: f64) -> Verdict {
        if self.inner < alpha {
            Verdict::NotContained
        } else if self.certified && alpha <= self.inner - self.error_bound {
            Verdict::Contained
        } else {
            Verdict::Inconclusive
        }
    }
}

pub fn ball_sandwich(body: &SymmetricBody, grid: &DirectionGrid) -> Result<Sandwich> {
    check_grid(body, grid)?;
    let lip = lipschitz_term(body, grid)?;
    let mut inner = f64::INFINITY;
    let mut outer = f64::NEG_INFINITY;
    for u in grid.iter() {
        let h = body.support(u)?;
        inner = inner.min(h);
        outer = outer.max(h);
    }
    Ok(Sandwich {
        inner,
        outer,
        error_bound: lip * grid.mesh(),
        certified: grid.certified(),
    })
}

/// Area of a planar body, `½∫ρ(θ)² dθ`, by the trapezoid rule on
/// `angular_samples` equally spaced angles.
pub fn volume2d(body: &SymmetricBody, angular_samples: usize) -> Result<f64> {
    if body.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: body.dim(),
        });
    }
    if angular_samples == 0 {
        return Err(Error::domain("volume2d", "need at least one angular sample"));
    }
    let step = 2.0 * PI / angular_samples as f64;
    let mut sum = 0.0;
    for j in 0..angular_samples {
        let t = step * j as f64;
        let rho = body.radial(&[libm::cos(t), libm::sin(t)])?;
        if !rho.is_finite() {
            return Err(Error::DegenerateDirection);
        }
        sum += rho * rho;
    }
    Ok(0.5 * step * sum)
}

/// Monte Carlo average of `h(K, U)` over `directions` uniform unit vectors, with
/// its standard error.
pub fn mean_width(body: &SymmetricBody, directions: usize, seed: &SeedSpec) -> Result<(f64, f64)> {
    if let SymmetricBody::Ball(b) = body {
        return Ok((b.radius, 0.0));
    }
    if directions == 0 {
        return Err(Error::domain("mean_width", "need at least one direction"));
    }
    let mut rng = seed.rng();
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..directions {
        let u = random_unit(&mut rng, body.dim());
        let h = body.support(&u)?;
        let delta = h - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (h - mean);
    }
    let stderr = if directions > 1 {
        libm::sqrt(m2 / ((directions - 1) as f64) / directions as f64)
    } else {
        f64::INFINITY
    };
    Ok((mean, stderr))
}
