use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::linalg::{dot, norm};
use crate::{Error, Result};

/// `L_q`-zonotope with support `h(u) = scale · (Σ_i |⟨a_i, u⟩|^q)^{1/q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    dim: usize,
    /// Generators `a_i` stored contiguously, `dim` entries each.
    generators: Vec<f64>,
    scale: f64,
    q: f64,
}

impl Zonotope {
    pub fn new(dim: usize, generators: Vec<f64>, scale: f64, q: f64) -> Result<Self> {
        if dim == 0 || generators.is_empty() || generators.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: generators.len(),
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain("Zonotope::new", "scale must be positive"));
        }
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::domain("Zonotope::new", "q must be finite and at least 1"));
        }
        Ok(Zonotope {
            dim,
            generators,
            scale,
            q,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.generators.len() / self.dim
    }

    pub fn generators(&self) -> impl Iterator<Item = &[f64]> {
        self.generators.chunks_exact(self.dim)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `Σ_i |⟨a_i, u⟩|^q`, without the scale and the outer root.
    pub fn power_sum(&self, u: &[f64]) -> f64 {
        let q = self.q;
        let it = self.generators().map(|a| dot(a, u).abs());
        if q == 1.0 {
            it.sum()
        } else if q == 2.0 {
            it.map(|x| x * x).sum()
        } else {
            it.map(|x| libm::pow(x, q)).sum()
        }
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        let s = self.power_sum(u);
        let root = if self.q == 1.0 {
            s
        } else if self.q == 2.0 {
            libm::sqrt(s)
        } else {
            libm::pow(s, 1.0 / self.q)
        };
        self.scale * root
    }

    /// `scale · (Σ_i ‖a_i‖^q)^{1/q}`.
    pub fn lipschitz_bound(&self) -> f64 {
        let s: f64 = self.generators().map(|a| libm::pow(norm(a), self.q)).sum();
        self.scale * libm::pow(s, 1.0 / self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub dim: usize,
    pub radius: f64,
}

/// A body known only through samples on a set of unit directions.
///
/// `radial_values`, when present, are exact values of the radial function on the
/// same directions; the points `ρ_j d_j` then lie on the boundary and the body is
/// evaluated as their convex hull.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedBody {
    dim: usize,
    directions: Vec<f64>,
    support_values: Vec<f64>,
    radial_values: Option<Vec<f64>>,
    lipschitz_bound: Option<f64>,
    // Planar bodies: (angle, index) sorted by angle in [0, 2π).
    angular_order: Vec<(f64, usize)>,
}

impl TabulatedBody {
    pub fn new(
        dim: usize,
        directions: Vec<f64>,
        support_values: Vec<f64>,
        radial_values: Option<Vec<f64>>,
        lipschitz_bound: Option<f64>,
    ) -> Result<Self> {
        if dim == 0 || directions.len() != dim * support_values.len() || support_values.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: dim * support_values.len(),
                got: directions.len(),
            });
        }
        if let Some(r) = &radial_values {
            if r.len() != support_values.len() {
                return Err(Error::DimensionMismatch {
                    expected: support_values.len(),
                    got: r.len(),
                });
            }
        }
        if let Some(l) = lipschitz_bound {
            if !(l >= 0.0) {
                return Err(Error::domain("TabulatedBody::new", "Lipschitz bound must be nonnegative"));
            }
        }
        if directions.chunks_exact(dim).any(|d| (norm(d) - 1.0).abs() > 1e-12) {
            return Err(Error::domain("TabulatedBody::new", "directions must be unit vectors"));
        }
        let mut angular_order = Vec::new();
        if dim == 2 {
            angular_order = directions
                .chunks_exact(2)
                .enumerate()
                .map(|(i, d)| (angle_of(d), i))
                .collect();
            angular_order.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        Ok(TabulatedBody {
            dim,
            directions,
            support_values,
            radial_values,
            lipschitz_bound,
            angular_order,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.support_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support_values.is_empty()
    }

    pub fn directions(&self) -> impl Iterator<Item = &[f64]> {
        self.directions.chunks_exact(self.dim)
    }

    pub fn support_values(&self) -> &[f64] {
        &self.support_values
    }

    pub fn radial_values(&self) -> Option<&[f64]> {
        self.radial_values.as_deref()
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz_bound
    }

    fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i * self.dim..(i + 1) * self.dim]
    }

    /// Index of the stored direction closest to `u` (first on ties) and its cosine.
    fn nearest(&self, unit: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, d) in self.directions().enumerate() {
            let c = dot(d, unit);
            if c > best.1 {
                best = (i, c);
            }
        }
        best
    }

    fn support(&self, u: &[f64]) -> f64 {
        let len = norm(u);
        if len == 0.0 {
            return 0.0;
        }
        let unit: Vec<f64> = u.iter().map(|x| x / len).collect();
        let (i, cos) = self.nearest(&unit);
        if cos >= 1.0 - 1e-15 {
            return len * self.support_values[i];
        }
        match &self.radial_values {
            Some(rho) => self
                .directions()
                .zip(rho)
                .map(|(d, r)| r * dot(d, u))
                .fold(f64::NEG_INFINITY, f64::max),
            None => len * self.support_values[i],
        }
    }

    fn radial(&self, u: &[f64]) -> Result<f64> {
        let rho = self
            .radial_values
            .as_deref()
            .ok_or(Error::Unsupported("radial function of a tabulated body without radial data"))?;
        let len = norm(u);
        if len == 0.0 {
            return Err(Error::DegenerateDirection);
        }
        let unit: Vec<f64> = u.iter().map(|x| x / len).collect();
        let (i, cos) = self.nearest(&unit);
        if cos >= 1.0 - 1e-15 {
            return Ok(rho[i] / len);
        }
        if self.dim != 2 || self.angular_order.len() < 3 {
            return Err(Error::Unsupported("radial interpolation is planar only"));
        }
        // Intersect the ray with the polygon edge spanning its angle.
        let theta = angle_of(&unit);
        let m = self.angular_order.len();
        let pos = self.angular_order.partition_point(|&(a, _)| a <= theta);
        let (ia, ib) = (self.angular_order[(pos + m - 1) % m].1, self.angular_order[pos % m].1);
        let da = self.direction(ia);
        let db = self.direction(ib);
        let xa = [rho[ia] * da[0], rho[ia] * da[1]];
        let xb = [rho[ib] * db[0], rho[ib] * db[1]];
        let edge = [xb[0] - xa[0], xb[1] - xa[1]];
        let denom = cross(&unit, &edge);
        if denom == 0.0 {
            return Ok(rho[ia] / len);
        }
        Ok(cross(&xa, &edge) / denom / len)
    }
}

fn angle_of(d: &[f64]) -> f64 {
    let a = libm::atan2(d[1], d[0]);
    if a < 0.0 {
        a + 2.0 * core::f64::consts::PI
    } else {
        a
    }
}

fn cross(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Origin-symmetric convex body.
#[derive(Debug, Clone, PartialEq)]
pub enum SymmetricBody {
    Zonotope(Zonotope),
    Ball(Ball),
    Tabulated(TabulatedBody),
    /// Polar of another body: `h(K°, u) = 1/ρ(K, u)` and `ρ(K°, u) = 1/h(K, u)`.
    Polar(Box<SymmetricBody>),
}

impl SymmetricBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("SymmetricBody::ball", "dimension must be at least 1"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain("SymmetricBody::ball", "radius must be positive"));
        }
        Ok(SymmetricBody::Ball(Ball { dim, radius }))
    }

    pub fn dim(&self) -> usize {
        match self {
            SymmetricBody::Zonotope(z) => z.dim,
            SymmetricBody::Ball(b) => b.dim,
            SymmetricBody::Tabulated(t) => t.dim,
            SymmetricBody::Polar(inner) => inner.dim(),
        }
    }

    fn check_dim(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        Ok(())
    }

    /// Support function `h(K, u) = sup_{x∈K} ⟨x, u⟩`; `u` need not be a unit vector.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u)?;
        match self {
            SymmetricBody::Zonotope(z) => Ok(z.support(u)),
            SymmetricBody::Ball(b) => Ok(b.radius * norm(u)),
            SymmetricBody::Tabulated(t) => Ok(t.support(u)),
            SymmetricBody::Polar(inner) => {
                if norm(u) == 0.0 {
                    return Ok(0.0);
                }
                Ok(1.0 / inner.radial(u)?)
            }
        }
    }

    /// Radial function `ρ(K, u) = sup{r ≥ 0 : r u ∈ K}`, homogeneous of degree −1.
    pub fn radial(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u)?;
        match self {
            SymmetricBody::Ball(b) => {
                let len = norm(u);
                if len == 0.0 {
                    return Err(Error::DegenerateDirection);
                }
                Ok(b.radius / len)
            }
            SymmetricBody::Polar(inner) => {
                let h = inner.support(u)?;
                if !(h > 0.0) {
                    return Err(Error::DegenerateDirection);
                }
                Ok(1.0 / h)
            }
            SymmetricBody::Tabulated(t) => t.radial(u),
            SymmetricBody::Zonotope(_) => Err(Error::Unsupported("radial function of a zonotope")),
        }
    }

    /// The polar body. Balls map to balls and polarity is an involution.
    pub fn polar(&self) -> SymmetricBody {
        match self {
            SymmetricBody::Ball(b) => SymmetricBody::Ball(Ball {
                dim: b.dim,
                radius: 1.0 / b.radius,
            }),
            SymmetricBody::Polar(inner) => (**inner).clone(),
            other => SymmetricBody::Polar(Box::new(other.clone())),
        }
    }

    /// A Lipschitz constant of the support function on the sphere.
    pub fn lipschitz_bound(&self) -> Result<f64> {
        match self {
            SymmetricBody::Zonotope(z) => Ok(z.lipschitz_bound()),
            SymmetricBody::Ball(b) => Ok(b.radius),
            SymmetricBody::Tabulated(t) => t.lipschitz_bound.ok_or(Error::MissingLipschitz),
            SymmetricBody::Polar(inner) => match &**inner {
                SymmetricBody::Ball(b) => Ok(1.0 / b.radius),
                _ => Err(Error::MissingLipschitz),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn l1_square() -> SymmetricBody {
        SymmetricBody::Zonotope(Zonotope::new(2, vec![1.0, 0.0, 0.0, 1.0], 1.0, 1.0).unwrap())
    }

    #[test]
    fn zonotope_support_examples() {
        let z = l1_square();
        assert_eq!(z.support(&[1.0, 0.0]).unwrap(), 1.0);
        let d = z.support(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((d - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(matches!(z.support(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ball_support_and_polar() {
        let b = SymmetricBody::ball(3, 0.4).unwrap();
        assert!((b.support(&[0.0, 0.6, 0.8]).unwrap() - 0.4).abs() < 1e-15);
        let p = b.polar();
        assert_eq!(p, SymmetricBody::ball(3, 2.5).unwrap());
        let pp = p.polar();
        match pp {
            SymmetricBody::Ball(Ball { radius, .. }) => assert!((radius - 0.4).abs() < 1e-12),
            _ => panic!("ball polar should be a ball"),
        }
    }

    #[test]
    fn polar_wrapper_is_involutive() {
        let z = l1_square();
        assert_eq!(z.polar().polar(), z);
        assert!(z.radial(&[1.0, 0.0]).is_err());
        let zp = z.polar();
        assert!((zp.radial(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(zp.support(&[1.0, 0.0]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn zonotope_lipschitz() {
        let z = Zonotope::new(2, vec![3.0, 4.0, 0.0, 1.0], 2.0, 1.0).unwrap();
        assert!((z.lipschitz_bound() - 12.0).abs() < 1e-14);
    }

    #[test]
    fn tabulated_validation() {
        assert!(TabulatedBody::new(2, vec![1.0, 0.0], vec![1.0], None, None).is_ok());
        assert!(TabulatedBody::new(2, vec![2.0, 0.0], vec![1.0], None, None).is_err());
        assert!(TabulatedBody::new(2, vec![1.0, 0.0, 0.0], vec![1.0], None, None).is_err());
        assert!(TabulatedBody::new(2, vec![1.0, 0.0], vec![1.0], Some(vec![]), None).is_err());
    }

    #[test]
    fn tabulated_square_radial_interpolates() {
        // Unit square [-1,1]² sampled at the 4 axis directions and 4 diagonals.
        let s = FRAC_1_SQRT_2;
        let dirs = vec![1.0, 0.0, s, s, 0.0, 1.0, -s, s, -1.0, 0.0, -s, -s, 0.0, -1.0, s, -s];
        let rho = vec![1.0, 2f64.sqrt(), 1.0, 2f64.sqrt(), 1.0, 2f64.sqrt(), 1.0, 2f64.sqrt()];
        let h = rho.clone();
        let t = SymmetricBody::Tabulated(TabulatedBody::new(2, dirs, h, Some(rho), Some(2f64.sqrt())).unwrap());
        let theta: f64 = 0.3;
        let r = t.radial(&[libm::cos(theta), libm::sin(theta)]).unwrap();
        assert!((r - 1.0 / libm::cos(theta)).abs() < 1e-14);
        assert!((t.support(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let hs = t.support(&[libm::cos(theta), libm::sin(theta)]).unwrap();
        assert!((hs - (libm::cos(theta) + libm::sin(theta))).abs() < 1e-14);
    }
}
