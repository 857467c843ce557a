use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{dot, norm};
use crate::{Error, Result, SeedSpec};

/// Finite set of unit directions with an upper bound on its covering radius.
///
/// `mesh` bounds the Euclidean distance from any unit vector to the nearest listed
/// direction. It is a proof for `k ≤ 3` (`certified = true`) and a Monte Carlo
/// estimate for `k ≥ 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    dim: usize,
    directions: Vec<f64>,
    mesh: f64,
    certified: bool,
}

impl DirectionGrid {
    pub fn new(dim: usize, directions: Vec<f64>, mesh: f64, certified: bool) -> Result<Self> {
        if dim == 0 || directions.is_empty() || directions.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: directions.len(),
            });
        }
        if directions.chunks_exact(dim).any(|d| (norm(d) - 1.0).abs() > 1e-14) {
            return Err(Error::domain("DirectionGrid::new", "directions must be unit vectors"));
        }
        Ok(DirectionGrid {
            dim,
            directions,
            mesh,
            certified,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.directions.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.directions
    }

    /// Largest distance from any of `probes` to the nearest grid direction.
    pub fn covering_audit<'a>(&self, probes: impl Iterator<Item = &'a [f64]>) -> f64 {
        let mut worst = 0.0f64;
        for p in probes {
            let best = self.iter().map(|d| dot(d, p)).fold(f64::NEG_INFINITY, f64::max);
            let dist = libm::sqrt((2.0 - 2.0 * best).max(0.0));
            worst = worst.max(dist);
        }
        worst
    }
}

/// Direction grid on the unit sphere of `R^k`.
///
/// - `k = 1`: `{+1, -1}`, mesh 0.
/// - `k = 2`: `resolution` equally spaced angles, mesh `π/resolution`.
/// - `k = 3`: latitude bands with per-band azimuth counts sized so the geodesic
///   covering radius is at most `π/M` for `M` bands; roughly `resolution` points,
///   symmetric under `u ↦ −u`.
/// - `k ≥ 4`: `resolution` uniform random directions; the mesh is estimated from
///   random probes and the grid is flagged as not certified.
pub fn make_grid(k: usize, resolution: usize, seed: &SeedSpec) -> Result<DirectionGrid> {
    if k == 0 {
        return Err(Error::domain("make_grid", "dimension must be at least 1"));
    }
    if resolution < 2 * k {
        return Err(Error::domain("make_grid", "resolution must be at least 2k"));
    }
    match k {
        1 => DirectionGrid::new(1, alloc::vec![1.0, -1.0], 0.0, true),
        2 => {
            let mut dirs = Vec::with_capacity(2 * resolution);
            for j in 0..resolution {
                let t = 2.0 * PI * j as f64 / resolution as f64;
                dirs.push(libm::cos(t));
                dirs.push(libm::sin(t));
            }
            DirectionGrid::new(2, dirs, PI / resolution as f64, true)
        }
        3 => Ok(band_grid(resolution)),
        _ => Ok(random_grid(k, resolution, seed)),
    }
}

fn band_grid(resolution: usize) -> DirectionGrid {
    // About 4M²/π points for M bands; M is kept even for antipodal symmetry.
    let m = {
        let raw = libm::sqrt(PI * resolution as f64 / 4.0);
        let even = 2 * (libm::round(raw / 2.0) as usize);
        even.max(2)
    };
    let mut dirs = Vec::new();
    let mut upper = Vec::new();
    for j in 0..m / 2 {
        let theta = (j as f64 + 0.5) * PI / m as f64;
        let count = (libm::ceil(2.0 * m as f64 * libm::sin(theta)) as usize).max(1);
        for i in 0..count {
            let phi = 2.0 * PI * i as f64 / count as f64;
            let (st, ct) = (libm::sin(theta), libm::cos(theta));
            upper.push([st * libm::cos(phi), st * libm::sin(phi), ct]);
        }
    }
    for p in &upper {
        dirs.extend_from_slice(p);
    }
    for p in &upper {
        dirs.extend_from_slice(&[-p[0], -p[1], -p[2]]);
    }
    // Geodesic distance ≤ π/(2M) along the meridian plus ≤ π/(2M) along the band;
    // the chord is shorter than the arc.
    let mesh = PI / m as f64;
    let dirs = normalize_all(dirs, 3);
    DirectionGrid {
        dim: 3,
        directions: dirs,
        mesh,
        certified: true,
    }
}

fn random_grid(k: usize, resolution: usize, seed: &SeedSpec) -> DirectionGrid {
    let mut rng = seed.rng();
    let mut dirs = Vec::with_capacity(k * resolution);
    for _ in 0..resolution {
        dirs.extend(random_unit(&mut rng, k));
    }
    let dirs = normalize_all(dirs, k);
    let mut grid = DirectionGrid {
        dim: k,
        directions: dirs,
        mesh: f64::INFINITY,
        certified: false,
    };
    let mut probe_rng = seed.child(u64::MAX).rng();
    let probes: Vec<f64> = (0..4 * resolution).flat_map(|_| random_unit(&mut probe_rng, k)).collect();
    grid.mesh = grid.covering_audit(probes.chunks_exact(k));
    grid
}

pub(crate) fn random_unit<R: rand::Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&v);
        if n > 0.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn normalize_all(mut dirs: Vec<f64>, k: usize) -> Vec<f64> {
    for d in dirs.chunks_exact_mut(k) {
        let n = norm(d);
        d.iter_mut().for_each(|x| *x /= n);
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional() {
        let g = make_grid(1, 7, &SeedSpec::new(0)).unwrap();
        assert_eq!(g.as_flat(), &[1.0, -1.0]);
        assert_eq!(g.mesh(), 0.0);
    }

    #[test]
    fn planar_spacing() {
        let g = make_grid(2, 360, &SeedSpec::new(0)).unwrap();
        assert_eq!(g.len(), 360);
        assert!(g.mesh() <= PI / 360.0);
        assert!(g.certified());
        for d in g.iter() {
            assert!((norm(d) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn resolution_too_small() {
        assert!(make_grid(2, 3, &SeedSpec::new(0)).is_err());
        assert!(make_grid(0, 10, &SeedSpec::new(0)).is_err());
    }

    #[test]
    fn band_grid_is_antipodal() {
        let g = make_grid(3, 500, &SeedSpec::new(0)).unwrap();
        let half = g.len() / 2;
        let flat = g.as_flat();
        for i in 0..half {
            for c in 0..3 {
                assert_eq!(flat[3 * i + c], -flat[3 * (i + half) + c]);
            }
        }
    }

    #[test]
    fn random_grid_flagged() {
        let g = make_grid(4, 200, &SeedSpec::new(5)).unwrap();
        assert!(!g.certified());
        assert_eq!(g.len(), 200);
        assert!(g.mesh().is_finite() && g.mesh() > 0.0);
    }
}
