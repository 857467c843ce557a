//! Seeded Haar frames and the random bodies built from them.

use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{ball_sandwich, DirectionGrid, SymmetricBody, TabulatedBody, Verdict, Zonotope};
use crate::linalg::{dot, orthonormalize_columns};
use crate::{Error, HolderPair, Result, SeedSpec};

/// An `n × k` matrix with orthonormal columns, stored row-major, so row `i` is the
/// vector `v_i ∈ R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelFrame {
    n: usize,
    k: usize,
    matrix: Vec<f64>,
}

impl StiefelFrame {
    /// Wraps a row-major matrix, checking `ΠᵀΠ = I` to `1e-12`.
    pub fn new(n: usize, k: usize, matrix: Vec<f64>) -> Result<Self> {
        if k == 0 || n < k || matrix.len() != n * k {
            return Err(Error::DimensionMismatch {
                expected: n * k,
                got: matrix.len(),
            });
        }
        let frame = StiefelFrame { n, k, matrix };
        if frame.orthonormality_defect() > 1e-12 {
            return Err(Error::domain("StiefelFrame::new", "columns are not orthonormal"));
        }
        Ok(frame)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.matrix.chunks_exact(self.k)
    }

    /// Largest entry of `|ΠᵀΠ − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = crate::linalg::gram(&self.matrix, self.n, self.k);
        let mut worst = 0.0f64;
        for i in 0..self.k {
            for j in 0..self.k {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[i * self.k + j] - target).abs());
            }
        }
        worst
    }

    /// `Σ_i ‖v_i‖²`, which equals `k`.
    pub fn frobenius_sq(&self) -> f64 {
        dot(&self.matrix, &self.matrix)
    }

    /// `Πu`, the vector `(⟨v_i, u⟩)_i`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.rows().map(|v| dot(v, u)).collect()
    }
}

fn gaussian_block(n: usize, k: usize, seed: &SeedSpec) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..n * k).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Haar-distributed frame: an `n × k` standard Gaussian matrix orthonormalised with
/// a positive diagonal on the triangular factor.
pub fn stiefel_frame(n: usize, k: usize, seed: &SeedSpec) -> Result<StiefelFrame> {
    if k == 0 || n < k {
        return Err(Error::domain("stiefel_frame", "need n >= k >= 1"));
    }
    let mut m = gaussian_block(n, k, seed);
    orthonormalize_columns(&mut m, n, k)?;
    Ok(StiefelFrame { n, k, matrix: m })
}

/// Uniform measure on the points `√n v_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    k: usize,
    points: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn len(&self) -> usize {
        self.points.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.k)
    }

    /// `(1/n) Σ ‖x_i‖²`.
    pub fn second_moment_trace(&self) -> f64 {
        dot(&self.points, &self.points) / self.len() as f64
    }

    /// `((1/n) Σ |⟨x_i, u⟩|^q)^{1/q}`, the support function of `Z_q` of the measure.
    pub fn lq_norm(&self, u: &[f64], q: f64) -> f64 {
        let s: f64 = self.points().map(|x| libm::pow(dot(x, u).abs(), q)).sum();
        libm::pow(s / self.len() as f64, 1.0 / q)
    }
}

pub fn empirical_measure(frame: &StiefelFrame) -> EmpiricalMeasure {
    let s = libm::sqrt(frame.n as f64);
    EmpiricalMeasure {
        k: frame.k,
        points: frame.matrix.iter().map(|x| x * s).collect(),
    }
}

/// `n^{1/p−1/2} Πᵀ B_p^n` as an `L_q`-zonotope with generators `v_i`; `q = 2` gives
/// the unit ball exactly.
pub fn projection_body_from_frame(frame: &StiefelFrame, q: f64) -> Result<SymmetricBody> {
    if q == 2.0 {
        return SymmetricBody::ball(frame.k, 1.0);
    }
    let scale = libm::pow(frame.n as f64, 0.5 - 1.0 / q);
    Ok(SymmetricBody::Zonotope(Zonotope::new(frame.k, frame.matrix.clone(), scale, q)?))
}

pub fn projection_body(n: usize, k: usize, pair: HolderPair, seed: &SeedSpec) -> Result<SymmetricBody> {
    let frame = stiefel_frame(n, k, seed)?;
    projection_body_from_frame(&frame, pair.q())
}

/// Section body `K = Z°` tabulated on `grid`, where `Z` is the `L_q` projection body
/// of the frame.
///
/// Radial values `1/h(Z, u)` are exact at grid directions. Support values are those
/// of the convex hull of the tabulated boundary points, and the Lipschitz bound is
/// the certified circumradius `1/(min h(Z) − L_Z·mesh)`.
pub fn section_body_from_frame(frame: &StiefelFrame, q: f64, grid: &DirectionGrid) -> Result<SymmetricBody> {
    if grid.dim() != frame.k {
        return Err(Error::DimensionMismatch {
            expected: frame.k,
            got: grid.dim(),
        });
    }
    let z = projection_body_from_frame(frame, q)?;
    let mut radial = Vec::with_capacity(grid.len());
    let mut h_min = f64::INFINITY;
    for u in grid.iter() {
        let h = z.support(u)?;
        if !(h > 0.0) {
            return Err(Error::DegenerateDirection);
        }
        h_min = h_min.min(h);
        radial.push(1.0 / h);
    }
    let dirs: Vec<&[f64]> = grid.iter().collect();
    let support: Vec<f64> = dirs
        .iter()
        .map(|u| {
            dirs.iter()
                .zip(&radial)
                .map(|(d, r)| r * dot(d, u))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let slack = h_min - z.lipschitz_bound()? * grid.mesh();
    let lipschitz = if grid.certified() && slack > 0.0 {
        Some(1.0 / slack)
    } else {
        None
    };
    let body = TabulatedBody::new(frame.k, grid.as_flat().to_vec(), support, Some(radial), lipschitz)?;
    Ok(SymmetricBody::Tabulated(body))
}

pub fn section_body(n: usize, k: usize, q: f64, seed: &SeedSpec, grid: &DirectionGrid) -> Result<SymmetricBody> {
    if !(1.0..2.0).contains(&q) {
        return Err(Error::domain("section_body", "q must lie in [1, 2)"));
    }
    let frame = stiefel_frame(n, k, seed)?;
    section_body_from_frame(&frame, q, grid)
}

/// `W = ((1/n)Σ|g_i|^q)^{1/q} / ((1/n)Σ g_i²)^{1/2}` for one Gaussian sample.
///
/// The sample is the same draw that [`stiefel_frame`] uses for `k = 1`, so `W`
/// equals the support at `+1` of the matching one-dimensional projection body.
pub fn w_statistic(n: usize, pair: HolderPair, seed: &SeedSpec) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("w_statistic", "n must be positive"));
    }
    let g = gaussian_block(n, 1, seed);
    let q = pair.q();
    let nf = n as f64;
    let lq: f64 = g.iter().map(|x| libm::pow(x.abs(), q)).sum::<f64>() / nf;
    let l2: f64 = g.iter().map(|x| x * x).sum::<f64>() / nf;
    Ok(libm::pow(lq, 1.0 / q) / libm::sqrt(l2))
}

/// One small-ball replicate: the containment verdict for `Z ⊆ βB` and the grid
/// extremes of `h(Z, ·)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replicate {
    pub verdict: Verdict,
    pub outer: f64,
    pub inner: f64,
}

pub fn smallball_replicate(
    n: usize,
    k: usize,
    pair: HolderPair,
    beta: f64,
    grid: &DirectionGrid,
    seed: &SeedSpec,
) -> Result<Replicate> {
    let body = projection_body(n, k, pair, seed)?;
    let s = ball_sandwich(&body, grid)?;
    Ok(Replicate {
        verdict: s.contained_in_ball(beta),
        outer: s.outer,
        inner: s.inner,
    })
}

/// Mergeable verdict counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub contained: u64,
    pub not_contained: u64,
    pub inconclusive: u64,
}

impl Tally {
    pub fn record(&mut self, v: Verdict) {
        match v {
            Verdict::Contained => self.contained += 1,
            Verdict::NotContained => self.not_contained += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
        }
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            contained: self.contained + other.contained,
            not_contained: self.not_contained + other.not_contained,
            inconclusive: self.inconclusive + other.inconclusive,
        }
    }

    /// `(p̂, stderr, inconclusive)`, with inconclusive replicates left out of `p̂`.
    pub fn estimate(&self) -> (f64, f64, u64) {
        let decided = (self.contained + self.not_contained) as f64;
        if decided == 0.0 {
            return (f64::NAN, f64::NAN, self.inconclusive);
        }
        let p = self.contained as f64 / decided;
        (p, libm::sqrt(p * (1.0 - p) / decided), self.inconclusive)
    }
}

/// Frequency of certified `Z ⊆ βB` over `replicates` frames; replicate `i` uses
/// the substream `seed.child(i)`.
pub fn smallball_probability(
    n: usize,
    k: usize,
    pair: HolderPair,
    beta: f64,
    replicates: u64,
    grid: &DirectionGrid,
    seed: &SeedSpec,
) -> Result<(f64, f64, u64)> {
    if replicates == 0 {
        return Err(Error::domain("smallball_probability", "need at least one replicate"));
    }
    let mut tally = Tally::default();
    for i in 0..replicates {
        tally.record(smallball_replicate(n, k, pair, beta, grid, &seed.child(i))?.verdict);
    }
    Ok(tally.estimate())
}
