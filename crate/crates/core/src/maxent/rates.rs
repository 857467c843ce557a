use super::solve::solve_small_ball;
use crate::linalg::symmetric_eigenvalues;
use crate::specfun::{m_q_unchecked, HolderPair, LibmExt};
use crate::{Error, Result};

/// Rate of a centred Gaussian law with covariance `Σ` (row-major `k × k`) under the
/// empirical-measure LDP: `−½ log det Σ` when `0 < Σ ≤ I`, and `+∞` otherwise.
pub fn hk_gaussian(covariance: &[f64], k: usize) -> Result<f64> {
    if k == 0 || covariance.len() != k * k {
        return Err(Error::DimensionMismatch {
            expected: k * k,
            got: covariance.len(),
        });
    }
    let eig = symmetric_eigenvalues(covariance, k)?;
    if eig.iter().any(|&e| !(e > 0.0) || e > 1.0 + 1e-12) {
        return Ok(f64::INFINITY);
    }
    let log_det: f64 = eig.iter().map(|e| e.ln_libm()).sum();
    Ok(0.0 - 0.5 * log_det)
}

/// Rate of the ball `βB` for `0 < β ≤ m_q`, the negated small-ball exponent.
pub fn rate_ball(k: usize, pair: HolderPair, beta: f64) -> Result<f64> {
    let q = pair.q();
    if !(beta > 0.0) || beta > m_q_unchecked(q) {
        return Err(Error::domain("rate_ball", "beta must lie in (0, m_q]"));
    }
    Ok(0.0 - solve_small_ball(k, q, beta)?.exponent)
}

/// Rate of the ball `rB` for the section body, through `(rB)° = r⁻¹B`;
/// needs `r ≥ 1/m_q`.
pub fn rate_section_ball(k: usize, q: f64, radius: f64) -> Result<f64> {
    let pair = HolderPair::from_q(q)?;
    let m = m_q_unchecked(q);
    if !(radius.is_finite() && radius * m >= 1.0 - 1e-15) {
        return Err(Error::domain("rate_section_ball", "radius must be at least 1/m_q"));
    }
    rate_ball(k, pair, (1.0 / radius).min(m))
}

/// One-dimensional rate at speed `n^{2/q}` for `1 ≤ p < 2`, with `q = p/(p−1)`:
///
/// - `1 < p < 2`: `½ (z^q − m_q^q)^{2/q}` for `z ≥ m_q`, `+∞` below;
/// - `p = 1`: `z² − 1` for `z ≥ 1`, `+∞` below.
pub fn onedim_rate(p: f64, z: f64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain("onedim_rate", "z must be positive"));
    }
    if p == 1.0 {
        return Ok(if z >= 1.0 { z * z - 1.0 } else { f64::INFINITY });
    }
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::domain("onedim_rate", "p must lie in [1, 2)"));
    }
    let q = p / (p - 1.0);
    let m = m_q_unchecked(q);
    if z < m {
        return Ok(f64::INFINITY);
    }
    let gap = (libm::pow(z, q) - libm::pow(m, q)).max(0.0);
    Ok(0.5 * libm::pow(gap, 2.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::Exponent;

    #[test]
    fn gaussian_rate_examples() {
        assert_eq!(hk_gaussian(&[1.0, 0.0, 0.0, 1.0], 2).unwrap(), 0.0);
        assert_eq!(hk_gaussian(&[2.0, 0.0, 0.0, 1.0], 2).unwrap(), f64::INFINITY);
        let r = hk_gaussian(&[0.5, 0.0, 0.0, 0.5], 2).unwrap();
        assert!((r - core::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(hk_gaussian(&[0.5, 0.0, 0.0, 0.0], 2).unwrap(), f64::INFINITY);
        assert_eq!(hk_gaussian(&[0.5, 0.1, 0.0, 0.5], 2), Err(Error::NotSymmetric));
    }

    #[test]
    fn ball_rates() {
        let pair = HolderPair::cube();
        let m = m_q_unchecked(1.0);
        assert_eq!(rate_ball(1, pair, m).unwrap(), 0.0);
        assert!((rate_ball(1, pair, 0.6).unwrap() - 0.236_616_976_410_718_1).abs() < 1e-12);
        assert!(rate_ball(1, pair, m * 1.01).is_err());
        assert!((rate_section_ball(1, 1.0, 1.0 / 0.6).unwrap() - 0.236_616_976_410_718_1).abs() < 1e-12);
        assert_eq!(rate_section_ball(2, 1.0, 1.0 / m).unwrap(), 0.0);
        assert!(rate_section_ball(2, 1.0, 0.9 / m).is_err());
        let pair = HolderPair::from_p(Exponent::Finite(4.0)).unwrap();
        let mut last = f64::INFINITY;
        for i in 1..=12 {
            let beta = m_q_unchecked(pair.q()) * i as f64 / 12.0;
            let r = rate_ball(2, pair, beta).unwrap();
            assert!(r <= last + 1e-12);
            last = r;
        }
    }

    #[test]
    fn onedim_examples() {
        let p = 1.5;
        let m = m_q_unchecked(3.0);
        assert_eq!(onedim_rate(p, m).unwrap(), 0.0);
        assert_eq!(onedim_rate(p, 0.9 * m).unwrap(), f64::INFINITY);
        assert_eq!(onedim_rate(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(onedim_rate(1.0, 2.0).unwrap(), 3.0);
        assert_eq!(onedim_rate(1.0, 0.5).unwrap(), f64::INFINITY);
        assert!(onedim_rate(2.0, 1.0).is_err());
        assert!(onedim_rate(3.0, 1.0).is_err());
    }
}
