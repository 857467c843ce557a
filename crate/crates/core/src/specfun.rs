//! Gamma-function evaluation and the closed-form constants of the small-ball problem.
//!
//! Every Gamma ratio is assembled in log space and exponentiated last, so the
//! constants stay finite for large `k` and for `q` near either end of `[1, 2]`.

use core::f64::consts::{E, PI};

use crate::{Error, Result};

/// An exponent that may be `+∞`. Only `p` ever takes the infinite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(x) => 1.0 / x,
            Exponent::Infinity => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl core::fmt::Display for Exponent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{x}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

/// Hölder-conjugate exponents `(p, q)` with `2 < p ≤ ∞` and `1 ≤ q < 2`.
///
/// Everything downstream is expressed through `q`; `p` is kept for display and for
/// the projection scale `n^{1/p - 1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderPair {
    p: Exponent,
    q: f64,
}

impl HolderPair {
    pub fn from_q(q: f64) -> Result<Self> {
        if !q.is_finite() || !(1.0..2.0).contains(&q) {
            return Err(Error::domain("HolderPair::from_q", "q must lie in [1, 2)"));
        }
        let p = if q == 1.0 {
            Exponent::Infinity
        } else {
            Exponent::Finite(q / (q - 1.0))
        };
        Ok(HolderPair { p, q })
    }

    pub fn from_p(p: Exponent) -> Result<Self> {
        match p {
            Exponent::Infinity => Ok(HolderPair { p, q: 1.0 }),
            Exponent::Finite(x) if x.is_infinite() && x > 0.0 => Self::from_p(Exponent::Infinity),
            Exponent::Finite(x) if x.is_finite() && x > 2.0 => Ok(HolderPair {
                p,
                q: x / (x - 1.0),
            }),
            Exponent::Finite(_) => Err(Error::domain("HolderPair::from_p", "p must lie in (2, inf]")),
        }
    }

    /// The cube case `p = ∞`, `q = 1`.
    pub fn cube() -> Self {
        HolderPair {
            p: Exponent::Infinity,
            q: 1.0,
        }
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `1/p`, computed as `1 - 1/q` so that `p = ∞` gives exactly zero.
    pub fn p_reciprocal(&self) -> f64 {
        match self.p {
            Exponent::Infinity => 0.0,
            Exponent::Finite(_) => 1.0 - 1.0 / self.q,
        }
    }
}

/// Closed-form constants for one `(k, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperConstants {
    pub k: usize,
    pub q: f64,
    /// `(E|g|^q)^{1/q}` for a standard Gaussian `g`.
    pub m_q: f64,
    /// Spherical mean of `|⟨z, u⟩|^q`.
    pub a_kq: f64,
    /// Surface area of the unit sphere in `R^k`.
    pub omega_k: f64,
    pub delta_kq: f64,
    /// Largest radius for which the small-ball exponent has a closed form.
    pub beta_kq: f64,
    /// Ratio `a_kq^{1/q} √k / m_q` of the inner-ball bound to `m_q`.
    pub abar_kq: f64,
}

impl PaperConstants {
    /// Upper limit `a_kq^{1/q} √k` for radii of balls contained in a finite-rate shadow.
    pub fn inner_bound(&self) -> f64 {
        libm::pow(self.a_kq, 1.0 / self.q) * libm::sqrt(self.k as f64)
    }
}

/// `log Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain("log_gamma", "argument must be positive and finite"));
    }
    Ok(libm::lgamma(x))
}

// Internal variant for arguments that are positive by construction.
#[inline]
pub(crate) fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

pub(crate) const LN_PI: f64 = 1.144_729_885_849_400_2;

/// `m_q = √2 (Γ((q+1)/2)/√π)^{1/q}`, the `L_q` norm of a standard Gaussian.
pub fn m_q(q: f64) -> Result<f64> {
    if !q.is_finite() || q < 1.0 {
        return Err(Error::domain("m_q", "q must be finite and at least 1"));
    }
    Ok(m_q_unchecked(q))
}

pub(crate) fn m_q_unchecked(q: f64) -> f64 {
    core::f64::consts::SQRT_2 * libm::exp((lgamma((q + 1.0) / 2.0) - 0.5 * LN_PI) / q)
}

/// `log ω_k` with `ω_k = 2π^{k/2}/Γ(k/2)`.
pub fn log_sphere_area(k: usize) -> f64 {
    let half = k as f64 / 2.0;
    core::f64::consts::LN_2 + half * LN_PI - lgamma(half)
}

/// `log a_{k,q}` with `a_{k,q} = Γ((q+1)/2) Γ(k/2) / (√π Γ((k+q)/2))`.
pub(crate) fn log_a_kq(k: usize, q: f64) -> f64 {
    let kf = k as f64;
    lgamma((q + 1.0) / 2.0) + lgamma(kf / 2.0) - 0.5 * LN_PI - lgamma((kf + q) / 2.0)
}

/// All closed-form constants for dimension `k ≥ 1` and `q ∈ [1, 2]`.
///
/// `q = 2` is admitted so that the limits `a_{k,2} = 1/k` and `β_{k,2} = 1` can be
/// checked; the large-deviation statements themselves need `q < 2`.
pub fn constants(k: usize, q: f64) -> Result<PaperConstants> {
    if k == 0 {
        return Err(Error::domain("constants", "k must be at least 1"));
    }
    if !q.is_finite() || !(1.0..=2.0).contains(&q) {
        return Err(Error::domain("constants", "q must lie in [1, 2]"));
    }
    let kf = k as f64;
    let log_a = log_a_kq(k, q);
    let log_delta = (kf / q).ln_libm() + log_a;
    let log_beta =
        log_delta / q + 0.5 * (kf.ln_libm() + lgamma(kf / q) - lgamma((kf + 2.0) / q));
    let log_abar = (lgamma(kf / 2.0) - lgamma((kf + q) / 2.0)) / q + 0.5 * (kf / 2.0).ln_libm();
    Ok(PaperConstants {
        k,
        q,
        m_q: m_q_unchecked(q),
        a_kq: libm::exp(log_a),
        omega_k: libm::exp(log_sphere_area(k)),
        delta_kq: libm::exp(log_delta),
        beta_kq: libm::exp(log_beta),
        abar_kq: libm::exp(log_abar),
    })
}

/// `(xΓ(y)/Γ(y+y/x))^x · (yΓ(x)/Γ(x+x/y))^y`, which never exceeds one and equals
/// one exactly on the diagonal `x = y`.
pub fn gamma_inequality_lhs(x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite() && x > 0.0 && y > 0.0) {
        return Err(Error::domain("gamma_inequality_lhs", "arguments must be positive and finite"));
    }
    let first = x * (x.ln_libm() + lgamma(y) - lgamma(y + y / x));
    let second = y * (y.ln_libm() + lgamma(x) - lgamma(x + x / y));
    Ok(libm::exp(first + second))
}

/// Closed-form small-ball exponent
/// `c = k log β − (k/2) log(2πe) + (k/q)(1 − log δ) + log Γ(k/q) − log q + log ω_k`,
/// valid for `0 < β ≤ β_{k,q}`.
pub fn c_small_ball_closed(k: usize, q: f64, beta: f64) -> Result<f64> {
    if !q.is_finite() || !(1.0..2.0).contains(&q) {
        return Err(Error::domain("c_small_ball_closed", "q must lie in [1, 2)"));
    }
    let c = constants(k, q)?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain("c_small_ball_closed", "beta must be positive"));
    }
    if beta > c.beta_kq * (1.0 + 1e-12) {
        return Err(Error::domain(
            "c_small_ball_closed",
            "beta exceeds beta_kq; use the maximum-entropy solver",
        ));
    }
    Ok(c_closed_unchecked(&c, beta))
}

pub(crate) fn c_closed_unchecked(c: &PaperConstants, beta: f64) -> f64 {
    let kf = c.k as f64;
    let q = c.q;
    kf * beta.ln_libm() - 0.5 * kf * (2.0 * PI * E).ln_libm()
        + (kf / q) * (1.0 - c.delta_kq.ln_libm())
        + lgamma(kf / q)
        - q.ln_libm()
        + log_sphere_area(c.k)
}

/// Entropy `(k/2) log(2πe)` of the standard Gaussian on `R^k`.
pub fn gaussian_entropy(k: usize) -> f64 {
    0.5 * k as f64 * (2.0 * PI * E).ln_libm()
}

pub(crate) trait LibmExt {
    fn ln_libm(self) -> f64;
}

impl LibmExt for f64 {
    #[inline]
    fn ln_libm(self) -> f64 {
        libm::log(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Reference values computed with mpmath at 40 digits.
    const LGAMMA_TABLE: &[(f64, f64)] = &[
        (0.001, 6.907_178_885_383_853_682_5),
        (0.01, 4.599_479_878_042_021_722_5),
        (0.5, 0.572_364_942_924_700_087_07),
        (7.0 / 6.0, -0.075_026_034_149_814_540_285),
        (1.5, -0.120_782_237_635_245_222_35),
        (2.5, 0.284_682_870_472_919_159_63),
        (3.7, 1.428_072_326_665_387_921_9),
        (10.0, 12.801_827_480_081_469_611),
        (100.5, 361.435_540_467_777_621_56),
        (999.9, 5_904.529_702_692_284_005_7),
        (1000.0, 5_905.220_423_209_181_211_8),
    ];

    #[test]
    fn log_gamma_matches_reference_table() {
        for &(x, want) in LGAMMA_TABLE {
            let got = log_gamma(x).unwrap();
            assert!(rel(got, want) <= 1e-14, "x={x}: {got} vs {want}");
        }
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
    }

    #[test]
    fn log_gamma_rejects_bad_input() {
        for x in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(log_gamma(x), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn m_q_values() {
        assert!((m_q(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((m_q(1.0).unwrap() - 0.797_884_560_802_865_4).abs() < 1e-15);
        assert!(rel(m_q(4.0 / 3.0).unwrap(), 0.870_254_446_784_069_8) < 1e-14);
        assert!(m_q(0.5).is_err());
    }

    #[test]
    fn holder_pair_conjugacy() {
        let cube = HolderPair::from_q(1.0).unwrap();
        assert_eq!(cube.p(), Exponent::Infinity);
        assert_eq!(cube.p_reciprocal(), 0.0);
        let pair = HolderPair::from_p(Exponent::Finite(4.0)).unwrap();
        assert!((pair.q() - 4.0 / 3.0).abs() < 1e-15);
        let back = HolderPair::from_q(pair.q()).unwrap();
        match back.p() {
            Exponent::Finite(p) => assert!((p - 4.0).abs() < 1e-12),
            Exponent::Infinity => panic!("expected finite p"),
        }
        for q in [1.0, 1.2, 1.5, 1.9] {
            let h = HolderPair::from_q(q).unwrap();
            assert!((h.p_reciprocal() + 1.0 / h.q() - 1.0).abs() < 1e-15);
        }
        assert!(HolderPair::from_q(2.0).is_err());
        assert!(HolderPair::from_q(0.9).is_err());
        assert!(HolderPair::from_p(Exponent::Finite(2.0)).is_err());
        assert_eq!(HolderPair::from_p(Exponent::Finite(f64::INFINITY)).unwrap(), cube);
    }

    #[test]
    fn constants_two_dimensional_cube() {
        let c = constants(2, 1.0).unwrap();
        assert!(rel(c.a_kq, 2.0 / PI) < 1e-14);
        assert!(rel(c.delta_kq, 4.0 / PI) < 1e-14);
        assert!(rel(c.beta_kq, 4.0 / (PI * libm::sqrt(3.0))) < 1e-14);
        assert!(rel(c.omega_k, 2.0 * PI) < 1e-14);
        assert!(rel(c.abar_kq, core::f64::consts::FRAC_2_SQRT_PI) < 1e-14);
        assert!(rel(c.inner_bound(), 2.0 / PI * core::f64::consts::SQRT_2) < 1e-14);
    }

    #[test]
    fn constants_reference_rows() {
        let c = constants(3, 1.5).unwrap();
        assert!(rel(c.a_kq, 0.4) < 1e-14);
        assert!(rel(c.beta_kq, 0.895_520_317_982_206_99) < 1e-14);
        assert!(rel(c.abar_kq, 1.039_732_275_250_125_5) < 1e-14);
        let c = constants(5, 1.2).unwrap();
        assert!(rel(c.a_kq, 0.324_675_324_675_324_68) < 1e-14);
        assert!(rel(c.beta_kq, 0.823_820_054_669_160_11) < 1e-14);
        assert!(rel(c.omega_k, 26.318_945_069_571_623) < 1e-14);
    }

    #[test]
    fn constants_at_q_two() {
        for k in 1..=20 {
            let c = constants(k, 2.0).unwrap();
            assert!((c.a_kq * k as f64 - 1.0).abs() < 1e-12, "k={k}");
            assert!((c.beta_kq - 1.0).abs() < 1e-12, "k={k}");
        }
        assert!((constants(3, 2.0).unwrap().a_kq - 1.0 / 3.0).abs() < 1e-15);
        assert!((constants(5, 2.0).unwrap().beta_kq - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constants_domain() {
        assert!(constants(0, 1.0).is_err());
        assert!(constants(2, 2.5).is_err());
        assert!(constants(2, 0.99).is_err());
    }

    #[test]
    fn gamma_inequality_examples() {
        for x in [0.1, 0.5, 1.0, 3.3, 10.0] {
            assert!((gamma_inequality_lhs(x, x).unwrap() - 1.0).abs() < 1e-12);
        }
        let v = gamma_inequality_lhs(1.0, 2.0).unwrap();
        assert!(rel(v, 0.848_826_363_156_775_1) < 1e-13);
        let v = gamma_inequality_lhs(0.5, 5.0).unwrap();
        assert!(rel(v, 0.087_570_396_291_969_107) < 1e-13);
        assert!(v <= 1.0 - 1e-6);
        assert!(gamma_inequality_lhs(0.0, 1.0).is_err());
    }

    #[test]
    fn closed_exponent_examples() {
        let c = c_small_ball_closed(1, 1.0, 0.6).unwrap();
        assert!((c - (-0.236_616_976_410_718_1)).abs() < 1e-14);
        let b = constants(2, 1.0).unwrap().beta_kq;
        let c = c_small_ball_closed(2, 1.0, b).unwrap();
        assert!((c - (-0.098_612_288_668_109_691)).abs() < 1e-14);
        // β = 1/√2 = β_{1,1} sits exactly on the boundary.
        assert!(c_small_ball_closed(1, 1.0, core::f64::consts::FRAC_1_SQRT_2).is_ok());
        assert!(c_small_ball_closed(1, 1.0, 0.72).is_err());
        assert!(c_small_ball_closed(1, 2.0, 0.5).is_err());
        // k log β dominates as β → 0.
        let mut prev = 0.0;
        for e in 1..10 {
            let v = c_small_ball_closed(2, 1.0, libm::pow(10.0, -(e as f64))).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < -40.0);
    }
}
