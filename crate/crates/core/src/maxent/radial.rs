use crate::quadrature::{integrate_panels, integrate_to_infinity};
use crate::specfun::{lgamma, LibmExt};
use crate::{Error, Result};

const REL_TOL: f64 = 1e-13;

fn check_integrable(lambda1: f64, lambda2: f64) -> Result<()> {
    let ok = lambda1.is_finite()
        && lambda2.is_finite()
        && (lambda2 > 0.0 || (lambda2 == 0.0 && lambda1 > 0.0));
    if ok {
        Ok(())
    } else {
        Err(Error::domain(
            "radial_moment",
            "need lambda2 > 0, or lambda2 = 0 with lambda1 > 0",
        ))
    }
}

/// Log-integrand `φ(r) = a log r − λ₁ r^q − λ₂ r²` of a radial moment.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Exponential {
    pub a: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub q: f64,
}

impl Exponential {
    pub fn phi(&self, r: f64) -> f64 {
        let log_part = if self.a == 0.0 { 0.0 } else { self.a * r.ln_libm() };
        log_part - self.lambda1 * libm::pow(r, self.q) - self.lambda2 * r * r
    }

    // r φ'(r); it changes sign at most once on (0, ∞).
    fn scaled_slope(&self, r: f64) -> f64 {
        self.a - self.q * self.lambda1 * libm::pow(r, self.q) - 2.0 * self.lambda2 * r * r
    }

    fn curvature(&self, r: f64) -> f64 {
        -self.a / (r * r) - self.q * (self.q - 1.0) * self.lambda1 * libm::pow(r, self.q - 2.0) - 2.0 * self.lambda2
    }

    /// Location of the maximum of `φ` on `[0, ∞)`.
    pub fn mode(&self) -> f64 {
        let mut hi = 1.0;
        let mut lo;
        if self.scaled_slope(hi) > 0.0 {
            lo = hi;
            while self.scaled_slope(hi) > 0.0 {
                lo = hi;
                hi *= 2.0;
                if hi > 1e300 {
                    return hi;
                }
            }
        } else {
            lo = 0.5;
            while !(self.scaled_slope(lo) > 0.0) {
                hi = lo;
                lo *= 0.5;
                if lo < 1e-300 {
                    return 0.0;
                }
            }
        }
        for _ in 0..200 {
            let mid = libm::sqrt(lo * hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.scaled_slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Characteristic width of the peak at `s`.
    pub fn width(&self, s: f64) -> f64 {
        if s > 0.0 {
            let c = self.curvature(s);
            if c < 0.0 && c.is_finite() {
                return 1.0 / libm::sqrt(-c);
            }
        }
        let mut w = f64::INFINITY;
        if self.lambda1 > 0.0 {
            w = w.min(libm::pow(self.lambda1, -1.0 / self.q));
        }
        if self.lambda2 > 0.0 {
            w = w.min(1.0 / libm::sqrt(self.lambda2));
        }
        if w.is_finite() {
            w
        } else {
            1.0
        }
    }

    /// `(log ∫₀^∞ g(r) e^{φ(r)} dr)` parts: returns `(φ(s), ∫ g e^{φ−φ(s)})`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> Result<(f64, f64)> {
        let s = self.mode();
        let w = self.width(s);
        let peak = if s > 0.0 { self.phi(s) } else { self.phi_at_zero() };
        // Terms of φ this large cancel to noise near the peak.
        let scale = self.lambda1.abs() * libm::pow(s, self.q) + self.lambda2.abs() * s * s;
        if !(scale * f64::EPSILON < 1e-6) {
            return Err(Error::Quadrature { rel_error: scale * f64::EPSILON });
        }
        let rel_tol = REL_TOL.max(64.0 * scale * f64::EPSILON);
        let f = |r: f64| {
            if r <= 0.0 {
                return if self.a == 0.0 { g(0.0) * libm::exp(-peak) } else { 0.0 };
            }
            g(r) * libm::exp(self.phi(r) - peak)
        };
        let abs_tol = 1e-16 * w;
        let mut total = 0.0;
        if s > 0.0 {
            let cut = s - 8.0 * w;
            let left = if cut > 0.0 {
                integrate_panels(&f, &[0.0, cut, s], rel_tol, abs_tol)?
            } else {
                integrate_panels(&f, &[0.0, s], rel_tol, abs_tol)?
            };
            total += left.value;
        }
        total += integrate_to_infinity(f, s, w, rel_tol, abs_tol)?.value;
        Ok((peak, total))
    }

    fn phi_at_zero(&self) -> f64 {
        // With the mode at zero and a > 0 the integrand vanishes there; use the
        // value at a tiny radius so the shift stays finite.
        if self.a == 0.0 {
            0.0
        } else {
            self.phi(1e-300)
        }
    }
}

/// `log ∫₀^∞ r^a exp(−λ₁ r^q − λ₂ r²) dr`.
pub fn log_radial_moment(a: f64, lambda1: f64, lambda2: f64, q: f64) -> Result<f64> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::domain("radial_moment", "a must be nonnegative"));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::domain("radial_moment", "q must be finite and at least 1"));
    }
    check_integrable(lambda1, lambda2)?;
    if lambda1 == 0.0 {
        let s = (a + 1.0) / 2.0;
        return Ok(lgamma(s) - 2.0f64.ln_libm() - s * lambda2.ln_libm());
    }
    if lambda2 == 0.0 {
        let s = (a + 1.0) / q;
        return Ok(lgamma(s) - q.ln_libm() - s * lambda1.ln_libm());
    }
    let e = Exponential { a, lambda1, lambda2, q };
    let (peak, rest) = e.integrate(|_| 1.0)?;
    Ok(peak + rest.ln_libm())
}

/// `∫₀^∞ r^a exp(−λ₁ r^q − λ₂ r²) dr`, in closed form when one multiplier vanishes
/// and by adaptive quadrature otherwise.
pub fn radial_moment(a: f64, lambda1: f64, lambda2: f64, q: f64) -> Result<f64> {
    Ok(libm::exp(log_radial_moment(a, lambda1, lambda2, q)?))
}

/// Radial profile `v(r) = r^{k−1} exp(−λ₁ r^q − λ₂ r²)/Z` of a rotation-invariant
/// density on `R^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDensity {
    pub k: usize,
    pub q: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `log Z`.
    pub log_z: f64,
}

impl RadialDensity {
    /// Normalised density for the given multipliers.
    pub fn new(k: usize, q: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("RadialDensity::new", "k must be at least 1"));
        }
        let log_z = log_radial_moment(k as f64 - 1.0, lambda1, lambda2, q)?;
        Ok(RadialDensity {
            k,
            q,
            lambda1,
            lambda2,
            log_z,
        })
    }

    pub fn normalizer(&self) -> f64 {
        libm::exp(self.log_z)
    }

    pub fn pdf(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let radial = libm::pow(r, self.k as f64 - 1.0);
        radial * libm::exp(-self.lambda1 * libm::pow(r, self.q) - self.lambda2 * r * r - self.log_z)
    }

    /// `log v(r)` for `r > 0`.
    pub fn log_pdf(&self, r: f64) -> f64 {
        (self.k as f64 - 1.0) * r.ln_libm() - self.lambda1 * libm::pow(r, self.q) - self.lambda2 * r * r - self.log_z
    }

    /// `E[r^p]`.
    pub fn moment(&self, p: f64) -> Result<f64> {
        let log_m = log_radial_moment(self.k as f64 - 1.0 + p, self.lambda1, self.lambda2, self.q)?;
        Ok(libm::exp(log_m - self.log_z))
    }

    /// `∫ g(r) v(r) dr` by quadrature.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        let e = Exponential {
            a: self.k as f64 - 1.0,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            q: self.q,
        };
        let (peak, rest) = e.integrate(g)?;
        Ok(rest * libm::exp(peak - self.log_z))
    }
}
