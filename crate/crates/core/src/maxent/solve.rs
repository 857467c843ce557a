use super::radial::RadialDensity;
use crate::specfun::{constants, gaussian_entropy, lgamma, log_sphere_area, LibmExt, PaperConstants};
use crate::{Error, Result};

const NEWTON_TOL: f64 = 1e-14;
const ACCEPT_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 100;

/// Which branch of the maximum-entropy problem produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// No active constraint besides the covariance cap; the standard Gaussian.
    Gaussian,
    /// Only the `q`-moment constraint is active; generalised-gamma radial profile.
    ClosedForm,
    /// Both constraints active with positive multipliers.
    Gap,
    /// Inner-ball problem: `λ₁ < 0 < λ₂`.
    Inner,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Gaussian => "gaussian",
            Regime::ClosedForm => "closed_form",
            Regime::Gap => "gap",
            Regime::Inner => "inner",
        }
    }
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Solution of one radial maximum-entropy problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEntSolution {
    pub k: usize,
    pub q: f64,
    /// Ball radius `β` (small-ball problem) or `α` (inner problem).
    pub radius: f64,
    pub regime: Regime,
    pub density: RadialDensity,
    /// `∫ r^q v`.
    pub moment_q: f64,
    /// `∫ r² v`.
    pub moment_2: f64,
    /// Entropy on `R^k` from `log Z + λ₁ moment_q + λ₂ moment_2 + log ω_k`.
    pub entropy: f64,
    /// Same entropy by direct quadrature of `−∫ v log v + (k−1)∫ v log r + log ω_k`.
    pub entropy_direct: f64,
    /// `entropy − (k/2) log(2πe)`.
    pub exponent: f64,
    /// Complementary slackness products `(moment_q − r^q/a)λ₁` and `(moment_2 − k)λ₂`.
    pub residuals: [f64; 2],
    pub iterations: usize,
}

impl MaxEntSolution {
    pub fn lambda1(&self) -> f64 {
        self.density.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.density.lambda2
    }

    fn assemble(
        c: &PaperConstants,
        radius: f64,
        regime: Regime,
        density: RadialDensity,
        moment_q: f64,
        moment_2: f64,
        iterations: usize,
    ) -> Result<Self> {
        let k = c.k;
        let kf = k as f64;
        let log_omega = log_sphere_area(k);
        let (l1, l2) = (density.lambda1, density.lambda2);
        let (entropy, exponent) = if regime == Regime::Gaussian {
            (gaussian_entropy(k), 0.0)
        } else {
            let e = density.log_z + l1 * moment_q + l2 * moment_2 + log_omega;
            (e, e - gaussian_entropy(k))
        };
        let entropy_direct = density.expect(|r| {
            let log_r = if k == 1 || r <= 0.0 { 0.0 } else { r.ln_libm() };
            -density.log_pdf(r) + (kf - 1.0) * log_r
        })? + log_omega;
        let target_q = libm::pow(radius, c.q) / c.a_kq;
        let residuals = [(moment_q - target_q) * l1, (moment_2 - kf) * l2];
        Ok(MaxEntSolution {
            k,
            q: c.q,
            radius,
            regime,
            density,
            moment_q,
            moment_2,
            entropy,
            entropy_direct,
            exponent,
            residuals,
            iterations,
        })
    }
}

/// Result of the inner-ball problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerOutcome {
    Solved(MaxEntSolution),
    /// `α` is at or beyond `a_{k,q}^{1/q}√k`; no measure satisfies the constraints
    /// and the rate is infinite.
    Infeasible { bound: f64 },
}

fn check_kq(op: &'static str, k: usize, q: f64) -> Result<PaperConstants> {
    if !q.is_finite() || !(1.0..2.0).contains(&q) {
        return Err(Error::domain(op, "q must lie in [1, 2)"));
    }
    if k == 0 {
        return Err(Error::domain(op, "k must be at least 1"));
    }
    constants(k, q)
}

fn gaussian_solution(c: &PaperConstants, radius: f64) -> Result<MaxEntSolution> {
    let kf = c.k as f64;
    let log_z = lgamma(kf / 2.0) + (kf / 2.0 - 1.0) * core::f64::consts::LN_2;
    let density = RadialDensity {
        k: c.k,
        q: c.q,
        lambda1: 0.0,
        lambda2: 0.5,
        log_z,
    };
    // E r^q for the chi distribution with k degrees of freedom.
    let moment_q = libm::exp(0.5 * c.q * core::f64::consts::LN_2 + lgamma((kf + c.q) / 2.0) - lgamma(kf / 2.0));
    MaxEntSolution::assemble(c, radius, Regime::Gaussian, density, moment_q, kf, 0)
}

fn closed_form_solution(c: &PaperConstants, beta: f64) -> Result<MaxEntSolution> {
    let (kf, q) = (c.k as f64, c.q);
    let lambda1 = c.delta_kq / libm::pow(beta, q);
    let log_z = lgamma(kf / q) - q.ln_libm() - (kf / q) * lambda1.ln_libm();
    let density = RadialDensity {
        k: c.k,
        q,
        lambda1,
        lambda2: 0.0,
        log_z,
    };
    let moment_q = kf / (q * lambda1);
    let moment_2 = libm::exp(lgamma((kf + 2.0) / q) - lgamma(kf / q) - (2.0 / q) * lambda1.ln_libm());
    MaxEntSolution::assemble(c, beta, Regime::ClosedForm, density, moment_q, moment_2, 0)
}

/// Both constraints as equalities, in log-multipliers `x = (log|λ₁|, log λ₂)` with
/// `λ₁ = sign · e^{x₀}`.
struct TwoConstraint {
    k: usize,
    q: f64,
    sign: f64,
    log_target_q: f64,
    log_target_2: f64,
}

struct Evaluation {
    f: [f64; 2],
    jac: Option<[[f64; 2]; 2]>,
    density: RadialDensity,
    moment_q: f64,
    moment_2: f64,
}

impl TwoConstraint {
    fn new(c: &PaperConstants, radius: f64, sign: f64) -> Self {
        TwoConstraint {
            k: c.k,
            q: c.q,
            sign,
            log_target_q: c.q * radius.ln_libm() - c.a_kq.ln_libm(),
            log_target_2: (c.k as f64).ln_libm(),
        }
    }

    fn multipliers(&self, x: [f64; 2]) -> (f64, f64) {
        (self.sign * libm::exp(x[0]), libm::exp(x[1]))
    }

    fn residual(&self, x: [f64; 2]) -> Result<([f64; 2], RadialDensity, f64, f64)> {
        let (l1, l2) = self.multipliers(x);
        let d = RadialDensity::new(self.k, self.q, l1, l2)?;
        let mq = d.moment(self.q)?;
        let m2 = d.moment(2.0)?;
        Ok(([mq.ln_libm() - self.log_target_q, m2.ln_libm() - self.log_target_2], d, mq, m2))
    }

    fn evaluate(&self, x: [f64; 2]) -> Result<Evaluation> {
        PROBE_EVALS.fetch_add(1, core::sync::atomic::Ordering::Relaxed);
        let (f, d, mq, m2) = self.residual(x)?;
        Ok(Evaluation {
            f,
            jac: None,
            density: d,
            moment_q: mq,
            moment_2: m2,
        })
    }

    fn jacobian(&self, ev: &Evaluation) -> Result<[[f64; 2]; 2]> {
        let d = &ev.density;
        let (q, mq, m2) = (self.q, ev.moment_q, ev.moment_2);
        let m2q = d.moment(2.0 * q)?;
        let mq2 = d.moment(q + 2.0)?;
        let m4 = d.moment(4.0)?;
        let (l1, l2) = (d.lambda1, d.lambda2);
        // d log E[r^p] / d λ = −Cov(r^p, r^s)/E[r^p] for λ multiplying r^s; the chain
        // rule to log-multipliers contributes a factor λ.
        Ok([
            [-l1 * (m2q / mq - mq), -l2 * (mq2 / mq - m2)],
            [-l1 * (mq2 / m2 - mq), -l2 * (m4 / m2 - m2)],
        ])
    }
}

fn sup_norm(f: [f64; 2]) -> f64 {
    f[0].abs().max(f[1].abs())
}

struct Converged {
    density: RadialDensity,
    moment_q: f64,
    moment_2: f64,
    iterations: usize,
}

pub static PROBE_EVALS: core::sync::atomic::AtomicUsize = core::sync::atomic::AtomicUsize::new(0);
pub static PROBE_NEWTON: core::sync::atomic::AtomicUsize = core::sync::atomic::AtomicUsize::new(0);
fn newton(sys: &TwoConstraint, mut x: [f64; 2]) -> Result<Converged> {
    PROBE_NEWTON.fetch_add(1, core::sync::atomic::Ordering::Relaxed);
    let mut ev = sys.evaluate(x)?;
    let mut norm = sup_norm(ev.f);
    let mut iterations = 0;
    while norm >= NEWTON_TOL && iterations < MAX_NEWTON {
        iterations += 1;
        let [[a, b], [c, d]] = match ev.jac {
            Some(j) => j,
            None => sys.jacobian(&ev)?,
        };
        let det = a * d - b * c;
        if !(det.abs() > 0.0) || !det.is_finite() {
            break;
        }
        let mut step = [(-ev.f[0] * d + ev.f[1] * b) / det, (ev.f[0] * c - ev.f[1] * a) / det];
        let len = sup_norm(step);
        if len > 2.0 {
            step = [2.0 * step[0] / len, 2.0 * step[1] / len];
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..20 {
            let trial = [x[0] + t * step[0], x[1] + t * step[1]];
            if let Ok(next) = sys.evaluate(trial) {
                if sup_norm(next.f) < norm {
                    accepted = Some((trial, next));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((trial, next)) = accepted else { break };
        let new_norm = sup_norm(next.f);
        x = trial;
        ev = next;
        // Below the acceptance level a step that no longer halves the residual means
        // quadrature noise has been reached.
        let stalled = new_norm < ACCEPT_TOL && new_norm > 0.5 * norm;
        norm = new_norm;
        if stalled {
            break;
        }
    }
    if norm < ACCEPT_TOL {
        return Ok(Converged {
            density: ev.density,
            moment_q: ev.moment_q,
            moment_2: ev.moment_2,
            iterations,
        });
    }
    Err(Error::NoConvergence {
        iterations,
        residuals: ev.f,
    })
}

/// `λ₂ = e^z` meeting the second-moment constraint for a fixed `λ₁`, and the
/// remaining `q`-residual.
struct Profile {
    z: f64,
    f_q: f64,
    density: RadialDensity,
    moment_q: f64,
    moment_2: f64,
}

impl Profile {
    /// Starting `log λ₂` for a new `λ₁`. With `λ₁ < 0` the ratio `λ₂/|λ₁|` is kept,
    /// which fixes where the Gaussian factor overtakes the growing one; with
    /// `λ₁ > 0` the sum `λ₁ + λ₂` is kept.
    fn guess(&self, lambda1: f64) -> f64 {
        let old = self.density.lambda1;
        if old < 0.0 && lambda1 < 0.0 {
            return self.z + (lambda1 / old).ln_libm();
        }
        let l2 = self.density.lambda2 + old - lambda1;
        if l2 > 0.0 {
            l2.ln_libm()
        } else {
            self.z
        }
    }
}

impl TwoConstraint {
    /// Safeguarded Newton in `z`; `log E r² − log k` decreases in `z`.
    fn profile(&self, lambda1: f64, z_guess: f64) -> Result<Profile> {
        let eval = |z: f64| -> Result<(f64, RadialDensity, f64)> {
            let d = RadialDensity::new(self.k, self.q, lambda1, libm::exp(z))?;
            let m2 = d.moment(2.0)?;
            if !(m2 > 0.0 && m2.is_finite()) {
                return Err(Error::Quadrature { rel_error: f64::NAN });
            }
            Ok((m2.ln_libm() - self.log_target_2, d, m2))
        };
        // A larger λ₂ always tames the tail, so a failed first evaluation moves up.
        let mut z = z_guess;
        let mut tries = 0;
        let (mut g, mut d, mut m2) = loop {
            match eval(z) {
                Ok(v) => break v,
                Err(e) if tries >= 40 => return Err(e),
                Err(_) => {
                    tries += 1;
                    z += 1.0;
                }
            }
        };
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut step = 1.0;
        for _ in 0..MAX_NEWTON {
            if g.abs() < NEWTON_TOL {
                break;
            }
            if g > 0.0 {
                lo = z;
            } else {
                hi = z;
            }
            let slope = -d.lambda2 * (d.moment(4.0)? / m2 - m2);
            let mut next = z - g / slope;
            if !(next > lo && next < hi) {
                next = match (lo.is_finite(), hi.is_finite()) {
                    (true, true) => 0.5 * (lo + hi),
                    (true, false) => lo + step,
                    _ => hi - step,
                };
                step *= 2.0;
            }
            if (next - z).abs() <= 4.0 * f64::EPSILON * z.abs().max(1.0) {
                break;
            }
            // Pull back toward the last good point while quadrature fails.
            let mut tries = 0;
            let trial = loop {
                match eval(next) {
                    Ok(v) => break v,
                    Err(e) if tries >= 40 => return Err(e),
                    Err(_) => {
                        tries += 1;
                        next = 0.5 * (z + next);
                        if next > z { hi = hi.min(2.0 * next - z) } else { lo = lo.max(2.0 * next - z) }
                    }
                }
            };
            z = next;
            (g, d, m2) = trial;
        }
        if !(g.abs() < accept_tol(&d)) {
            return Err(Error::NoConvergence {
                iterations: MAX_NEWTON,
                residuals: [f64::NAN, g],
            });
        }
        let mq = d.moment(self.q)?;
        Ok(Profile {
            z,
            f_q: mq.ln_libm() - self.log_target_q,
            density: d,
            moment_q: mq,
            moment_2: m2,
        })
    }
}

// Large multipliers cancel in the exponent; residuals cannot beat that noise.
fn accept_tol(d: &RadialDensity) -> f64 {
    ACCEPT_TOL.max(64.0 * f64::EPSILON * (d.lambda1.abs() + d.lambda2.abs()) * d.k as f64)
}

/// Root of `f` in the bracket `[a, b]` by the Illinois variant of regula falsi.
fn illinois<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> Result<f64> {
    let mut side = 0;
    for _ in 0..4 * MAX_NEWTON {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = f(c)?;
        if fc.abs() < NEWTON_TOL || (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            return Ok(c);
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}

/// One-dimensional reduction: for each trial `λ₁ = λ(t)` the second-moment
/// constraint fixes `λ₂`, leaving a scalar root in `t` bracketed by `[a, b]`.
fn reduced_solve<L: Fn(f64) -> f64>(
    sys: &TwoConstraint,
    lambda: L,
    (a, fa): (f64, f64),
    (b, fb): (f64, f64),
    z_guess: f64,
) -> Result<Converged> {
    let mut last: Option<(f64, Profile)> = None;
    let mut evaluations = 0;
    let t = illinois(
        |t| {
            evaluations += 1;
            let z = last.as_ref().map_or(z_guess, |(_, p)| p.guess(lambda(t)));
            let p = sys.profile(lambda(t), z)?;
            let f = p.f_q;
            last = Some((t, p));
            Ok(f)
        },
        a,
        fa,
        b,
        fb,
    )?;
    let p = match last {
        Some((at, p)) if at == t => p,
        Some((_, p)) => sys.profile(lambda(t), p.guess(lambda(t)))?,
        None => sys.profile(lambda(t), z_guess)?,
    };
    if !(p.f_q.abs() < accept_tol(&p.density)) {
        return Err(Error::NoConvergence {
            iterations: evaluations,
            residuals: [p.f_q, 0.0],
        });
    }
    Ok(Converged {
        density: p.density,
        moment_q: p.moment_q,
        moment_2: p.moment_2,
        iterations: evaluations,
    })
}

/// Gap regime on `λ₁ ∈ [0, δ/β_{k,q}^q]`; both end values of the `q`-residual are
/// explicit (Gaussian and closed-form limits).
fn gap_reduced(c: &PaperConstants, sys: &TwoConstraint, beta: f64) -> Result<Converged> {
    let top = c.delta_kq / libm::pow(c.beta_kq, c.q);
    let q_log = |r: f64| c.q * (r / beta).ln_libm();
    let guess = gap_initial_guess(c, beta)[1];
    reduced_solve(sys, |t| t, (0.0, q_log(c.m_q)), (top, q_log(c.beta_kq)), guess)
}

fn gap_initial_guess(c: &PaperConstants, beta: f64) -> [f64; 2] {
    let t = (beta - c.beta_kq) / (c.m_q - c.beta_kq);
    let lambda1 = c.delta_kq / libm::pow(c.beta_kq, c.q) * (1.0 - t);
    let lambda2 = 0.5 * t;
    [lambda1.ln_libm(), lambda2.ln_libm()]
}

fn solve_gap(c: &PaperConstants, beta: f64) -> Result<MaxEntSolution> {
    let sys = TwoConstraint::new(c, beta, 1.0);
    let sol = match newton(&sys, gap_initial_guess(c, beta)) {
        Ok(s) => s,
        Err(_) => gap_reduced(c, &sys, beta)?,
    };
    MaxEntSolution::assemble(c, beta, Regime::Gap, sol.density, sol.moment_q, sol.moment_2, sol.iterations)
}

/// Exponent of the small-ball problem `sup Ent` subject to `a ∫ r^q v ≤ β^q` and
/// `∫ r² v ≤ k`.
///
/// - `β ≥ m_q`: the standard Gaussian, exponent exactly 0;
/// - `β ≤ β_{k,q}`: only the `q`-moment constraint binds and the solution is explicit;
/// - otherwise both constraints bind and the multipliers are found numerically.
pub fn solve_small_ball(k: usize, q: f64, beta: f64) -> Result<MaxEntSolution> {
    let c = check_kq("solve_small_ball", k, q)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain("solve_small_ball", "beta must be positive and finite"));
    }
    if beta >= c.m_q {
        gaussian_solution(&c, beta)
    } else if beta <= c.beta_kq * (1.0 + 1e-12) {
        closed_form_solution(&c, beta)
    } else {
        solve_gap(&c, beta)
    }
}

/// Maximum-entropy problem behind `P[αB ⊆ Z]`: the `q`-moment constraint reversed,
/// so `λ₁ ≤ 0`.
pub fn solve_inner(k: usize, q: f64, alpha: f64) -> Result<InnerOutcome> {
    let c = check_kq("solve_inner", k, q)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain("solve_inner", "alpha must be positive and finite"));
    }
    let bound = c.inner_bound();
    if alpha >= bound {
        return Ok(InnerOutcome::Infeasible { bound });
    }
    if alpha <= c.m_q {
        return Ok(InnerOutcome::Solved(gaussian_solution(&c, alpha)?));
    }
    let sol = inner_reduced(&c, alpha)?;
    Ok(InnerOutcome::Solved(MaxEntSolution::assemble(
        &c,
        alpha,
        Regime::Inner,
        sol.density,
        sol.moment_q,
        sol.moment_2,
        sol.iterations,
    )?))
}

/// Linear response of the Gaussian to a small push of the `q`-moment target.
/// Inner regime in `t = log(−λ₁)`. As `t → −∞` the solution tends to the Gaussian,
/// whose `q`-residual is explicit; a sign change is bracketed by stepping `t`.
fn inner_reduced(c: &PaperConstants, alpha: f64) -> Result<Converged> {
    let sys = TwoConstraint::new(c, alpha, -1.0);
    let lambda = |t: f64| -libm::exp(t);
    let at_gaussian = c.q * (c.m_q / alpha).ln_libm();
    // Net quadratic coefficient near the Gaussian value ½ at λ₁ = −1.
    let first = sys.profile(-1.0, 1.5f64.ln_libm())?;
    let (lo, hi, z) = if first.f_q > 0.0 {
        let hi = (0.0, first.f_q);
        let mut prev = first;
        let mut t = 0.0;
        let mut step = 1.0;
        loop {
            t -= step;
            step *= 2.0;
            if t < -700.0 {
                break ((t, at_gaussian), hi, prev.z);
            }
            let p = sys.profile(lambda(t), prev.guess(lambda(t)))?;
            if p.f_q <= 0.0 {
                break ((t, p.f_q), hi, p.z);
            }
            prev = p;
        }
    } else {
        // Upward steps stay unit-sized: very large |λ₁| makes the quadrature stiff.
        let mut lo = (0.0, first.f_q);
        let mut prev = first;
        let mut t = 0.0;
        loop {
            t += 1.0;
            let p = sys.profile(lambda(t), prev.guess(lambda(t)))?;
            if p.f_q > 0.0 {
                break (lo, (t, p.f_q), p.z);
            }
            if t >= 100.0 {
                return Err(Error::NoConvergence {
                    iterations: 100,
                    residuals: [p.f_q, 0.0],
                });
            }
            lo = (t, p.f_q);
            prev = p;
        }
    };
    reduced_solve(&sys, lambda, lo, hi, z)
}
