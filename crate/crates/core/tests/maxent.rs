use shadows_core::maxent::{radial_moment, solve_inner, solve_small_ball, InnerOutcome, RadialDensity, Regime};
use shadows_core::specfun::{c_small_ball_closed, constants, log_gamma};

const KS: [usize; 4] = [1, 2, 3, 5];
const QS: [f64; 4] = [1.0, 1.2, 1.5, 1.8];

#[test]
fn closed_form_regime_matches_formula() {
    for k in KS {
        for q in QS {
            let c = constants(k, q).unwrap();
            for j in 1..=5 {
                let beta = c.beta_kq * j as f64 / 5.0;
                let s = solve_small_ball(k, q, beta).unwrap();
                assert_eq!(s.regime, Regime::ClosedForm);
                let closed = c_small_ball_closed(k, q, beta).unwrap();
                assert!((s.exponent - closed).abs() <= 1e-8 * closed.abs(), "{k} {q} {beta}");
                assert!(s.residuals.iter().all(|r| r.abs() < 1e-8));
                assert!((s.entropy - s.entropy_direct).abs() < 1e-8);
                assert!(s.exponent < 0.0);
            }
        }
    }
}

#[test]
fn exponent_continuous_and_monotone() {
    for k in KS {
        for q in QS {
            let c = constants(k, q).unwrap();
            let at_lower = solve_small_ball(k, q, c.beta_kq).unwrap().exponent;
            let above_lower = solve_small_ball(k, q, c.beta_kq * (1.0 + 1e-9)).unwrap();
            assert_eq!(above_lower.regime, Regime::Gap);
            assert!((above_lower.exponent - at_lower).abs() < 1e-6);
            let below_upper = solve_small_ball(k, q, c.m_q * (1.0 - 1e-9)).unwrap();
            assert_eq!(below_upper.regime, Regime::Gap);
            assert!(below_upper.exponent.abs() < 1e-6);
            assert_eq!(solve_small_ball(k, q, c.m_q).unwrap().exponent, 0.0);

            let mut last = f64::NEG_INFINITY;
            for j in 1..=24 {
                let beta = c.m_q * j as f64 / 24.0;
                let s = solve_small_ball(k, q, beta).unwrap();
                assert!(s.exponent >= last - 1e-12, "{k} {q} {beta}");
                assert!(s.exponent <= 0.0);
                assert_eq!(s.exponent == 0.0, s.regime == Regime::Gaussian);
                last = s.exponent;
            }
        }
    }
}

#[test]
fn entropy_identity_and_slackness_in_gap() {
    for k in KS {
        for q in QS {
            let c = constants(k, q).unwrap();
            for j in 1..=5 {
                let beta = c.beta_kq + (c.m_q - c.beta_kq) * j as f64 / 6.0;
                let s = solve_small_ball(k, q, beta).unwrap();
                assert_eq!(s.regime, Regime::Gap);
                assert!(s.lambda1() > 0.0 && s.lambda2() > 0.0);
                assert!((s.entropy - s.entropy_direct).abs() < 1e-8);
                assert!(s.residuals.iter().all(|r| r.abs() < 1e-8), "{:?}", s.residuals);
                let d = RadialDensity::new(k, q, s.lambda1(), s.lambda2()).unwrap();
                assert!((d.expect(|_| 1.0).unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn gaussian_fixed_point_profile() {
    for k in 1..=6 {
        for q in QS {
            let c = constants(k, q).unwrap();
            let s = solve_small_ball(k, q, c.m_q).unwrap();
            assert_eq!(s.regime, Regime::Gaussian);
            let kf = k as f64;
            let log_norm = log_gamma(kf / 2.0).unwrap() + (kf / 2.0) * std::f64::consts::LN_2;
            for i in 0..1000 {
                let r = 10.0 * i as f64 / 999.0;
                let expected = 2.0 * r.powi(k as i32 - 1) * (-r * r / 2.0 - log_norm).exp();
                assert!((s.density.pdf(r) - expected).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn second_constraint_becomes_tight_at_threshold() {
    // For k = 1 the closed-form maximiser meets E r² = 1 exactly at β_{1,q}.
    for q in [1.0, 1.1, 1.3, 1.5, 1.7, 1.9] {
        let c = constants(1, q).unwrap();
        let s = solve_small_ball(1, q, c.beta_kq).unwrap();
        assert!((s.moment_2 - 1.0).abs() < 1e-8);
        let below = solve_small_ball(1, q, c.beta_kq * 0.999).unwrap();
        assert!(below.moment_2 < 1.0);
    }
}

#[test]
fn inner_problem_behaviour() {
    let c = constants(2, 1.0).unwrap();
    let InnerOutcome::Solved(s) = solve_inner(2, 1.0, 0.9).unwrap() else {
        panic!("alpha = 0.9 should be feasible");
    };
    assert_eq!(s.regime, Regime::Inner);
    assert!(s.lambda1() < 0.0 && s.lambda2() > 0.0);
    assert!(s.exponent.is_finite() && s.exponent < 0.0);
    assert!(s.residuals.iter().all(|r| r.abs() < 1e-8), "{:?}", s.residuals);

    let mut last = 0.0;
    for j in 1..=8 {
        let alpha = c.m_q + (c.inner_bound() - c.m_q) * (1.0 - 0.5f64.powi(j));
        let InnerOutcome::Solved(s) = solve_inner(2, 1.0, alpha).unwrap() else {
            panic!("infeasible below the bound");
        };
        assert!(s.exponent < last);
        last = s.exponent;
    }
    assert!(matches!(solve_inner(2, 1.0, 0.95).unwrap(), InnerOutcome::Infeasible { .. }));
}

#[test]
fn radial_moment_examples() {
    assert!((radial_moment(0.0, 0.0, 0.5, 1.0).unwrap() - 1.253_314_137_315_500_3).abs() < 1e-15);
    assert!((radial_moment(1.0, 1.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
}
