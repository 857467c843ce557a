use shadows_core::geometry::make_grid;
use shadows_core::sampling::{projection_body, smallball_probability, stiefel_frame, w_statistic};
use shadows_core::specfun::{m_q, Exponent};
use shadows_core::{HolderPair, SeedSpec};

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn frames_reproduce_bitwise() {
    let s = SeedSpec::with_path(5, &[1, 2, 3]);
    assert_eq!(stiefel_frame(60, 3, &s).unwrap(), stiefel_frame(60, 3, &s).unwrap());
    assert_ne!(
        stiefel_frame(60, 3, &s).unwrap(),
        stiefel_frame(60, 3, &s.child(0)).unwrap()
    );
}

#[test]
fn first_row_second_moment() {
    let n = 100;
    let xs: Vec<f64> = (0..10_000)
        .map(|i| {
            let f = stiefel_frame(n, 2, &SeedSpec::with_path(1, &[i])).unwrap();
            let v = &f.matrix()[..2];
            n as f64 * (v[0] * v[0] + v[1] * v[1])
        })
        .collect();
    let (m, se) = mean_stderr(&xs);
    assert!((m - 2.0).abs() < 3.0 * se, "{m} {se}");
}

#[test]
fn rotation_invariance_in_mean() {
    let pair = HolderPair::from_p(Exponent::Finite(3.0)).unwrap();
    let (c, s) = (0.6f64, 0.8f64);
    let u = [1.0, 0.0];
    let ou = [c * u[0] - s * u[1], s * u[0] + c * u[1]];
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..2000 {
        let z = projection_body(50, 2, pair, &SeedSpec::with_path(2, &[i])).unwrap();
        a.push(z.support(&u).unwrap());
        let z = projection_body(50, 2, pair, &SeedSpec::with_path(3, &[i])).unwrap();
        b.push(z.support(&ou).unwrap());
    }
    let (ma, sa) = mean_stderr(&a);
    let (mb, sb) = mean_stderr(&b);
    assert!((ma - mb).abs() < 3.0 * (sa * sa + sb * sb).sqrt());
}

#[test]
fn lyapunov_containment() {
    let grid = make_grid(2, 720, &SeedSpec::new(0)).unwrap();
    for (i, p) in [Exponent::Infinity, Exponent::Finite(3.0), Exponent::Finite(10.0)].into_iter().enumerate() {
        let pair = HolderPair::from_p(p).unwrap();
        for r in 0..20 {
            let z = projection_body(64, 2, pair, &SeedSpec::with_path(4, &[i as u64, r])).unwrap();
            for u in grid.iter() {
                assert!(z.support(u).unwrap() <= 1.0 + 1e-10);
            }
        }
    }
}

#[test]
fn w_statistic_law_of_large_numbers() {
    let pair = HolderPair::cube();
    let xs: Vec<f64> = (0..1000)
        .map(|i| w_statistic(10_000, pair, &SeedSpec::with_path(6, &[i])).unwrap())
        .collect();
    let (m, se) = mean_stderr(&xs);
    let target = m_q(1.0).unwrap();
    assert!((m - target).abs() < 3.0 * se, "{m} {se} {target}");
}

#[test]
fn smallball_with_large_radius() {
    let grid = make_grid(2, 256, &SeedSpec::new(0)).unwrap();
    let pair = HolderPair::from_p(Exponent::Finite(4.0)).unwrap();
    let beta = 1.1 * m_q(pair.q()).unwrap();
    let (p, _, _) = smallball_probability(2000, 2, pair, beta, 40, &grid, &SeedSpec::new(12)).unwrap();
    assert_eq!(p, 1.0);
}
