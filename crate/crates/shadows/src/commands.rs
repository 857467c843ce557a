//! Subcommand implementations.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use shadows_core::geometry::{hausdorff, make_grid, mean_width, volume2d};
use shadows_core::maxent::{onedim_rate, solve_inner, solve_small_ball, InnerOutcome, MaxEntSolution, Regime};
use shadows_core::sampling::{projection_body, section_body, smallball_replicate, w_statistic, Tally};
use shadows_core::specfun::{constants, gamma_inequality_lhs, m_q};
use shadows_core::{SeedSpec, SymmetricBody};

use crate::config::{Command, ExperimentConfig, Radius};
use crate::output::{body_table, grid_table, num, Artifacts, Table};
use crate::records::{solution_json, Assertion, ExperimentRecord};
use crate::HarnessError;

type Result<T> = std::result::Result<T, HarnessError>;

/// Everything a run produced, before it is written to disk.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub records: Vec<ExperimentRecord>,
    pub solutions: Vec<Value>,
    pub assertions: Vec<Assertion>,
    #[serde(skip)]
    pub artifacts: Artifacts,
}

impl RunReport {
    fn new(cfg: &ExperimentConfig) -> Self {
        RunReport {
            command: cfg.command.to_string(),
            config: cfg.to_map(),
            records: Vec::new(),
            solutions: Vec::new(),
            assertions: Vec::new(),
            artifacts: Artifacts::default(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion::new(name, passed, detail));
    }
}

/// Runs the configured command. Files are not written here; see
/// [`RunReport::artifacts`] and [`crate::output`].
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let mut report = RunReport::new(cfg);
    match cfg.command {
        Command::Constants => run_constants(cfg, &mut report)?,
        Command::GammaCheck => run_gamma_check(cfg, &mut report)?,
        Command::Converge => run_converge(cfg, &mut report)?,
        Command::MeanWidth => run_meanwidth(cfg, &mut report)?,
        Command::SmallBallMc => run_smallball(cfg, &mut report)?,
        Command::Exponent => run_exponent(cfg, &mut report)?,
        Command::SectionVolume => run_section_volume(cfg, &mut report)?,
        Command::OneDim => run_onedim(cfg, &mut report)?,
    }
    Ok(report)
}

fn seed(cfg: &ExperimentConfig, path: &[u64]) -> SeedSpec {
    let mut full = vec![cfg.command.stream_id()];
    full.extend_from_slice(path);
    SeedSpec::with_path(cfg.master_seed, &full)
}

fn base_record(cfg: &ExperimentConfig, seed: &SeedSpec) -> ExperimentRecord {
    ExperimentRecord::new(cfg.command.as_str(), seed.to_string())
        .param("k", cfg.k)
        .param("p", cfg.exponent.p_label())
        .param("q", cfg.exponent.q())
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

fn run_constants(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let q = cfg.exponent.q();
    let mut t = Table::new(&[
        "k", "q", "m_q", "a_kq", "omega_k", "delta_kq", "beta_kq", "abar_kq", "inner_bound",
    ]);
    let mut ok_order = true;
    let mut ok_limits = true;
    for k in 1..=cfg.k {
        let c = constants(k, q)?;
        t.push(vec![
            k.to_string(),
            num(q),
            num(c.m_q),
            num(c.a_kq),
            num(c.omega_k),
            num(c.delta_kq),
            num(c.beta_kq),
            num(c.abar_kq),
            num(c.inner_bound()),
        ]);
        if q < 2.0 {
            ok_order &= c.beta_kq < c.m_q && c.abar_kq > 1.0;
        } else {
            ok_limits &= (c.a_kq * k as f64 - 1.0).abs() < 1e-12 && (c.beta_kq - 1.0).abs() < 1e-12;
        }
        let s = seed(cfg, &[k as u64]);
        let mut r = base_record(cfg, &s).param("k", k);
        r.estimate = c.beta_kq;
        r.parameters.insert("m_q".into(), c.m_q.into());
        report.records.push(r);
    }
    report.check("beta_kq < m_q and abar_kq > 1", ok_order, format!("q = {q}"));
    report.check("a_k2 = 1/k and beta_k2 = 1", ok_limits, format!("q = {q}"));
    report.artifacts.add("constants.csv", t);
    Ok(())
}

fn run_gamma_check(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let side = cfg.samples.unwrap_or(50).max(2);
    let pts: Vec<f64> = (0..side)
        .map(|i| 0.1 * 100f64.powf(i as f64 / (side - 1) as f64))
        .collect();
    let mut t = Table::new(&["x", "y", "value"]);
    let mut max_value = f64::NEG_INFINITY;
    let mut diag_dev = 0.0f64;
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate() {
            let v = gamma_inequality_lhs(x, y)?;
            max_value = max_value.max(v);
            if i == j {
                diag_dev = diag_dev.max((v - 1.0).abs());
            }
            t.push(vec![num(x), num(y), num(v)]);
        }
    }
    let mut r = ExperimentRecord::new(cfg.command.as_str(), seed(cfg, &[]).to_string()).param("grid_side", side);
    r.estimate = max_value - 1.0;
    r.upper = Some(diag_dev);
    report.records.push(r);
    report.check(
        "gamma inequality max <= 1 + 1e-12",
        max_value <= 1.0 + 1e-12,
        format!("max violation {:e}", max_value - 1.0),
    );
    report.check(
        "gamma inequality diagonal = 1",
        diag_dev <= 1e-12,
        format!("max diagonal deviation {diag_dev:e}"),
    );
    report.artifacts.add("gamma_check.csv", t);
    Ok(())
}

fn run_converge(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let pair = cfg.exponent.pair()?;
    let q = pair.q();
    let grid = make_grid(cfg.k, cfg.grid_resolution, &seed(cfg, &[0]))?;
    let target = SymmetricBody::ball(cfg.k, m_q(q)?)?;
    let mut t = Table::new(&["n", "median_dH", "q25", "q75", "replicates", "seed"]);
    let mut medians = Vec::new();
    for &n in &cfg.n_schedule {
        let start = Instant::now();
        let s = seed(cfg, &[n as u64]);
        let est: Vec<(f64, f64)> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                let body = projection_body(n, cfg.k, pair, &s.child(r))?;
                let h = hausdorff(&body, &target, &grid)?;
                Ok((h.estimate, h.estimate + h.error_bound))
            })
            .collect::<Result<_>>()?;
        let mut lo: Vec<f64> = est.iter().map(|e| e.0).collect();
        let mut hi: Vec<f64> = est.iter().map(|e| e.1).collect();
        lo.sort_by(f64::total_cmp);
        hi.sort_by(f64::total_cmp);
        let med = quantile(&lo, 0.5);
        medians.push(med);
        t.push(vec![
            n.to_string(),
            num(med),
            num(quantile(&lo, 0.25)),
            num(quantile(&lo, 0.75)),
            cfg.replicates.to_string(),
            s.to_string(),
        ]);
        let mut r = base_record(cfg, &s)
            .param("n", n)
            .param("grid_resolution", cfg.grid_resolution)
            .param("certified", grid.certified());
        r.estimate = med;
        r.lower = Some(med);
        r.upper = Some(quantile(&hi, 0.5));
        r.replicates = cfg.replicates;
        r.wall_time_s = start.elapsed().as_secs_f64();
        report.records.push(r);
    }
    report.check(
        "median Hausdorff distance strictly decreasing in n",
        medians.windows(2).all(|w| w[1] < w[0]),
        format!("{medians:?}"),
    );
    if let (Some(&n_last), Some(&last)) = (cfg.n_schedule.last(), medians.last()) {
        if n_last >= 10_000 {
            report.check(
                format!("median Hausdorff distance < 0.05 at n = {n_last}"),
                last < 0.05,
                format!("{last}"),
            );
        }
    }
    report.artifacts.add("converge.csv", t);
    report.artifacts.add("grid.csv", grid_table(&grid));
    Ok(())
}

fn run_meanwidth(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let pair = cfg.exponent.pair()?;
    let target = m_q(pair.q())?;
    let samples = cfg.samples.unwrap_or(1000);
    let mut t = Table::new(&["n", "estimate", "stderr", "replicates", "m_q", "rel_error", "seed"]);
    let mut last_rel = f64::NAN;
    for &n in &cfg.n_schedule {
        let start = Instant::now();
        let s = seed(cfg, &[n as u64]);
        let widths: Vec<f64> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                let rs = s.child(r);
                let body = projection_body(n, cfg.k, pair, &rs)?;
                Ok(mean_width(&body, samples, &rs.child(0))?.0)
            })
            .collect::<Result<_>>()?;
        let (mean, se) = mean_stderr(&widths);
        last_rel = (mean / target - 1.0).abs();
        t.push(vec![
            n.to_string(),
            num(mean),
            num(se),
            cfg.replicates.to_string(),
            num(target),
            num(last_rel),
            s.to_string(),
        ]);
        let mut r = base_record(cfg, &s).param("n", n).param("samples", samples);
        r.estimate = mean;
        r.stderr = Some(se);
        r.replicates = cfg.replicates;
        r.wall_time_s = start.elapsed().as_secs_f64();
        report.records.push(r);
    }
    report.check(
        "mean width within 2% of m_q at the largest n",
        last_rel < 0.02,
        format!("relative error {last_rel}"),
    );
    report.artifacts.add("meanwidth.csv", t);
    Ok(())
}

const CHUNK: u64 = 1 << 14;

fn run_smallball(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let pair = cfg.exponent.pair()?;
    let Some(Radius::Beta(beta)) = cfg.radius else {
        return Err(HarnessError::Config("smallball-mc needs beta".into()));
    };
    let grid = make_grid(cfg.k, cfg.grid_resolution, &seed(cfg, &[0]))?;
    let exponent = solve_small_ball(cfg.k, pair.q(), beta)?.exponent;
    let mut t = Table::new(&[
        "n",
        "replicates",
        "contained",
        "inconclusive",
        "p_hat",
        "stderr",
        "log_p_over_n",
        "exponent",
        "seed",
    ]);
    let mut log_rates = Vec::new();
    let mut replicate_rows = Table::new(&["replicate", "n", "k", "p", "beta", "verdict", "outer", "inner", "seed_path"]);
    for &n in &cfg.n_schedule {
        let start = Instant::now();
        let s = seed(cfg, &[n as u64]);
        let chunks = cfg.replicates.div_ceil(CHUNK);
        let parts: Vec<(Tally, Vec<Vec<String>>)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut tally = Tally::default();
                let mut rows = Vec::new();
                for r in c * CHUNK..((c + 1) * CHUNK).min(cfg.replicates) {
                    let rs = s.child(r);
                    let rep = smallball_replicate(n, cfg.k, pair, beta, &grid, &rs)?;
                    tally.record(rep.verdict);
                    if cfg.replicate_csv {
                        rows.push(vec![
                            r.to_string(),
                            n.to_string(),
                            cfg.k.to_string(),
                            cfg.exponent.p_label(),
                            num(beta),
                            rep.verdict.to_string(),
                            num(rep.outer),
                            num(rep.inner),
                            rs.to_string(),
                        ]);
                    }
                }
                Ok((tally, rows))
            })
            .collect::<Result<_>>()?;
        let mut tally = Tally::default();
        for (part, rows) in parts {
            tally = tally.merge(part);
            replicate_rows.rows.extend(rows);
        }
        let (p, se, inconclusive) = tally.estimate();
        let log_rate = p.ln() / n as f64;
        log_rates.push(log_rate);
        t.push(vec![
            n.to_string(),
            cfg.replicates.to_string(),
            tally.contained.to_string(),
            inconclusive.to_string(),
            num(p),
            num(se),
            num(log_rate),
            num(exponent),
            s.to_string(),
        ]);
        let mut r = base_record(cfg, &s)
            .param("n", n)
            .param("beta", beta)
            .param("grid_resolution", cfg.grid_resolution)
            .param("contained", tally.contained)
            .param("inconclusive", inconclusive);
        r.estimate = log_rate;
        r.stderr = Some(se);
        r.replicates = cfg.replicates;
        r.wall_time_s = start.elapsed().as_secs_f64();
        report.records.push(r);
    }
    report.check(
        "(1/n) log p_hat increasing in n",
        strictly_increasing(&log_rates),
        format!("{log_rates:?}"),
    );
    let last = log_rates.last().copied().unwrap_or(f64::NAN);
    report.check(
        "(1/n) log p_hat within 0.1 of the exponent at the largest n",
        (last - exponent).abs() <= 0.1,
        format!("{last} vs {exponent}"),
    );
    report.artifacts.add("smallball.csv", t);
    if cfg.replicate_csv {
        report.artifacts.add("replicates.csv", replicate_rows);
    }
    Ok(())
}

fn exponent_row(radius: f64, s: &MaxEntSolution) -> Vec<String> {
    vec![
        num(radius),
        s.regime.to_string(),
        num(s.exponent),
        num(s.lambda1()),
        num(s.lambda2()),
    ]
}

fn run_exponent(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let (k, q) = (cfg.k, cfg.exponent.q());
    let c = constants(k, q)?;
    let points = cfg.samples.unwrap_or(40).max(2);
    let start = Instant::now();

    let mut betas: Vec<f64> = (1..=points).map(|j| c.m_q * j as f64 / points as f64).collect();
    betas.push(c.beta_kq);
    betas.extend((1..8).map(|j| c.beta_kq + (c.m_q - c.beta_kq) * j as f64 / 8.0));
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    let sols: Vec<MaxEntSolution> = betas
        .par_iter()
        .map(|&b| Ok(solve_small_ball(k, q, b)?))
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["beta", "regime", "exponent", "lambda1", "lambda2"]);
    for (b, s) in betas.iter().zip(&sols) {
        t.push(exponent_row(*b, s));
    }
    let exps: Vec<f64> = sols.iter().map(|s| s.exponent).collect();
    report.check(
        "exponent nondecreasing in beta",
        exps.windows(2).all(|w| w[1] >= w[0] - 1e-12),
        format!("{} points", exps.len()),
    );
    let worst_slack = sols
        .iter()
        .flat_map(|s| s.residuals)
        .fold(0.0f64, |m, r| m.max(r.abs()));
    report.check("slackness residuals < 1e-8", worst_slack < 1e-8, format!("{worst_slack:e}"));
    let worst_entropy = sols
        .iter()
        .map(|s| (s.entropy - s.entropy_direct).abs())
        .fold(0.0f64, f64::max);
    report.check(
        "entropy identity agrees with direct quadrature to 1e-8",
        worst_entropy < 1e-8,
        format!("{worst_entropy:e}"),
    );
    let at_mq = solve_small_ball(k, q, c.m_q)?;
    report.check("exponent(m_q) = 0", at_mq.exponent == 0.0, format!("{}", at_mq.exponent));
    let lower_gap = (solve_small_ball(k, q, c.beta_kq * (1.0 + 1e-9))?.exponent
        - solve_small_ball(k, q, c.beta_kq)?.exponent)
        .abs();
    let upper_gap = solve_small_ball(k, q, c.m_q * (1.0 - 1e-9))?.exponent.abs();
    report.check(
        "exponent continuous at beta_kq and m_q",
        lower_gap < 1e-6 && upper_gap < 1e-6,
        format!("jumps {lower_gap:e}, {upper_gap:e}"),
    );

    let bound = c.inner_bound();
    let mut inner = Table::new(&["alpha", "regime", "exponent", "lambda1", "lambda2"]);
    let mut inner_exps = Vec::new();
    for j in 0..points {
        let alpha = c.m_q + (bound - c.m_q) * j as f64 / points as f64;
        if let InnerOutcome::Solved(s) = solve_inner(k, q, alpha)? {
            inner.push(exponent_row(alpha, &s));
            inner_exps.push(s.exponent);
        }
    }
    inner.push(vec![num(bound), "infeasible".into(), num(f64::NEG_INFINITY), num(f64::NAN), num(f64::NAN)]);
    report.check(
        "inner exponent decreasing in alpha",
        inner_exps.windows(2).all(|w| w[1] < w[0]),
        format!("{} points", inner_exps.len()),
    );

    let s = seed(cfg, &[]);
    match cfg.radius {
        Some(Radius::Beta(b)) => {
            let sol = solve_small_ball(k, q, b)?;
            let mut r = base_record(cfg, &s).param("beta", b).param("regime", sol.regime.as_str());
            r.estimate = sol.exponent;
            report.records.push(r);
            report.check(
                format!("solution at beta = {b} satisfies the constraints"),
                sol.residuals.iter().all(|x| x.abs() < 1e-8) && sol.exponent <= 0.0,
                format!("regime {}, residuals {:?}", sol.regime, sol.residuals),
            );
            if sol.regime == Regime::Gap {
                report.check(
                    "gap solution has positive multipliers",
                    sol.lambda1() > 0.0 && sol.lambda2() > 0.0,
                    format!("({}, {})", sol.lambda1(), sol.lambda2()),
                );
            }
            report.solutions.push(solution_json(&sol));
        }
        Some(Radius::Alpha(a)) => match solve_inner(k, q, a)? {
            InnerOutcome::Solved(sol) => {
                let mut r = base_record(cfg, &s).param("alpha", a).param("regime", sol.regime.as_str());
                r.estimate = sol.exponent;
                report.records.push(r);
                report.solutions.push(solution_json(&sol));
            }
            InnerOutcome::Infeasible { bound } => {
                let mut r = base_record(cfg, &s).param("alpha", a).param("regime", "infeasible");
                r.estimate = f64::NEG_INFINITY;
                r.upper = Some(bound);
                report.records.push(r);
            }
        },
        None => {
            let mut r = base_record(cfg, &s).param("points", points);
            r.estimate = exps.iter().copied().fold(f64::INFINITY, f64::min);
            r.wall_time_s = start.elapsed().as_secs_f64();
            report.records.push(r);
        }
    }
    report.artifacts.add("exponent.csv", t);
    report.artifacts.add("inner_exponent.csv", inner);
    Ok(())
}

/// Comparison value `(π/2)³` for the planar section area of the cube's dual.
pub const NAZAROV_BOUND: f64 = PI * PI * PI / 8.0;

fn run_section_volume(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let q = cfg.exponent.q();
    let grid = make_grid(2, cfg.grid_resolution, &seed(cfg, &[0]))?;
    let mq = m_q(q)?;
    let target = PI / (mq * mq);
    let mut t = Table::new(&[
        "n",
        "mean",
        "stderr",
        "min",
        "max",
        "target",
        "rel_error",
        "nazarov_bound",
        "replicates",
        "seed",
    ]);
    let mut per = Table::new(&["n", "replicate", "volume", "seed_path"]);
    let mut last = (f64::NAN, f64::NAN);
    let mut sample_body = None;
    for &n in &cfg.n_schedule {
        let start = Instant::now();
        let s = seed(cfg, &[n as u64]);
        let vols: Vec<(f64, Option<SymmetricBody>)> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                let body = section_body(n, 2, q, &s.child(r), &grid)?;
                let v = volume2d(&body, cfg.grid_resolution)?;
                Ok((v, (r == 0).then_some(body)))
            })
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(vols.len());
        for (r, (v, body)) in vols.into_iter().enumerate() {
            per.push(vec![n.to_string(), r.to_string(), num(v), s.child(r as u64).to_string()]);
            values.push(v);
            if body.is_some() {
                sample_body = body;
            }
        }
        let (mean, se) = mean_stderr(&values);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        last = (mean, min);
        t.push(vec![
            n.to_string(),
            num(mean),
            num(se),
            num(min),
            num(max),
            num(target),
            num((mean / target - 1.0).abs()),
            num(NAZAROV_BOUND),
            cfg.replicates.to_string(),
            s.to_string(),
        ]);
        let mut r = base_record(cfg, &s).param("n", n).param("grid_resolution", cfg.grid_resolution);
        r.estimate = mean;
        r.stderr = Some(se);
        r.lower = Some(min);
        r.upper = Some(max);
        r.replicates = cfg.replicates;
        r.wall_time_s = start.elapsed().as_secs_f64();
        report.records.push(r);
    }
    report.check(
        "mean section area within 3% of pi/m_q^2 at the largest n",
        (last.0 / target - 1.0).abs() <= 0.03,
        format!("{} vs {target}", last.0),
    );
    if q == 1.0 {
        report.check(
            "every section area above (pi/2)^3",
            last.1 > NAZAROV_BOUND,
            format!("min {}", last.1),
        );
    }
    report.artifacts.add("section_volume.csv", t);
    report.artifacts.add("section_volume_replicates.csv", per);
    report.artifacts.add("grid.csv", grid_table(&grid));
    if let Some(SymmetricBody::Tabulated(b)) = sample_body {
        report.artifacts.add("section_body.csv", body_table(&b));
    }
    Ok(())
}

/// Indices `p` at which the one-dimensional rate table is evaluated.
pub const ONEDIM_P: [f64; 4] = [1.0, 1.25, 1.5, 1.75];

fn run_onedim(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let pair = cfg.exponent.pair()?;
    let target = m_q(pair.q())?;
    let mut t = Table::new(&["n", "mean", "stderr", "m_q", "replicates", "seed"]);
    let mut last = (f64::NAN, f64::NAN);
    for &n in &cfg.n_schedule {
        let start = Instant::now();
        let s = seed(cfg, &[n as u64]);
        let ws: Vec<f64> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| Ok(w_statistic(n, pair, &s.child(r))?))
            .collect::<Result<_>>()?;
        let (mean, se) = mean_stderr(&ws);
        last = (mean, se);
        t.push(vec![
            n.to_string(),
            num(mean),
            num(se),
            num(target),
            cfg.replicates.to_string(),
            s.to_string(),
        ]);
        let mut r = base_record(cfg, &s).param("n", n);
        r.estimate = mean;
        r.stderr = Some(se);
        r.replicates = cfg.replicates;
        r.wall_time_s = start.elapsed().as_secs_f64();
        report.records.push(r);
    }
    if cfg.replicates > 1 {
        report.check(
            "mean of W within 3 stderr of m_q at the largest n",
            (last.0 - target).abs() <= 3.0 * last.1,
            format!("{} +- {} vs {target}", last.0, last.1),
        );
    }

    let points = cfg.samples.unwrap_or(26).max(2);
    let mut rates = Table::new(&["p", "q", "z", "rate"]);
    let mut formulas_ok = true;
    for p in ONEDIM_P {
        let (q, threshold) = if p == 1.0 {
            (f64::INFINITY, 1.0)
        } else {
            let q = p / (p - 1.0);
            (q, m_q(q)?)
        };
        let mut zs: Vec<f64> = (0..points).map(|i| 0.5 + 2.5 * i as f64 / (points - 1) as f64).collect();
        zs.push(threshold);
        zs.sort_by(f64::total_cmp);
        zs.dedup();
        for z in zs {
            rates.push(vec![num(p), num(q), num(z), num(onedim_rate(p, z)?)]);
        }
        formulas_ok &= onedim_rate(p, threshold)? == 0.0 && onedim_rate(p, 0.9 * threshold)? == f64::INFINITY;
    }
    formulas_ok &= onedim_rate(1.0, 2.0)? == 3.0;
    report.check(
        "one-dimensional rates vanish at the threshold, are infinite below it, and I_1(2) = 3",
        formulas_ok,
        "exact",
    );
    report.artifacts.add("onedim.csv", t);
    report.artifacts.add("onedim_rate.csv", rates);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
    }

    #[test]
    fn constants_row() {
        let r = run(&cfg("command = constants\nk = 2\nq = 1\n")).unwrap();
        let t = r.artifacts.get("constants.csv").unwrap();
        let row = &t.rows[1];
        let beta: f64 = row[6].parse().unwrap();
        let m: f64 = row[2].parse().unwrap();
        assert!((beta - 0.735_105_193_895_722_7).abs() < 1e-12);
        assert!((m - 0.797_884_560_802_865_4).abs() < 1e-15);
        assert!(r.all_passed());
    }

    #[test]
    fn gamma_check_passes() {
        let r = run(&cfg("command = gamma-check\n")).unwrap();
        assert!(r.all_passed(), "{:?}", r.assertions);
        assert_eq!(r.artifacts.get("gamma_check.csv").unwrap().rows.len(), 2500);
    }

    #[test]
    fn exponent_curve() {
        let r = run(&cfg("command = exponent\nk = 2\np = inf\nbeta = 0.76\nsamples = 12\n")).unwrap();
        assert!(r.all_passed(), "{:?}", r.assertions);
        let t = r.artifacts.get("exponent.csv").unwrap();
        assert_eq!(t.header, ["beta", "regime", "exponent", "lambda1", "lambda2"]);
        let regimes: Vec<&str> = t.rows.iter().map(|row| row[1].as_str()).collect();
        for want in ["closed_form", "gap", "gaussian"] {
            assert!(regimes.contains(&want));
        }
        assert_eq!(r.solutions[0]["regime"], "gap");
    }

    #[test]
    fn small_runs_are_deterministic() {
        let c = cfg("command = converge\nn_schedule = 20,40\nk = 2\np = 4\nreplicates = 6\ngrid_resolution = 64\nmaster_seed = 3\n");
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a.artifacts.get("converge.csv"), b.artifacts.get("converge.csv"));
    }

    #[test]
    fn replicate_log_schema() {
        let c = cfg("command = smallball-mc\nn_schedule = 5\nk = 1\np = inf\nbeta = 0.9\nreplicates = 10\nreplicate_csv = true\n");
        let r = run(&c).unwrap();
        let t = r.artifacts.get("replicates.csv").unwrap();
        assert_eq!(t.header, ["replicate", "n", "k", "p", "beta", "verdict", "outer", "inner", "seed_path"]);
        assert_eq!(t.rows.len(), 10);
    }
}
