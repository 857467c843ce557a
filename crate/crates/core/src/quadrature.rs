//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Error estimates follow the QUADPACK `qk21`/`qag` heuristics: the Kronrod–Gauss
//! difference is rescaled by the integral of `|f - mean|` and the interval with the
//! largest estimated error is bisected until the total estimate meets the tolerance.

use alloc::vec::Vec;

use crate::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    // Rounding-error level of this panel; refining below it gains nothing.
    floor: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = 0.0;
    let mut kronrod = WGK[10] * fc;
    let mut abs_k = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    // The 10-point Gauss rule does not use the centre.
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let resabs = abs_k * half.abs();
    let resasc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * libm::fmin(1.0, libm::pow(200.0 * error / resasc, 1.5));
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = libm::fmax(floor, error);
    }
    Panel {
        a,
        b,
        value,
        error,
        floor,
    }
}

/// Integrates `f` over the finite interval `[a, b]` to relative tolerance `rel_tol`
/// (or absolute tolerance `abs_tol`, whichever is looser).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Estimate> {
    integrate_panels(&f, &[a, b], rel_tol, abs_tol)
}

/// Integrates over `[a, b]` starting from the given breakpoints
/// (`points[0] = a < points[1] < ... < points[m] = b`).
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Estimate> {
    let mut panels: Vec<Panel> = points.windows(2).map(|w| gk21(f, w[0], w[1])).collect();
    loop {
        let (value, error) = panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = libm::fmax(abs_tol, rel_tol * value.abs());
        if error <= target {
            return Ok(Estimate { value, abs_error: error });
        }
        if panels.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature {
                rel_error: error / value.abs(),
            });
        }
        // Tie policy: first panel with the largest error above its rounding floor.
        let (worst, _) = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.error > 2.0 * p.floor)
            .fold((usize::MAX, f64::NEG_INFINITY), |(bi, be), (i, p)| if p.error > be { (i, p.error) } else { (bi, be) });
        if worst == usize::MAX {
            // Every panel is at rounding level: the sum is as good as it gets.
            return Ok(Estimate { value, abs_error: error });
        }
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Interval exhausted at machine precision; accept what we have.
            return if error <= 1e3 * target {
                Ok(Estimate { value, abs_error: error })
            } else {
                Err(Error::Quadrature {
                    rel_error: error / value.abs(),
                })
            };
        }
        panels[worst] = gk21(f, p.a, mid);
        panels.push(gk21(f, mid, p.b));
    }
}

/// Integrates `f` over `[a, ∞)` through the map `r = a + scale · t/(1-t)`, `t ∈ [0, 1)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Estimate> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let r = a + scale * t / s;
        let v = f(r) * scale / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_panels(&g, &[0.0, 0.5, 1.0], rel_tol, abs_tol)
}
