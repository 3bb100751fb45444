//! Quadrature helpers: adaptive Gauss-Kronrod (21-point), Gauss-Legendre
//! rules, endpoint-singular integrals and power-exponent regression.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_832_196,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of subintervals.
    pub limit: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            limit: MAX_SEGMENTS,
        }
    }

    pub const fn with_limit(self, limit: usize) -> Self {
        Tolerance { limit, ..self }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-13, 1e-12)
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx)? + f(c + dx)?;
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let error = ((kron - gauss) * h).abs();
    Ok((value, error))
}

/// Adaptive integral of `f` over `[a, b]`. Endpoints are never sampled.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let (v, e) = gk21(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut err = e;
    let mut count = 1;
    while err > tol.abs.max(tol.rel * total.abs()) && count < tol.limit {
        let seg = heap.pop().expect("non-empty");
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            // interval exhausted at machine precision
            heap.push(Segment { error: 0.0, ..seg });
            err = heap.iter().map(|s| s.error).sum();
            if err == 0.0 {
                break;
            }
            continue;
        }
        let (v1, e1) = gk21(&mut f, seg.a, m)?;
        let (v2, e2) = gk21(&mut f, m, seg.b)?;
        total += v1 + v2 - seg.value;
        err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: m,
            b: seg.b,
            value: v2,
            error: e2,
        });
        count += 1;
    }
    // re-sum to shed accumulated update error
    let total: f64 = heap.iter().map(|s| s.value).sum();
    if !total.is_finite() {
        return Err(Error::Divergence(format!(
            "integral over [{a}, {b}] is not finite"
        )));
    }
    Ok(total)
}

/// Substitution exponent that turns an endpoint singularity `s^e` into a
/// linearly vanishing integrand.
fn grading_for(exponent: Option<f64>) -> Result<f64> {
    match exponent {
        Some(e) if e <= -1.0 => Err(Error::Integrability(format!(
            "endpoint exponent {e} is not integrable"
        ))),
        Some(e) if e < 0.0 => Ok(2.0 / (1.0 + e)),
        _ => Ok(1.0),
    }
}

/// Integral over `[a, b]` of an integrand behaving like `(s-a)^left` near
/// `a` and `(b-s)^right` near `b`. Each half is mapped through a power
/// substitution that removes the singularity.
pub fn integrate_singular<F>(
    mut f: F,
    a: f64,
    b: f64,
    left: Option<f64>,
    right: Option<f64>,
    tol: Tolerance,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let kl = grading_for(left)?;
    let kr = grading_for(right)?;
    let m = if right.is_some_and(|e| e < 0.0) {
        0.5 * (a + b)
    } else {
        b
    };
    let lw = m - a;
    let mut total = integrate(
        |w: f64| {
            let s = a + lw * w.powf(kl);
            if s <= a {
                return Ok(0.0);
            }
            Ok(f(s)? * lw * kl * w.powf(kl - 1.0))
        },
        0.0,
        1.0,
        tol,
    )?;
    if m < b {
        let rw = b - m;
        total += integrate(
            |w: f64| {
                let s = b - rw * w.powf(kr);
                if s >= b {
                    return Ok(0.0);
                }
                Ok(f(s)? * rw * kr * w.powf(kr - 1.0))
            },
            0.0,
            1.0,
            tol,
        )?;
    }
    Ok(total)
}

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Least-squares slope of ln|g| against ln t over `n` log-spaced points of
/// `[lo, hi]`. `None` if any sample is zero, non-finite or too close to the
/// floating point range limits.
pub fn log_log_slope<F>(mut g: F, lo: f64, hi: f64, n: usize) -> Option<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (l0, l1) = (lo.ln(), hi.ln());
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let lt = l0 + (l1 - l0) * i as f64 / (n - 1) as f64;
        let v = g(lt.exp()).ok()?.abs();
        if !(v > 1e-280 && v < 1e280) {
            return None;
        }
        xs.push(lt);
        ys.push(v.ln());
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Some(sxy / sxx)
}

/// Behaviour of a function near `t = 0⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointBehaviour {
    /// `|g(t)| ~ C t^λ`
    Power(f64),
    /// `g` vanishes identically near 0.
    Zero,
}

impl EndpointBehaviour {
    /// Exponent, with identically-zero functions reported as `+∞`.
    pub fn exponent(self) -> f64 {
        match self {
            EndpointBehaviour::Power(l) => l,
            EndpointBehaviour::Zero => f64::INFINITY,
        }
    }
}

// Regression windows, deepest first. Sums of powers are governed by the
// smallest exponent only once t is far below 1.
const ZERO_WINDOWS: [(f64, f64); 5] = [
    (1e-200, 1e-100),
    (1e-100, 1e-50),
    (1e-40, 1e-20),
    (1e-16, 1e-10),
    (1e-8, 1e-3),
];

/// Estimates λ in `|g(t)| ~ C t^λ` as `t → 0⁺` by log-log regression over
/// the deepest window where `g` is finite and representable.
pub fn exponent_at_zero<F>(mut g: F) -> Result<EndpointBehaviour>
where
    F: FnMut(f64) -> Result<f64>,
{
    for &(lo, hi) in &ZERO_WINDOWS {
        if let Some(s) = log_log_slope(&mut g, lo, hi, 12) {
            return Ok(EndpointBehaviour::Power(s));
        }
    }
    // identically zero near the origin?
    let mut all_zero = true;
    for i in 0..12 {
        let t = 1e-8 * 10f64.powf(5.0 * i as f64 / 11.0);
        match g(t) {
            Ok(v) if v == 0.0 => {}
            Ok(_) => all_zero = false,
            Err(e) => {
                return Err(Error::AtNode {
                    t,
                    source: Box::new(e),
                })
            }
        }
    }
    if all_zero {
        Ok(EndpointBehaviour::Zero)
    } else {
        Err(Error::Inconclusive(
            "could not estimate the behaviour near 0".into(),
        ))
    }
}

/// `∫₀ᵗ g(s) ds` for `g` with an integrable power singularity at 0.
pub fn integral_from_zero<F>(g: F, t: f64, exponent: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if t == 0.0 {
        return Ok(0.0);
    }
    if exponent.is_infinite() {
        return integrate(g, 0.0, t, tol);
    }
    integrate_singular(g, 0.0, t, Some(exponent), None, tol)
}
