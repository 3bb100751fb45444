//! Gamma, Beta and Mittag-Leffler functions on the positive reals.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x - 1
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("gamma is defined here only for x > 0, got {x}")));
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        let g1 = gamma(1.0 - x)?;
        return Ok(PI / ((PI * x).sin() * g1));
    }
    if x > 171.6 {
        return Err(invalid(format!("gamma overflows for x = {x}")));
    }
    if x.fract() == 0.0 {
        // exact factorial
        return Ok((2..x as u64).fold(1.0, |acc, k| acc * k as f64));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // t^(z+0.5) split in two to stay finite up to the overflow point
    let half = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("ln_gamma is defined here only for x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Euler Beta function B(a, b) for a, b > 0.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if a + b < 170.0 {
        Ok(gamma(a)? * gamma(b)? / gamma(a + b)?)
    } else {
        Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp())
    }
}

/// Power with `0^e = 0` (e > 0) and `0^0 = 1`. Negative bases and `0^e`
/// with e < 0 are domain errors.
pub fn pow_safe(base: f64, exponent: f64) -> Result<f64> {
    if base < 0.0 {
        return Err(Error::Domain {
            expr: "pow_safe".into(),
            value: base,
            reason: "negative base",
        });
    }
    crate::expr::pow_checked(base, exponent).map_err(|reason| Error::Domain {
        expr: format!("pow_safe(_, {exponent})"),
        value: base,
        reason,
    })
}

/// Double-double value `hi + lo`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        let lo = err + self.lo + o.lo;
        let hi = s + lo;
        Dd {
            hi,
            lo: lo - (hi - s),
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        let lo = err + self.hi * o.lo + self.lo * o.hi;
        let hi = p + lo;
        Dd {
            hi,
            lo: lo - (hi - p),
        }
    }

    fn div(self, o: Dd) -> Dd {
        let q = self.hi / o.hi;
        let r = self.add(o.mul(Dd::new(-q)));
        let q2 = r.hi / o.hi;
        Dd::new(q).add(Dd::new(q2))
    }
}

const ML_MAX_TERMS: usize = 10_000;

/// Two-parameter Mittag-Leffler function E_{ρ,σ}(z) = Σ z^k / Γ(ρk + σ) by
/// direct summation. Intended for |z| ≤ 50.
///
/// Terms are accumulated in double-double arithmetic. For integer ρ the
/// term ratio is an exact Pochhammer product and is also carried in
/// double-double, which keeps alternating sums (z < 0) accurate.
pub fn mittag_leffler(rho: f64, sigma: f64, z: f64) -> Result<f64> {
    if !(rho > 0.0 && (rho <= 1.0 || rho.fract() == 0.0)) {
        return Err(invalid(format!("mittag_leffler: rho must be in (0, 1] or an integer, got {rho}")));
    }
    if !(sigma > 0.0) {
        return Err(invalid(format!("mittag_leffler: sigma must be positive, got {sigma}")));
    }
    if !z.is_finite() {
        return Err(invalid("mittag_leffler: non-finite argument"));
    }
    if z == 0.0 {
        return Ok(1.0 / gamma(sigma)?);
    }

    let integer_rho = rho.fract() == 0.0;
    let mut sum = Dd::new(0.0);
    let mut term = Dd::new(1.0 / gamma(sigma)?);
    if integer_rho {
        // exact leading term in double-double
        term = Dd::new(1.0).div(Dd::new(gamma(sigma)?));
    }
    let lnz = z.abs().ln();
    let mut small_run = 0;
    let mut prev_mag = f64::INFINITY;
    for k in 0..ML_MAX_TERMS {
        if k > 0 {
            if integer_rho {
                // Γ(ρ(k-1)+σ) / Γ(ρk+σ) = 1 / Π_{j<ρ} (ρ(k-1)+σ+j)
                let mut den = Dd::new(1.0);
                let base = rho * (k - 1) as f64 + sigma;
                for j in 0..rho as usize {
                    den = den.mul(Dd::new(base + j as f64));
                }
                term = term.mul(Dd::new(z)).div(den);
            } else {
                let a = rho * k as f64 + sigma;
                let mag = (k as f64 * lnz - ln_gamma(a)?).exp();
                let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
                term = Dd::new(sign * mag);
            }
        }
        if !term.hi.is_finite() {
            return Err(Error::NonConvergence {
                iterations: k,
                delta: f64::INFINITY,
            });
        }
        sum = sum.add(term);
        let mag = term.hi.abs();
        if !sum.hi.is_finite() {
            return Err(Error::NonConvergence {
                iterations: k,
                delta: mag,
            });
        }
        if mag <= f64::EPSILON * 1e-3 * sum.hi.abs() && mag <= prev_mag {
            small_run += 1;
            if small_run >= 3 {
                return Ok(sum.hi);
            }
        } else {
            small_run = 0;
        }
        prev_mag = mag;
    }
    Err(Error::NonConvergence {
        iterations: ML_MAX_TERMS,
        delta: prev_mag,
    })
}
