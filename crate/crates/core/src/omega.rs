//! The transform `Ω(x) = ∫₁ˣ dt/μ(t)` built from a nondecreasing,
//! nonnegative `ω`, together with its inverse and the supremum of its range.
//!
//! `μ(t) = ω(2^{1-1/p} t^{1/p})` in [`PowerMode::Plain`] and the `p`-th power
//! of that in [`PowerMode::PthPower`].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::expr::{Expr, Var};
use crate::quad::{self, EndpointBehaviour, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerMode {
    Plain,
    PthPower,
}

const TABLE_KNOTS: usize = 2048;
const TABLE_MIN: f64 = 1e-12;
const TABLE_MAX: f64 = 1e12;
const EXTEND_LIMIT: f64 = 1e300;
const SEGMENT_TOL: Tolerance = Tolerance::new(1e-300, 1e-14).with_limit(64);

/// `μ(t) = K t^e`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PowerLaw {
    k: f64,
    e: f64,
}

impl PowerLaw {
    fn omega(self, x: f64) -> f64 {
        let PowerLaw { k, e } = self;
        if x == 0.0 {
            return self.at_zero();
        }
        if e == 1.0 {
            x.ln() / k
        } else {
            (x.powf(1.0 - e) - 1.0) / (k * (1.0 - e))
        }
    }

    fn at_zero(self) -> f64 {
        if self.e < 1.0 {
            -1.0 / (self.k * (1.0 - self.e))
        } else {
            f64::NEG_INFINITY
        }
    }

    fn sup(self) -> f64 {
        if self.e <= 1.0 {
            f64::INFINITY
        } else {
            1.0 / (self.k * (self.e - 1.0))
        }
    }

    fn inverse(self, y: f64) -> f64 {
        let PowerLaw { k, e } = self;
        if e == 1.0 {
            return (k * y).exp();
        }
        let base = 1.0 + k * (1.0 - e) * y;
        if base <= 0.0 {
            return 0.0;
        }
        base.powf(1.0 / (1.0 - e))
    }
}

#[derive(Debug, Clone)]
struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // index of the first knot with a finite Ω value
    first: usize,
}

/// Ω together with its inverse. Immutable once built.
#[derive(Debug, Clone)]
pub struct OmegaTransform {
    omega: Expr,
    p: f64,
    mode: PowerMode,
    scale: f64,
    closed: Option<PowerLaw>,
    table: Option<Table>,
    zero_below: f64,
    lower: f64,
    sup: std::result::Result<f64, String>,
}

impl OmegaTransform {
    /// Builds the transform, using the closed form when `ω` is a power law.
    pub fn new(omega: &Expr, p: f64, mode: PowerMode) -> Result<Self> {
        Self::build(omega, p, mode, true)
    }

    /// Builds the tabulated transform even when a closed form exists.
    pub fn numeric(omega: &Expr, p: f64, mode: PowerMode) -> Result<Self> {
        Self::build(omega, p, mode, false)
    }

    fn build(omega: &Expr, p: f64, mode: PowerMode, allow_closed: bool) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid(format!("p must be at least 1, got {p}")));
        }
        if omega.uses(Var::T) || omega.uses(Var::X) {
            return Err(invalid("omega may only use the variable u"));
        }
        let mut tr = OmegaTransform {
            omega: omega.clone(),
            p,
            mode,
            scale: 2f64.powf(1.0 - 1.0 / p),
            closed: None,
            table: None,
            zero_below: 0.0,
            lower: f64::NEG_INFINITY,
            sup: Ok(f64::INFINITY),
        };
        tr.validate_omega()?;
        if allow_closed {
            if let Some((c, g)) = omega.as_power_law(Var::U) {
                if c > 0.0 && g >= 0.0 {
                    let m = match mode {
                        PowerMode::Plain => 1.0,
                        PowerMode::PthPower => p,
                    };
                    let law = PowerLaw {
                        k: (c * tr.scale.powf(g)).powf(m),
                        e: g * m / p,
                    };
                    tr.closed = Some(law);
                    tr.lower = law.at_zero();
                    tr.sup = Ok(law.sup());
                    return Ok(tr);
                }
            }
        }
        tr.zero_below = tr.find_zero_threshold()?;
        tr.build_table()?;
        tr.lower = tr.compute_lower()?;
        tr.sup = tr.compute_sup();
        Ok(tr)
    }

    fn validate_omega(&self) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..256 {
            let u = 1e-12 * 1e24f64.powf(i as f64 / 255.0);
            let w = self.omega.eval_u(u)?;
            if w < 0.0 {
                return Err(invalid(format!("omega is negative at u = {u}")));
            }
            if w < prev - 1e-12 * prev.abs().max(1.0) {
                return Err(invalid(format!("omega is not nondecreasing near u = {u}")));
            }
            prev = w;
        }
        Ok(())
    }

    fn find_zero_threshold(&self) -> Result<f64> {
        if self.mu(1.0)? <= 0.0 {
            return Err(invalid(
                "mu(1) = 0: omega must be positive at 2^(1-1/p)",
            ));
        }
        let mut last_zero = None;
        for i in 0..256 {
            let t = TABLE_MIN * (1.0 / TABLE_MIN).powf(i as f64 / 255.0);
            if self.mu(t)? == 0.0 {
                last_zero = Some(t);
            }
        }
        let Some(mut lo) = last_zero else {
            return Ok(0.0);
        };
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.mu(mid)? == 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// `μ(t)`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(invalid(format!("mu needs t > 0, got {t}")));
        }
        let w = self.omega.eval_u(self.scale * t.powf(1.0 / self.p))?;
        if w < 0.0 {
            return Err(invalid(format!("omega is negative at t = {t}")));
        }
        Ok(match self.mode {
            PowerMode::Plain => w,
            PowerMode::PthPower => w.powf(self.p),
        })
    }

    fn recip_mu(&self, t: f64) -> Result<f64> {
        let m = self.mu(t)?;
        if m == 0.0 {
            return Err(Error::Divergence(format!("mu vanishes at {t}")));
        }
        Ok(1.0 / m)
    }

    /// `∫_a^b dt/μ(t)` for `0 < a, b`, integrated in `ln t`.
    fn integrate_recip(&self, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        quad::integrate(
            |s: f64| {
                let t = s.exp();
                Ok(t * self.recip_mu(t)?)
            },
            a.ln(),
            b.ln(),
            tol,
        )
    }

    fn build_table(&mut self) -> Result<()> {
        let ratio = (TABLE_MAX / TABLE_MIN).ln() / (TABLE_KNOTS - 1) as f64;
        let xs: Vec<f64> = (0..TABLE_KNOTS)
            .map(|i| TABLE_MIN * (ratio * i as f64).exp())
            .collect();
        let mut ys = vec![f64::NEG_INFINITY; TABLE_KNOTS];
        let above = xs.partition_point(|&x| x <= 1.0);
        let mut acc = self.integrate_recip(1.0, xs[above], SEGMENT_TOL)?;
        ys[above] = acc;
        for j in above + 1..TABLE_KNOTS {
            acc += self.integrate_recip(xs[j - 1], xs[j], SEGMENT_TOL)?;
            ys[j] = acc;
        }
        let mut first = above;
        if above > 0 && xs[above - 1] > self.zero_below {
            acc = -self.integrate_recip(xs[above - 1], 1.0, SEGMENT_TOL)?;
            ys[above - 1] = acc;
            first = above - 1;
            for j in (0..above - 1).rev() {
                if xs[j] <= self.zero_below {
                    break;
                }
                match self.integrate_recip(xs[j], xs[j + 1], SEGMENT_TOL) {
                    Ok(v) if (acc - v).is_finite() => {
                        acc -= v;
                        ys[j] = acc;
                        first = j;
                    }
                    _ => break,
                }
            }
        }
        for j in first + 1..TABLE_KNOTS {
            if !(ys[j] > ys[j - 1]) {
                return Err(invalid(format!(
                    "Omega table is not strictly increasing at x = {}",
                    xs[j]
                )));
            }
        }
        self.table = Some(Table { xs, ys, first });
        Ok(())
    }

    fn compute_lower(&self) -> Result<f64> {
        let table = self.table.as_ref().expect("table built");
        if self.zero_below > 0.0 || table.first > 0 {
            return Ok(f64::NEG_INFINITY);
        }
        let e0 = match quad::exponent_at_zero(|t| self.mu(t))? {
            EndpointBehaviour::Zero => return Ok(f64::NEG_INFINITY),
            EndpointBehaviour::Power(e) => e,
        };
        if e0 > 0.99 {
            return Ok(f64::NEG_INFINITY);
        }
        let head = quad::integral_from_zero(
            |t| self.recip_mu(t),
            TABLE_MIN,
            -e0,
            Tolerance::new(1e-300, 1e-13),
        )?;
        Ok(table.ys[0] - head)
    }

    fn compute_sup(&self) -> std::result::Result<f64, String> {
        let table = self.table.as_ref().expect("table built");
        let slope = quad::log_log_slope(|t| self.mu(t), 1e3, 1e6, 16)
            .ok_or_else(|| "mu is not representable on [1e3, 1e6]".to_string())?;
        if slope <= 0.95 {
            return Ok(f64::INFINITY);
        }
        if slope < 1.05 {
            // borderline: t/μ(t) settling to a positive constant diverges like ∫dt/t
            let ratio = |t: f64| self.mu(t).map(|m| t / m).unwrap_or(0.0);
            return if ratio(1e6) >= 0.9 * ratio(1e3) {
                Ok(f64::INFINITY)
            } else {
                Err(format!(
                    "tail exponent {slope:.4} of mu is within 0.05 of the critical value 1"
                ))
            };
        }
        let x = TABLE_MAX;
        let kappa = quad::log_log_slope(|t| self.mu(t), x / 1e3, x, 16).unwrap_or(slope);
        let kappa = if kappa > 1.0 { kappa } else { slope };
        let mu_x = self.mu(x).map_err(|e| e.to_string())?;
        Ok(table.ys[TABLE_KNOTS - 1] + x / (mu_x * (kappa - 1.0)))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> PowerMode {
        self.mode
    }

    pub fn omega_expr(&self) -> &Expr {
        &self.omega
    }

    /// Whether `Ω` and `Ω⁻¹` are evaluated in closed form.
    pub fn is_closed_form(&self) -> bool {
        self.closed.is_some()
    }

    /// Knots `(x, Ω(x))` of the numeric table, if one was built.
    pub fn table(&self) -> Option<(&[f64], &[f64])> {
        self.table
            .as_ref()
            .map(|t| (&t.xs[t.first..], &t.ys[t.first..]))
    }

    /// Largest `t` with `μ(t) = 0` (0 if `μ` is positive on `(0, ∞)`).
    pub fn zero_below(&self) -> f64 {
        self.zero_below
    }

    /// `Ω(0⁺)`, `-∞` when `1/μ` is not integrable at 0.
    pub fn at_zero(&self) -> f64 {
        self.lower
    }

    /// Whether the lower-divergence convention `Ω(0⁺) = -∞` applies.
    pub fn lower_divergent(&self) -> bool {
        self.lower == f64::NEG_INFINITY
    }

    /// Supremum of the range of `Ω`, `+∞` when `∫^∞ dt/μ` diverges.
    pub fn domain_sup(&self) -> Result<f64> {
        self.sup.clone().map_err(Error::Inconclusive)
    }

    /// `Ω(x)` for `x ≥ 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(invalid(format!("Omega needs x >= 0, got {x}")));
        }
        if x == 1.0 {
            return Ok(0.0);
        }
        if x == 0.0 {
            return Ok(self.lower);
        }
        if let Some(law) = self.closed {
            return Ok(law.omega(x));
        }
        if x <= self.zero_below {
            return Ok(f64::NEG_INFINITY);
        }
        let table = self.table.as_ref().expect("table built");
        let (j, base) = self.nearest_knot(table, x);
        if x.ln().abs() <= (x / base).ln().abs() {
            return self.integrate_recip(1.0, x, SEGMENT_TOL);
        }
        let v = table.ys[j] + self.integrate_recip(base, x, SEGMENT_TOL)?;
        if x < 1.0 && !v.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(v)
    }

    fn nearest_knot(&self, table: &Table, x: f64) -> (usize, f64) {
        let step = (TABLE_MAX / TABLE_MIN).ln() / (TABLE_KNOTS - 1) as f64;
        let pos = ((x / TABLE_MIN).ln() / step).round();
        let j = (pos.max(0.0) as usize).clamp(table.first, TABLE_KNOTS - 1);
        (j, table.xs[j])
    }

    /// `Ω⁻¹(y)`. Values at or below `Ω(0⁺)` map to 0.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y.is_nan() {
            return Err(invalid("Omega inverse of NaN"));
        }
        if let Ok(sup) = self.sup {
            if y >= sup {
                return Err(Error::OutOfDomain(y));
            }
        }
        if y <= self.lower {
            return Ok(0.0);
        }
        if y == 0.0 {
            return Ok(1.0);
        }
        if let Some(law) = self.closed {
            return Ok(law.inverse(y));
        }
        let table = self.table.as_ref().expect("table built");
        let ys = &table.ys[table.first..];
        let xs = &table.xs[table.first..];
        let k = ys.partition_point(|&v| v <= y);
        let (mut lo, mut hi);
        if k == 0 {
            hi = xs[0];
            lo = hi;
            loop {
                lo /= 16.0;
                if lo <= self.zero_below || lo < 1e-300 {
                    lo = self.zero_below.max(0.0);
                    break;
                }
                if self.eval(lo)? <= y {
                    break;
                }
            }
        } else if k == ys.len() {
            lo = xs[xs.len() - 1];
            hi = lo;
            loop {
                hi *= 16.0;
                if hi > EXTEND_LIMIT {
                    return Err(Error::OutOfDomain(y));
                }
                let v = self.eval(hi)?;
                if v > y {
                    break;
                }
                lo = hi;
            }
        } else {
            lo = xs[k - 1];
            hi = xs[k];
        }
        self.refine(y, lo, hi)
    }

    fn refine(&self, y: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
        let tol = 1e-13 * y.abs().max(1.0);
        let mut x = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
        for _ in 0..300 {
            let f = self.eval(x)? - y;
            if f.abs() <= tol {
                return Ok(x);
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(x);
            }
            let newton = x - f * self.mu(x)?;
            x = if newton > lo && newton < hi {
                newton
            } else if lo > 0.0 && hi / lo > 4.0 {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(x)
    }
}
