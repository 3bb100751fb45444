//! Numeric checks of the hypotheses behind global existence and uniqueness
//! for `D^β x = f(t, x)`.
//!
//! Three routes are supported:
//!
//! * existence: `|f(t,x)| ≤ l(t) ω(t^{1-β}|x|)` with `t^{1-β} l ∈ L^p_loc`
//!   and `lim t/ω(t) > 0`;
//! * growth: `|f(t,x)| ≤ l(t)|x|^γ + k(t)` with `t^{(1-γ)(1-β)} l` and
//!   `t^{1-β} k` in `L^p_loc`;
//! * lipschitz: `|f(t,x) - f(t,y)| ≤ l(t)|x-y|` with `l` and
//!   `t^{1-β}|f(t,0)|` in `L^p_loc`.
//!
//! `L^p_loc` membership is decided from the power exponent at 0, so all
//! verdicts are numeric evidence rather than proofs.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::quad::{self, EndpointBehaviour};

/// Band around `p λ = -1` that yields an inconclusive verdict.
pub const MARGIN: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub evidence: String,
}

impl Check {
    fn new(name: impl Into<String>, verdict: Verdict, evidence: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            verdict,
            evidence: evidence.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Existence,
    Growth,
    Lipschitz,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Existence => "existence",
            Route::Growth => "growth",
            Route::Lipschitz => "lipschitz",
        }
    }

    pub fn from_name(s: &str) -> Option<Route> {
        [Route::Existence, Route::Growth, Route::Lipschitz]
            .into_iter()
            .find(|r| r.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub route: Route,
    pub checks: Vec<Check>,
    /// Open interval of admissible `p`, capped at `1/β + 10`.
    pub admissible_p: Option<(f64, f64)>,
}

impl HypothesisReport {
    /// Pass only if every check passes; any failure makes it a failure.
    pub fn verdict(&self) -> Verdict {
        self.checks
            .iter()
            .fold(Verdict::Pass, |acc, c| acc.and(c.verdict))
    }
}

/// Power exponent of `g` at 0 and the `L^p_loc` verdict it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    /// `λ` with `g ~ t^λ`; `+∞` if `g` vanishes near 0.
    pub exponent: f64,
    pub verdict: Verdict,
    /// Supremum of the `p` with `p λ > -1`.
    pub p_max: f64,
}

fn verdict_for(p: f64, exponent: f64) -> Verdict {
    let m = p * exponent + 1.0;
    if m > MARGIN {
        Verdict::Pass
    } else if m < -MARGIN {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    }
}

/// `g ∈ L^p_loc[0, ∞)` judged by `p λ > -1`, `λ` the power exponent of `g`
/// at 0. `exponent` overrides the estimate.
pub fn lp_loc_membership(g: &Expr, p: f64, exponent: Option<f64>) -> Result<Membership> {
    let exponent = match exponent {
        Some(e) => e,
        None => match quad::exponent_at_zero(|t| g.eval_t(t))? {
            EndpointBehaviour::Zero => f64::INFINITY,
            EndpointBehaviour::Power(e) => e,
        },
    };
    let p_max = if exponent < 0.0 {
        -1.0 / exponent
    } else {
        f64::INFINITY
    };
    Ok(Membership {
        exponent,
        verdict: verdict_for(p, exponent),
        p_max,
    })
}

/// Estimate of `K = lim_{t→∞} t/ω(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum RatioLimit {
    Finite(f64),
    Infinite,
    Inconclusive(String),
}

/// `K = lim t/ω(t)` from `t ∈ {10³, 10⁴, 10⁵, 10⁶}`. The tail is classified
/// by its log-log slope; a settled tail is Aitken-extrapolated.
pub fn asymptotic_ratio_k(omega: &Expr) -> RatioLimit {
    let mut r = [0.0; 4];
    for (k, slot) in r.iter_mut().enumerate() {
        let t = 10f64.powi(3 + k as i32);
        match omega.eval_u(t) {
            Ok(w) if w == 0.0 => return RatioLimit::Infinite,
            Ok(w) if w > 0.0 => *slot = t / w,
            Ok(w) => return RatioLimit::Inconclusive(format!("omega({t:e}) = {w} is negative")),
            Err(e) => return RatioLimit::Inconclusive(e.to_string()),
        }
    }
    let d = [r[1] - r[0], r[2] - r[1], r[3] - r[2]];
    let monotone = d.iter().all(|x| *x >= 0.0) || d.iter().all(|x| *x <= 0.0);
    let (lo, hi) = r
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
    if !monotone && (hi - lo) / lo > 0.2 {
        return RatioLimit::Inconclusive(format!(
            "t/omega(t) drifts between {lo:.4e} and {hi:.4e}"
        ));
    }
    let slope = (r[3] / r[2]).log10();
    if slope > 0.05 {
        return RatioLimit::Infinite;
    }
    if slope < -0.05 {
        return RatioLimit::Finite(0.0);
    }
    let denom = d[2] - d[1];
    if monotone && d[2].abs() < d[1].abs() && denom != 0.0 {
        RatioLimit::Finite(r[3] - d[2] * d[2] / denom)
    } else {
        RatioLimit::Finite(r[3])
    }
}

/// Sampling grid for the pointwise checks: `t` log-spaced, `x` uniform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBox {
    pub t_lo: f64,
    pub t_hi: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub nt: usize,
    pub nx: usize,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox {
            t_lo: 1e-6,
            t_hi: 10.0,
            x_lo: 0.0,
            x_hi: 100.0,
            nt: 64,
            nx: 64,
        }
    }
}

impl SampleBox {
    fn ts(&self) -> Vec<f64> {
        let (a, b) = (self.t_lo.ln(), self.t_hi.ln());
        (0..self.nt)
            .map(|i| (a + (b - a) * i as f64 / (self.nt - 1) as f64).exp())
            .collect()
    }

    fn xs(&self) -> Vec<f64> {
        (0..self.nx)
            .map(|i| self.x_lo + (self.x_hi - self.x_lo) * i as f64 / (self.nx - 1) as f64)
            .collect()
    }
}

const REL_SLACK: f64 = 1e-9;

/// Worst point of a pointwise comparison `lhs ≤ rhs`.
struct Sweep {
    worst_excess: f64,
    worst: Option<(f64, f64, f64, f64)>,
    skipped: usize,
    total: usize,
}

fn sweep<F>(bx: &SampleBox, cmp: F) -> Sweep
where
    F: Fn(f64, f64) -> Result<(f64, f64)> + Sync,
{
    let (ts, xs) = (bx.ts(), bx.xs());
    let points: Vec<(f64, f64)> = ts
        .iter()
        .flat_map(|&t| xs.iter().map(move |&x| (t, x)))
        .collect();
    let results: Vec<Option<(f64, f64, f64, f64)>> = points
        .par_iter()
        .map(|&(t, x)| match cmp(t, x) {
            Ok((l, r)) if l.is_finite() && r.is_finite() => Some((t, x, l, r)),
            _ => None,
        })
        .collect();
    let mut s = Sweep {
        worst_excess: f64::NEG_INFINITY,
        worst: None,
        skipped: 0,
        total: points.len(),
    };
    for r in results {
        match r {
            None => s.skipped += 1,
            Some((t, x, l, rhs)) => {
                let excess = l - rhs * (1.0 + REL_SLACK);
                if excess > s.worst_excess {
                    s.worst_excess = excess;
                    s.worst = Some((t, x, l, rhs));
                }
            }
        }
    }
    s
}

fn sweep_check(name: &str, s: Sweep) -> Check {
    let skipped = if s.skipped > 0 {
        format!("; {} of {} points skipped (evaluation failed)", s.skipped, s.total)
    } else {
        String::new()
    };
    match s.worst {
        None => Check::new(name, Verdict::Inconclusive, format!("no point could be evaluated{skipped}")),
        Some((t, x, l, r)) if s.worst_excess > 0.0 => Check::new(
            name,
            Verdict::Fail,
            format!("violated at t = {t:.6e}, x = {x:.6e}: {l:.6e} > {r:.6e}{skipped}"),
        ),
        Some((t, x, l, r)) => Check::new(
            name,
            Verdict::Pass,
            format!(
                "{} points, tightest at t = {t:.6e}, x = {x:.6e}: {l:.6e} <= {r:.6e}{skipped}",
                s.total - s.skipped
            ),
        ),
    }
}

/// `|f(t,x)| ≤ l(t) ω(t^{1-β}|x|)` on the sample box.
pub fn envelope_check(f: &Expr, l: &Expr, omega: &Expr, beta: f64, bx: &SampleBox) -> Check {
    sweep_check(
        "envelope",
        sweep(bx, |t, x| {
            let lhs = f.eval_tx(t, x)?.abs();
            let rhs = l.eval_t(t)? * omega.eval_u(t.powf(1.0 - beta) * x.abs())?;
            Ok((lhs, rhs))
        }),
    )
}

/// `|f(t,x)| ≤ l(t)|x|^γ + k(t)` on the sample box.
pub fn growth_envelope_check(f: &Expr, l: &Expr, k: &Expr, gamma: f64, bx: &SampleBox) -> Check {
    sweep_check(
        "growth-envelope",
        sweep(bx, |t, x| {
            let lhs = f.eval_tx(t, x)?.abs();
            let rhs = l.eval_t(t)? * x.abs().powf(gamma) + k.eval_t(t)?;
            Ok((lhs, rhs))
        }),
    )
}

/// `|f(t,x) - f(t,y)| ≤ l(t)|x-y|` over `nt × nx × nx` triples.
pub fn lipschitz_envelope_check(f: &Expr, l: &Expr, bx: &SampleBox) -> Check {
    let xs = bx.xs();
    sweep_check(
        "lipschitz",
        sweep(bx, |t, x| {
            let fx = f.eval_tx(t, x)?;
            let lt = l.eval_t(t)?;
            let mut worst: Option<(f64, f64)> = None;
            for &y in &xs {
                if y == x {
                    continue;
                }
                let fy = f.eval_tx(t, y)?;
                let gap = (x - y).abs();
                let q = (fx - fy).abs() / gap;
                // rounding in the difference quotient
                let noise = 4.0 * f64::EPSILON * (fx.abs() + fy.abs()) / gap;
                let excess = q - lt - noise;
                if worst.map_or(true, |(e, _)| excess > e) {
                    worst = Some((excess, q - noise));
                }
            }
            Ok(match worst {
                Some((_, q)) => (q, lt),
                None => (0.0, lt),
            })
        }),
    )
}

/// `ω` nonnegative and nondecreasing on a log grid of `[1e-6, 1e6]` and at 0.
pub fn omega_monotone_check(omega: &Expr) -> Check {
    let mut us = vec![0.0];
    us.extend((0..=240).map(|i| 10f64.powf(-6.0 + i as f64 * 0.05)));
    let mut prev = f64::NEG_INFINITY;
    for &u in &us {
        match omega.eval_u(u) {
            Ok(w) if w < 0.0 => {
                return Check::new("omega-monotone", Verdict::Fail, format!("omega({u:e}) = {w} < 0"))
            }
            Ok(w) if w < prev * (1.0 - 1e-12) => {
                return Check::new(
                    "omega-monotone",
                    Verdict::Fail,
                    format!("omega decreases before u = {u:e}"),
                )
            }
            Ok(w) => prev = w,
            Err(e) => {
                return Check::new("omega-monotone", Verdict::Inconclusive, format!("omega({u:e}): {e}"))
            }
        }
    }
    Check::new(
        "omega-monotone",
        Verdict::Pass,
        "nonnegative and nondecreasing on 242 samples of [0, 1e6]",
    )
}

/// Common admissible range for a set of `L^p_loc` requirements.
struct PSearch {
    lo: f64,
    hi: f64,
    p_max: f64,
    checks: Vec<Check>,
}

impl PSearch {
    fn new(beta: f64) -> Self {
        PSearch {
            lo: 1.0 / beta,
            hi: 1.0 / beta + 10.0,
            p_max: f64::INFINITY,
            checks: Vec::new(),
        }
    }

    /// Adds the requirement `g ∈ L^p_loc`, verdict taken at `p = 1/β`.
    fn require(&mut self, label: &str, g: &Expr, exponent: Option<f64>) {
        let name = format!("lp-loc {label}");
        match lp_loc_membership(g, self.lo, exponent) {
            Ok(m) => {
                self.hi = self.hi.min(m.p_max);
                self.p_max = self.p_max.min(m.p_max);
                let bound = if m.p_max.is_finite() {
                    format!("needs p < {:.6}", m.p_max)
                } else {
                    "any p".to_string()
                };
                self.checks.push(Check::new(
                    name,
                    m.verdict,
                    format!("exponent at 0: {:.6}; {bound}", m.exponent),
                ));
            }
            Err(e) => self.checks.push(Check::new(name, Verdict::Inconclusive, e.to_string())),
        }
    }

    fn interval(&self) -> Option<(f64, f64)> {
        (self.hi > self.lo).then_some((self.lo, self.hi))
    }

    /// Optional check of a user-chosen `p` against the interval.
    fn finish(mut self, p: Option<f64>) -> (Vec<Check>, Option<(f64, f64)>) {
        let interval = self.interval();
        if let Some(p) = p {
            let verdict = if p <= self.lo {
                Verdict::Fail
            } else if self.p_max.is_finite() {
                verdict_for(p, -1.0 / self.p_max)
            } else {
                Verdict::Pass
            };
            self.checks.push(Check::new(
                "p-admissible",
                verdict,
                format!("p = {p} against ({:.6}, {:.6})", self.lo, self.hi),
            ));
        }
        (self.checks, interval)
    }
}

/// `∞` or a positive limit of `t/ω(t)`.
pub fn ratio_check(omega: &Expr) -> Check {
    match asymptotic_ratio_k(omega) {
        RatioLimit::Infinite => Check::new("asymptotic-ratio", Verdict::Pass, "t/omega(t) -> +inf"),
        RatioLimit::Finite(k) if k > 0.0 => {
            Check::new("asymptotic-ratio", Verdict::Pass, format!("t/omega(t) -> {k:.6}"))
        }
        RatioLimit::Finite(k) => Check::new(
            "asymptotic-ratio",
            Verdict::Fail,
            format!("t/omega(t) -> {k:.6}; omega grows superlinearly"),
        ),
        RatioLimit::Inconclusive(why) => Check::new("asymptotic-ratio", Verdict::Inconclusive, why),
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidInput(format!("beta must lie in (0, 1), got {beta}")));
    }
    Ok(())
}

/// Settings shared by the route checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckOptions {
    /// A specific `p` to test against the admissible interval.
    pub p: Option<f64>,
    pub sample: SampleBox,
    /// Declared exponent at 0 of the route's `l`-term, replacing the
    /// regression.
    pub l_exponent: Option<f64>,
    /// Declared exponent at 0 of the route's `k`- or `f(t,0)`-term.
    pub k_exponent: Option<f64>,
}

/// Existence route: weighted envelope, `t^{1-β} l ∈ L^p_loc`, monotone
/// `ω` and a positive `lim t/ω(t)`.
pub fn existence_check(
    f: &Expr,
    l: &Expr,
    omega: &Expr,
    beta: f64,
    opts: &CheckOptions,
) -> Result<HypothesisReport> {
    check_beta(beta)?;
    let mut search = PSearch::new(beta);
    search.require("t^(1-beta) l", &l.clone().times_t_pow(1.0 - beta), opts.l_exponent);
    let (lp, admissible_p) = search.finish(opts.p);
    let mut checks = vec![
        envelope_check(f, l, omega, beta, &opts.sample),
        omega_monotone_check(omega),
    ];
    checks.extend(lp);
    checks.push(ratio_check(omega));
    Ok(HypothesisReport {
        route: Route::Existence,
        checks,
        admissible_p,
    })
}

/// Growth route. `f` is optional; without it only the integrability
/// conditions are checked.
pub fn growth_check(
    f: Option<&Expr>,
    l: &Expr,
    k: &Expr,
    gamma: f64,
    beta: f64,
    opts: &CheckOptions,
) -> Result<HypothesisReport> {
    check_beta(beta)?;
    let mut checks = Vec::new();
    checks.push(if gamma > 0.0 && gamma <= 1.0 {
        Check::new("gamma-range", Verdict::Pass, format!("gamma = {gamma} in (0, 1]"))
    } else {
        Check::new("gamma-range", Verdict::Fail, format!("gamma = {gamma} outside (0, 1]"))
    });
    if let Some(f) = f {
        checks.push(growth_envelope_check(f, l, k, gamma, &opts.sample));
    }
    let mut search = PSearch::new(beta);
    search.require(
        "t^((1-gamma)(1-beta)) l",
        &l.clone().times_t_pow((1.0 - gamma) * (1.0 - beta)),
        opts.l_exponent,
    );
    search.require("t^(1-beta) k", &k.clone().times_t_pow(1.0 - beta), opts.k_exponent);
    let (lp, admissible_p) = search.finish(opts.p);
    checks.extend(lp);
    Ok(HypothesisReport {
        route: Route::Growth,
        checks,
        admissible_p,
    })
}

/// Uniqueness route: sampled Lipschitz bound, `l ∈ L^p_loc` and
/// `t^{1-β}|f(t,0)| ∈ L^p_loc`.
pub fn lipschitz_check(
    f: &Expr,
    l: &Expr,
    beta: f64,
    opts: &CheckOptions,
) -> Result<HypothesisReport> {
    check_beta(beta)?;
    let mut checks = vec![lipschitz_envelope_check(f, l, &opts.sample)];
    let mut search = PSearch::new(beta);
    search.require("l", l, opts.l_exponent);
    let f0 = Expr::abs(f.substitute(Var::X, &Expr::constant(0.0)));
    search.require("t^(1-beta) |f(t,0)|", &f0.times_t_pow(1.0 - beta), opts.k_exponent);
    let (lp, admissible_p) = search.finish(opts.p);
    checks.extend(lp);
    Ok(HypothesisReport {
        route: Route::Lipschitz,
        checks,
        admissible_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Expr {
        Expr::parse(s, &[Var::T]).unwrap()
    }
    fn u(s: &str) -> Expr {
        Expr::parse(s, &[Var::U]).unwrap()
    }
    fn tx(s: &str) -> Expr {
        Expr::parse(s, &[Var::T, Var::X]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let m = lp_loc_membership(&t("t^(-7/12) + t^(-1/2)"), 1.6, None).unwrap();
        assert_eq!(m.verdict, Verdict::Pass);
        assert!((m.p_max - 12.0 / 7.0).abs() < 1e-6);
        let m = lp_loc_membership(&t("t^(-2/3)"), 2.0, None).unwrap();
        assert_eq!(m.verdict, Verdict::Fail);
        let m = lp_loc_membership(&t("1"), 50.0, None).unwrap();
        assert_eq!(m.verdict, Verdict::Pass);
        let m = lp_loc_membership(&t("t^(-1/2)"), 2.0, None).unwrap();
        assert_eq!(m.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn ratio_examples() {
        match asymptotic_ratio_k(&u("u^(1/2) + u")) {
            RatioLimit::Finite(k) => assert!((k - 1.0).abs() < 1e-3, "{k}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(asymptotic_ratio_k(&u("u^(1/2)")), RatioLimit::Infinite);
        assert_eq!(asymptotic_ratio_k(&u("u")), RatioLimit::Finite(1.0));
        assert_eq!(asymptotic_ratio_k(&u("u^2")), RatioLimit::Finite(0.0));
    }

    #[test]
    fn envelope_examples() {
        let bx = SampleBox::default();
        let c = envelope_check(
            &tx("t^(-3/4)*x^(1/2) + t^(-1/2)*x"),
            &t("t^(-11/12) + t^(-5/6)"),
            &u("u^(1/2) + u"),
            2.0 / 3.0,
            &bx,
        );
        assert_eq!(c.verdict, Verdict::Pass, "{}", c.evidence);
        let small = SampleBox { x_hi: 10.0, ..bx };
        let c = envelope_check(&tx("x^2"), &t("1"), &u("u"), 0.5, &small);
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(c.evidence.contains("x = 1.0"), "{}", c.evidence);
    }

    #[test]
    fn routes() {
        let opts = CheckOptions::default();
        let beta = 2.0 / 3.0;
        let r = growth_check(
            Some(&tx("t^(-2/3)*ln(1 + x^(1/2))")),
            &t("t^(-2/3)"),
            &t("0"),
            0.5,
            beta,
            &opts,
        )
        .unwrap();
        assert_eq!(r.verdict(), Verdict::Pass, "{r:?}");
        let (lo, hi) = r.admissible_p.unwrap();
        assert!((lo - 1.5).abs() < 1e-12 && (hi - 2.0).abs() < 1e-6);

        let r = growth_check(None, &t("t^(-2)"), &t("0"), 1.0, 0.5, &opts).unwrap();
        assert_eq!(r.verdict(), Verdict::Fail);
        assert!(r.admissible_p.is_none());

        let r = lipschitz_check(&tx("t^(-1/2)*x^2/(1 + x) + t^(-3/4)"), &t("t^(-1/2)"), beta, &opts)
            .unwrap();
        assert_eq!(r.verdict(), Verdict::Pass, "{r:?}");
        let r = lipschitz_check(&tx("x"), &t("1"), 0.5, &opts).unwrap();
        assert_eq!(r.verdict(), Verdict::Pass, "{r:?}");
        let narrow = CheckOptions {
            sample: SampleBox { x_hi: 10.0, ..SampleBox::default() },
            ..CheckOptions::default()
        };
        let r = lipschitz_check(&tx("x^2"), &t("1"), 0.5, &narrow).unwrap();
        assert_eq!(r.verdict(), Verdict::Fail);
    }
}
