//! Explicit upper bounds for Gronwall-Bihari type integral inequalities.
//!
//! Every bound has the shape
//!
//! ```text
//! B(t) = t^w · 2^{1-1/p} · (Ω⁻¹(Ω(a^p) + C(t)·J(t)))^{1/p}
//! ```
//!
//! where `J` is an integral of a power of `l` and `C` collects the
//! Hölder constants of the family. The two power-law families have closed
//! forms that need no transform at all.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::expr::{Expr, Var};
use crate::omega::{OmegaTransform, PowerMode};
use crate::quad::{self, EndpointBehaviour, Tolerance};

/// Inequality families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// `u ≤ a(t) + b(t)(∫₀ᵗ l ω(u))^{1/p}`.
    Integral,
    /// [`Theorem::Integral`] with `ω(u) = u^{pγ}`, in closed form.
    IntegralPower,
    /// `u ≤ a(t) + b(t)∫₀ᵗ (t-s)^{β-1} l ω(u)`.
    Singular,
    /// `u ≤ a t^{-α} + b t^{-δ}∫₀ᵗ (t-s)^{β-1} f(s,u)` with
    /// `|f(t,x)| ≤ l(t) ω(t^α |x|)`.
    SingularWeighted,
    /// `u ≤ a t^{β-1} + b(t)∫₀ᵗ (t-s)^{β-1} f(s,u)` with
    /// `|f(t,x)| ≤ l(t) ω(t^{1-β} |x|)`. Splitting `(t/(t-s))^{1-β}` before
    /// Hölder only needs `t^{1-β} l ∈ L^p`.
    SingularSplit,
    /// [`Theorem::SingularSplit`] with `f = l u^γ`, in closed form.
    SingularSplitPower,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::Integral,
        Theorem::IntegralPower,
        Theorem::Singular,
        Theorem::SingularWeighted,
        Theorem::SingularSplit,
        Theorem::SingularSplitPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Integral => "integral",
            Theorem::IntegralPower => "integral-power",
            Theorem::Singular => "singular",
            Theorem::SingularWeighted => "singular-weighted",
            Theorem::SingularSplit => "singular-split",
            Theorem::SingularSplitPower => "singular-split-power",
        }
    }

    pub fn from_name(s: &str) -> Option<Theorem> {
        Theorem::ALL.into_iter().find(|t| t.name() == s)
    }

    fn is_singular(self) -> bool {
        !matches!(self, Theorem::Integral | Theorem::IntegralPower)
    }

    fn needs_gamma(self) -> bool {
        matches!(self, Theorem::IntegralPower | Theorem::SingularSplitPower)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of one inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityProblem {
    pub a: Expr,
    pub b: Expr,
    pub l: Expr,
    /// `ω(u)`; ignored by the power-law families, which use `γ`.
    pub omega: Expr,
    pub p: f64,
    pub beta: Option<f64>,
    pub alpha: f64,
    pub delta: f64,
    pub gamma: Option<f64>,
    pub horizon: f64,
}

impl InequalityProblem {
    pub fn new(a: Expr, b: Expr, l: Expr, omega: Expr, p: f64, horizon: f64) -> Self {
        InequalityProblem {
            a,
            b,
            l,
            omega,
            p,
            beta: None,
            alpha: 0.0,
            delta: 0.0,
            gamma: None,
            horizon,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_weights(mut self, alpha: f64, delta: f64) -> Self {
        self.alpha = alpha;
        self.delta = delta;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    /// `β`, required by the singular families.
    pub fn beta_checked(&self) -> Result<f64> {
        self.beta
            .ok_or_else(|| invalid("beta is required for weakly singular inequalities"))
    }

    fn gamma_checked(&self) -> Result<f64> {
        let g = self
            .gamma
            .ok_or_else(|| invalid("gamma is required for the power-law bounds"))?;
        if !(g > 0.0 && g <= 1.0) {
            return Err(invalid(format!("gamma must lie in (0, 1], got {g}")));
        }
        Ok(g)
    }

    /// Checks every precondition of `theorem`.
    pub fn validate(&self, theorem: Theorem) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid(format!("T must be positive, got {}", self.horizon)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(invalid(format!("p must be at least 1, got {}", self.p)));
        }
        if theorem.is_singular() {
            let beta = self.beta_checked()?;
            if !(beta > 0.0 && beta < 1.0) {
                return Err(invalid(format!("beta must lie in (0, 1), got {beta}")));
            }
            if !(self.p > 1.0 / beta) {
                return Err(invalid(format!(
                    "p > 1/beta is violated (p = {}, 1/beta = {})",
                    self.p,
                    1.0 / beta
                )));
            }
        }
        if theorem.needs_gamma() {
            self.gamma_checked()?;
        }
        for (name, e) in [("a", &self.a), ("b", &self.b), ("l", &self.l)] {
            if e.uses(Var::X) || e.uses(Var::U) {
                return Err(invalid(format!("{name} may only use the variable t")));
            }
        }
        if !theorem.needs_gamma() && (self.omega.uses(Var::T) || self.omega.uses(Var::X)) {
            return Err(invalid("omega may only use the variable u"));
        }
        match theorem {
            Theorem::SingularWeighted => {
                if !(self.alpha > self.delta && self.delta >= 0.0) {
                    return Err(invalid(format!(
                        "alpha > delta >= 0 is violated (alpha = {}, delta = {})",
                        self.alpha, self.delta
                    )));
                }
                for (name, e) in [("a", &self.a), ("b", &self.b)] {
                    if !e.is_constant() {
                        return Err(invalid(format!("{name} must be a constant here")));
                    }
                }
            }
            Theorem::SingularSplit | Theorem::SingularSplitPower => {
                if !self.a.is_constant() {
                    return Err(invalid("a must be a constant here"));
                }
            }
            _ => {}
        }
        self.check_monotone("a", &self.a)?;
        self.check_monotone("b", &self.b)?;
        for i in 0..256 {
            let t = self.horizon * (1e-6f64).powf(1.0 - i as f64 / 255.0);
            let v = self.l.eval_t(t)?;
            if v < 0.0 {
                return Err(invalid(format!("l is negative at t = {t}")));
            }
        }
        Ok(())
    }

    fn check_monotone(&self, name: &str, e: &Expr) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..=256 {
            let t = self.horizon * i as f64 / 256.0;
            let v = e.eval_t(t)?;
            if v < 0.0 {
                return Err(invalid(format!("{name} is negative at t = {t}")));
            }
            if v < prev - 1e-12 * prev.abs().max(1.0) {
                return Err(invalid(format!("{name} is not nondecreasing near t = {t}")));
            }
            prev = v;
        }
        Ok(())
    }
}

/// Notes attached to a bound about conventions it relied on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFlag {
    /// `Ω` and `Ω⁻¹` came from the power-law closed form.
    ClosedFormOmega,
    /// `Ω` and `Ω⁻¹` came from the numeric table.
    NumericOmega,
    /// The initial term `a` vanishes.
    ZeroInitialValue,
    /// `Ω(0⁺) = -∞` was used for a vanishing initial term.
    LowerDivergence,
    /// `T₁ < T` because the argument of `Ω⁻¹` leaves its domain.
    HorizonTruncated,
}

type ScalarFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// An evaluable bound `B(t) = t^w · W(t)` on `(0, T₁]`.
#[derive(Clone)]
pub struct BoundCurve {
    theorem: Theorem,
    t1: f64,
    weight_exponent: f64,
    domain_sup: f64,
    flags: Vec<BoundFlag>,
    inner: ScalarFn,
}

impl fmt::Debug for BoundCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundCurve")
            .field("theorem", &self.theorem)
            .field("t1", &self.t1)
            .field("weight_exponent", &self.weight_exponent)
            .field("domain_sup", &self.domain_sup)
            .field("flags", &self.flags)
            .finish_non_exhaustive()
    }
}

impl BoundCurve {
    pub fn theorem(&self) -> Theorem {
        self.theorem
    }

    /// Validity horizon.
    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// The bound is `t^w` times the monotone part [`BoundCurve::weighted`].
    pub fn weight_exponent(&self) -> f64 {
        self.weight_exponent
    }

    /// `sup Ω` on the range used by the bound; `+∞` for the power families.
    pub fn domain_sup(&self) -> f64 {
        self.domain_sup
    }

    pub fn flags(&self) -> &[BoundFlag] {
        &self.flags
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(t > 0.0) {
            return Err(invalid(format!("bounds are evaluated for t > 0, got {t}")));
        }
        if t > self.t1 * (1.0 + 1e-12) {
            return Err(Error::HorizonCollapse(format!(
                "t = {t} lies beyond the validity horizon T1 = {}",
                self.t1
            )));
        }
        Ok(())
    }

    /// `W(t) = t^{-w} B(t)`, nondecreasing in `t`.
    pub fn weighted(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        (self.inner)(t)
    }

    /// `B(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let w = self.weighted(t)?;
        Ok(if self.weight_exponent == 0.0 {
            w
        } else {
            t.powf(self.weight_exponent) * w
        })
    }
}

/// `J(t) = ∫₀ᵗ g(s) ds` for a nonnegative `g` with an integrable power
/// singularity at 0.
#[derive(Debug, Clone)]
pub struct InnerIntegral {
    kind: InnerKind,
}

#[derive(Debug, Clone)]
enum InnerKind {
    Zero,
    Power { c: f64, k: f64 },
    Numeric { g: Expr, exponent: f64 },
}

impl InnerIntegral {
    pub fn new(g: Expr) -> Result<Self> {
        if let Some((c, k)) = g.as_power_law(Var::T) {
            if c == 0.0 {
                return Ok(InnerIntegral {
                    kind: InnerKind::Zero,
                });
            }
            if c < 0.0 {
                return Err(invalid(format!("integrand {g} is negative")));
            }
            if k <= -1.0 {
                return Err(Error::Integrability(format!(
                    "{g} behaves like t^{k} near 0"
                )));
            }
            return Ok(InnerIntegral {
                kind: InnerKind::Power { c, k },
            });
        }
        let exponent = match quad::exponent_at_zero(|t| g.eval_t(t))? {
            EndpointBehaviour::Zero => f64::INFINITY,
            EndpointBehaviour::Power(e) => e,
        };
        if exponent <= -1.0 + 1e-6 {
            return Err(Error::Integrability(format!(
                "{g} behaves like t^{exponent:.4} near 0"
            )));
        }
        Ok(InnerIntegral {
            kind: InnerKind::Numeric { g, exponent },
        })
    }

    /// Exponent of `g` at 0 (`+∞` for a vanishing integrand).
    pub fn exponent(&self) -> f64 {
        match &self.kind {
            InnerKind::Zero => f64::INFINITY,
            InnerKind::Power { k, .. } => *k,
            InnerKind::Numeric { exponent, .. } => *exponent,
        }
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        match &self.kind {
            InnerKind::Zero => Ok(0.0),
            InnerKind::Power { c, k } => Ok(c * t.powf(k + 1.0) / (k + 1.0)),
            InnerKind::Numeric { g, exponent } => quad::integral_from_zero(
                |s| g.eval_t(s),
                t,
                *exponent,
                Tolerance::new(1e-300, 1e-12),
            ),
        }
    }
}

/// Selects how `Ω` is evaluated for the transform-based families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaPath {
    /// Closed form when `ω` is a power law, table otherwise.
    #[default]
    Auto,
    /// Always the numeric table.
    Numeric,
}

/// Bound for `prob` under `theorem`.
pub fn bound(prob: &InequalityProblem, theorem: Theorem) -> Result<BoundCurve> {
    bound_via(prob, theorem, OmegaPath::Auto)
}

/// As [`bound`], choosing the evaluation path of `Ω`.
pub fn bound_via(prob: &InequalityProblem, theorem: Theorem, path: OmegaPath) -> Result<BoundCurve> {
    prob.validate(theorem)?;
    match theorem {
        Theorem::Integral => integral_bound(prob, path),
        Theorem::IntegralPower => integral_power_bound(prob),
        Theorem::Singular => singular_bound(prob, path),
        Theorem::SingularWeighted => weighted_singular_bound(prob, path),
        Theorem::SingularSplit => split_singular_bound(prob, path),
        Theorem::SingularSplitPower => split_power_bound(prob),
    }
}

fn conj(p: f64) -> f64 {
    p / (p - 1.0)
}

/// `(q(β-1)+1)^{1/q}`, the Hölder norm constant of the kernel on `[0, 1]`.
fn kernel_norm(beta: f64, q: f64) -> f64 {
    (q * (beta - 1.0) + 1.0).powf(1.0 / q)
}

fn scalar(e: &Expr) -> ScalarFn {
    let e = e.clone();
    Arc::new(move |t| e.eval_t(t))
}

fn constant_of(e: &Expr, name: &str) -> Result<f64> {
    e.constant_value()
        .ok_or_else(|| invalid(format!("{name} must be a constant")))
}

fn transform(omega: &Expr, p: f64, mode: PowerMode, path: OmegaPath) -> Result<OmegaTransform> {
    match path {
        OmegaPath::Auto => OmegaTransform::new(omega, p, mode),
        OmegaPath::Numeric => OmegaTransform::numeric(omega, p, mode),
    }
}

fn initial_is_zero(a: &Expr, horizon: f64) -> bool {
    match a.constant_value() {
        Some(c) => c == 0.0,
        None => a.eval_t(horizon * 1e-12).is_ok_and(|v| v == 0.0),
    }
}

struct TransformParts {
    theorem: Theorem,
    p: f64,
    horizon: f64,
    a: ScalarFn,
    a_zero: bool,
    coef: ScalarFn,
    inner: InnerIntegral,
    weight_exponent: f64,
}

fn transform_bound(parts: TransformParts, tr: OmegaTransform) -> Result<BoundCurve> {
    let TransformParts {
        theorem,
        p,
        horizon,
        a,
        a_zero,
        coef,
        inner,
        weight_exponent,
    } = parts;
    let tr = Arc::new(tr);
    let g: ScalarFn = {
        let tr = tr.clone();
        let a = a.clone();
        Arc::new(move |t| {
            let base = tr.eval(a(t)?.powf(p))?;
            let c = coef(t)?;
            let j = inner.at(t)?;
            Ok(if c == 0.0 || j == 0.0 { base } else { base + c * j })
        })
    };
    let sup = tr.domain_sup()?;
    let t1 = horizon_t1(&*g, sup, horizon)?;
    let mut flags = vec![if tr.is_closed_form() {
        BoundFlag::ClosedFormOmega
    } else {
        BoundFlag::NumericOmega
    }];
    if a_zero {
        flags.push(BoundFlag::ZeroInitialValue);
        if tr.lower_divergent() {
            flags.push(BoundFlag::LowerDivergence);
        }
    }
    if t1 < horizon {
        flags.push(BoundFlag::HorizonTruncated);
    }
    let prefactor = 2f64.powf(1.0 - 1.0 / p);
    let inner: ScalarFn = Arc::new(move |t| {
        let x = tr.inverse(g(t)?)?;
        Ok(prefactor * x.powf(1.0 / p))
    });
    Ok(BoundCurve {
        theorem,
        t1,
        weight_exponent,
        domain_sup: sup,
        flags,
        inner,
    })
}

/// Largest `T₁ ≤ horizon` with `g(T₁) < sup` for a nondecreasing `g`,
/// located by bisection to relative accuracy 1e-6.
pub fn horizon_t1(g: &(dyn Fn(f64) -> Result<f64> + Send + Sync), sup: f64, horizon: f64) -> Result<f64> {
    if sup == f64::INFINITY {
        return Ok(horizon);
    }
    let mut lo = horizon * 1e-12;
    let g0 = g(lo)?;
    if g0 >= sup {
        return Err(Error::HorizonCollapse(format!(
            "the argument of the inverse transform starts at {g0}, outside its domain (sup {sup})"
        )));
    }
    if g(horizon)? < sup {
        return Ok(horizon);
    }
    let mut hi = horizon;
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid)? < sup {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn integral_bound(prob: &InequalityProblem, path: OmegaPath) -> Result<BoundCurve> {
    let p = prob.p;
    let tr = transform(&prob.omega, p, PowerMode::Plain, path)?;
    let b = prob.b.clone();
    transform_bound(
        TransformParts {
            theorem: Theorem::Integral,
            p,
            horizon: prob.horizon,
            a: scalar(&prob.a),
            a_zero: initial_is_zero(&prob.a, prob.horizon),
            coef: Arc::new(move |t| Ok(b.eval_t(t)?.powf(p))),
            inner: InnerIntegral::new(prob.l.clone())?,
            weight_exponent: 0.0,
        },
        tr,
    )
}

fn singular_bound(prob: &InequalityProblem, path: OmegaPath) -> Result<BoundCurve> {
    let (p, beta) = (prob.p, prob.beta_checked()?);
    let q = conj(p);
    let norm = kernel_norm(beta, q);
    let tr = transform(&prob.omega, p, PowerMode::PthPower, path)?;
    let b = prob.b.clone();
    transform_bound(
        TransformParts {
            theorem: Theorem::Singular,
            p,
            horizon: prob.horizon,
            a: scalar(&prob.a),
            a_zero: initial_is_zero(&prob.a, prob.horizon),
            coef: Arc::new(move |t| {
                let c = t.powf(beta - 1.0 + 1.0 / q) * b.eval_t(t)? / norm;
                Ok(c.powf(p))
            }),
            inner: InnerIntegral::new(Expr::powf(prob.l.clone(), p))?,
            weight_exponent: 0.0,
        },
        tr,
    )
}

fn weighted_singular_bound(prob: &InequalityProblem, path: OmegaPath) -> Result<BoundCurve> {
    let (p, beta) = (prob.p, prob.beta_checked()?);
    let (alpha, delta) = (prob.alpha, prob.delta);
    let q = conj(p);
    let norm = kernel_norm(beta, q);
    let a = constant_of(&prob.a, "a")?;
    let b = constant_of(&prob.b, "b")?;
    let tr = transform(&prob.omega, p, PowerMode::PthPower, path)?;
    transform_bound(
        TransformParts {
            theorem: Theorem::SingularWeighted,
            p,
            horizon: prob.horizon,
            a: Arc::new(move |_| Ok(a)),
            a_zero: a == 0.0,
            coef: Arc::new(move |t| {
                let c = b * t.powf(alpha - delta + beta - 1.0 + 1.0 / q) / norm;
                Ok(c.powf(p))
            }),
            inner: InnerIntegral::new(Expr::powf(prob.l.clone(), p))?,
            weight_exponent: -alpha,
        },
        tr,
    )
}

/// `c(t) = 2^{1/q} b(t) t^{β-1+1/q} / (qβ-q+1)^{1/q}` of the split families.
fn split_coefficient(b: &Expr, p: f64, beta: f64) -> impl Fn(f64) -> Result<f64> + Send + Sync {
    let q = conj(p);
    let norm = kernel_norm(beta, q);
    let b = b.clone();
    move |t| Ok(2f64.powf(1.0 / q) * b.eval_t(t)? * t.powf(beta - 1.0 + 1.0 / q) / norm)
}

fn split_singular_bound(prob: &InequalityProblem, path: OmegaPath) -> Result<BoundCurve> {
    let (p, beta) = (prob.p, prob.beta_checked()?);
    let a = constant_of(&prob.a, "a")?;
    let c = split_coefficient(&prob.b, p, beta);
    let tr = transform(&prob.omega, p, PowerMode::PthPower, path)?;
    let g = Expr::powf(prob.l.clone(), p).times_t_pow(p * (1.0 - beta));
    transform_bound(
        TransformParts {
            theorem: Theorem::SingularSplit,
            p,
            horizon: prob.horizon,
            a: Arc::new(move |_| Ok(a)),
            a_zero: a == 0.0,
            coef: Arc::new(move |t| Ok(c(t)?.powf(p))),
            inner: InnerIntegral::new(g)?,
            weight_exponent: beta - 1.0,
        },
        tr,
    )
}

fn integral_power_bound(prob: &InequalityProblem) -> Result<BoundCurve> {
    let (p, gamma) = (prob.p, prob.gamma_checked()?);
    let inner = InnerIntegral::new(prob.l.clone())?;
    let (a, b) = (prob.a.clone(), prob.b.clone());
    let prefactor = 2f64.powf(1.0 - 1.0 / p);
    let f: ScalarFn = if gamma == 1.0 {
        Arc::new(move |t| {
            let growth = 2f64.powf(p - 1.0) * b.eval_t(t)?.powf(p) / p * inner.at(t)?;
            Ok(prefactor * a.eval_t(t)? * growth.exp())
        })
    } else {
        Arc::new(move |t| {
            let s = a.eval_t(t)?.powf(p * (1.0 - gamma))
                + (1.0 - gamma)
                    * 2f64.powf((p - 1.0) * gamma)
                    * b.eval_t(t)?.powf(p)
                    * inner.at(t)?;
            Ok(prefactor * s.powf(1.0 / (p * (1.0 - gamma))))
        })
    };
    closed_curve(Theorem::IntegralPower, prob, f, 0.0)
}

fn split_power_bound(prob: &InequalityProblem) -> Result<BoundCurve> {
    let (p, beta, gamma) = (prob.p, prob.beta_checked()?, prob.gamma_checked()?);
    let a = constant_of(&prob.a, "a")?;
    let c = split_coefficient(&prob.b, p, beta);
    let prefactor = 2f64.powf(1.0 - 1.0 / p);
    let f: ScalarFn = if gamma == 1.0 {
        let inner = InnerIntegral::new(Expr::powf(prob.l.clone(), p))?;
        Arc::new(move |t| {
            let growth = 2f64.powf(p - 1.0) * c(t)?.powf(p) / p * inner.at(t)?;
            Ok(prefactor * a * growth.exp())
        })
    } else {
        let g = Expr::powf(prob.l.clone(), p).times_t_pow(p * (1.0 - gamma) * (1.0 - beta));
        let inner = InnerIntegral::new(g)?;
        Arc::new(move |t| {
            let s = a.powf(p * (1.0 - gamma))
                + (1.0 - gamma) * 2f64.powf((p - 1.0) * gamma) * c(t)?.powf(p) * inner.at(t)?;
            Ok(prefactor * s.powf(1.0 / (p * (1.0 - gamma))))
        })
    };
    closed_curve(Theorem::SingularSplitPower, prob, f, beta - 1.0)
}

fn closed_curve(
    theorem: Theorem,
    prob: &InequalityProblem,
    inner: ScalarFn,
    weight_exponent: f64,
) -> Result<BoundCurve> {
    let mut flags = vec![BoundFlag::ClosedFormOmega];
    if initial_is_zero(&prob.a, prob.horizon) {
        flags.push(BoundFlag::ZeroInitialValue);
    }
    Ok(BoundCurve {
        theorem,
        t1: prob.horizon,
        weight_exponent,
        domain_sup: f64::INFINITY,
        flags,
        inner,
    })
}
