//! Picard iteration for `D^β x = f(t, x)`, `lim t^{1-β} x(t) = x0`, in the
//! weighted variable `v = t^{1-β} x`:
//!
//! `v(t) = x0 + t^{1-β}/Γ(β) ∫₀ᵗ (t-s)^{β-1} f(s, s^{β-1} v(s)) ds`.
//!
//! Also solves the inequality families taken with equality, whose minimal
//! solutions must lie below the corresponding bound curves.

use rayon::prelude::*;

use crate::bounds::{bound, BoundCurve, InequalityProblem, Theorem};
use crate::error::{invalid, Error, Result};
use crate::expr::{Expr, Var};
use crate::operators::{at_node, limit_at_zero, GradedMesh, KernelWeights, ProductRule, WeightedSample};
use crate::quad::{self, EndpointBehaviour};
use crate::special::gamma;

const BLOW_UP: f64 = 1e12;

/// Upper limit for [`FivpSpec::grading`].
pub const MAX_GRADING: f64 = 32.0;

/// A growth envelope for the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub enum Envelope {
    /// `|f(t,x)| ≤ l(t) ω(t^{1-β}|x|)`.
    Omega { l: Expr, omega: Expr },
    /// `|f(t,x)| ≤ l(t)|x|^γ + k(t)`, `0 < γ ≤ 1`.
    Growth { l: Expr, k: Expr, gamma: f64 },
}

impl Envelope {
    /// The growth envelope implied by `|f(t,x) - f(t,y)| ≤ l(t)|x-y|`:
    /// `|f(t,x)| ≤ l(t)|x| + |f(t,0)|`.
    pub fn lipschitz(f: &Expr, l: &Expr) -> Envelope {
        Envelope::Growth {
            l: l.clone(),
            k: Expr::abs(f.substitute(Var::X, &Expr::constant(0.0))),
            gamma: 1.0,
        }
    }

    /// `(l̂, ω̂)` with `|f(t,x)| ≤ l̂(t) ω̂(t^{1-β}|x|)`. The growth form uses
    /// `l|x|^γ + k ≤ (t^{γ(β-1)} l + k)((t^{1-β}|x|)^γ + 1)`.
    pub fn combined(&self, beta: f64) -> (Expr, Expr) {
        match self {
            Envelope::Omega { l, omega } => (l.clone(), omega.clone()),
            Envelope::Growth { l, k, gamma } => (
                Expr::add(l.clone().times_t_pow(gamma * (beta - 1.0)), k.clone()),
                Expr::add(
                    Expr::powf(Expr::var(Var::U), *gamma),
                    Expr::constant(1.0),
                ),
            ),
        }
    }
}

/// A fractional initial value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FivpSpec {
    pub beta: f64,
    /// `lim_{t→0⁺} t^{1-β} x(t)`.
    pub x0: f64,
    /// `f(t, x)`.
    pub f: Expr,
    pub envelope: Option<Envelope>,
    pub horizon: f64,
    /// Hölder exponent used by the envelope bound.
    pub p: Option<f64>,
}

impl FivpSpec {
    pub fn new(beta: f64, x0: f64, f: Expr, horizon: f64) -> Self {
        FivpSpec {
            beta,
            x0,
            f,
            envelope: None,
            horizon,
            p: None,
        }
    }

    pub fn with_envelope(mut self, envelope: Envelope, p: f64) -> Self {
        self.envelope = Some(envelope);
        self.p = Some(p);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(invalid(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid(format!("T must be positive, got {}", self.horizon)));
        }
        if !self.x0.is_finite() {
            return Err(invalid("x0 must be finite"));
        }
        if self.f.uses(Var::U) {
            return Err(invalid("f may only use t and x"));
        }
        if self.envelope.is_some() {
            let p = self.p.ok_or_else(|| invalid("an envelope needs p"))?;
            if !(p > 1.0 / self.beta) {
                return Err(invalid(format!(
                    "p > 1/beta is violated (p = {p}, 1/beta = {})",
                    1.0 / self.beta
                )));
            }
        }
        if let Some(Envelope::Growth { gamma, .. }) = &self.envelope {
            if !(*gamma > 0.0 && *gamma <= 1.0) {
                return Err(invalid(format!("gamma must lie in (0, 1], got {gamma}")));
            }
        }
        Ok(())
    }

    /// Mesh grading matched to the problem. With `f(s, x0 s^{β-1}) ~ s^{-α}`
    /// near 0, `v - x0` behaves like `t^{1-α}`, and `r = 2/(1-α)` keeps the
    /// product rule second order there. Never below `2/β`, capped at
    /// [`MAX_GRADING`].
    pub fn grading(&self) -> Result<f64> {
        self.validate()?;
        let alpha = Integrand::new(self)?.alpha;
        Ok((2.0 / self.beta).max(2.0 / (1.0 - alpha)).min(MAX_GRADING))
    }

    /// `N`-cell mesh on `[0, T]` with [`FivpSpec::grading`].
    pub fn mesh(&self, n: usize) -> Result<GradedMesh> {
        GradedMesh::new(self.horizon, n, self.grading()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Added to `x0` at every node `t > 0` of the first iterate.
    pub initial_shift: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_iter: 500,
            initial_shift: 0.0,
        }
    }
}

/// Result of [`solve_volterra`].
#[derive(Debug, Clone)]
pub struct SolutionCurve {
    /// `v_i = t_i^{1-β} x(t_i)`, `v_0 = x0`.
    pub weighted: WeightedSample,
    pub iterations: usize,
    /// Sup-norm defect `|v - Gv|` of the returned iterate on its own mesh.
    pub residual: f64,
    pub converged: bool,
    beta: f64,
    x0: f64,
    integrand: WeightedSample,
}

impl SolutionCurve {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mesh(&self) -> &GradedMesh {
        &self.weighted.mesh
    }

    /// `x(t_i)` for `i ≥ 1`.
    pub fn x(&self, i: usize) -> f64 {
        self.weighted.unweighted(i)
    }

    /// `v(t)` at any `t ∈ [0, T]`, by the Nyström formula.
    pub fn eval_weighted(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(self.x0);
        }
        let w = KernelWeights::new(&self.integrand.mesh, self.beta, self.integrand.weight_exponent)?;
        self.nystrom(&w, t)
    }

    fn nystrom(&self, w: &KernelWeights, t: f64) -> Result<f64> {
        let s = w.integrate(t, &self.integrand.values)?;
        Ok(self.x0 + t.powf(1.0 - self.beta) * s / gamma(self.beta)?)
    }

    /// `x(t)` for `t ∈ (0, T]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(t.powf(self.beta - 1.0) * self.eval_weighted(t)?)
    }
}

/// `t ↦ t^α f(t, t^{β-1} v)` with `α` matched to the behaviour at 0.
struct Integrand<'a> {
    f: &'a Expr,
    beta: f64,
    alpha: f64,
    h0: f64,
}

impl<'a> Integrand<'a> {
    fn new(spec: &'a FivpSpec) -> Result<Self> {
        let (f, beta, x0) = (&spec.f, spec.beta, spec.x0);
        let g = |s: f64| f.eval_tx(s, s.powf(beta - 1.0) * x0);
        let alpha = match quad::exponent_at_zero(g)? {
            EndpointBehaviour::Zero => 0.0,
            EndpointBehaviour::Power(l) => -l,
        };
        if alpha >= 1.0 {
            return Err(Error::Integrability(format!(
                "f(t, x0 t^(beta-1)) behaves like t^{:.4} near 0",
                -alpha
            )));
        }
        let h0 = limit_at_zero(|s| Ok(s.powf(alpha) * g(s)?))?;
        Ok(Integrand { f, beta, alpha, h0 })
    }

    fn sample(&self, nodes: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        (0..nodes.len())
            .into_par_iter()
            .map(|j| {
                if j == 0 {
                    return Ok(self.h0);
                }
                let t = nodes[j];
                let x = t.powf(self.beta - 1.0) * v[j];
                Ok(t.powf(self.alpha) * self.f.eval_tx(t, x).map_err(|e| at_node(t, e))?)
            })
            .collect()
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> (f64, usize) {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .enumerate()
        .fold((0.0, 0), |acc, (i, d)| if d > acc.0 { (d, i) } else { acc })
}

fn check_blow_up(nodes: &[f64], v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !(x.abs() <= BLOW_UP)) {
        Some(i) => Err(Error::BlowUp {
            t: nodes[i],
            value: v[i],
        }),
        None => Ok(()),
    }
}

/// Picard iteration on the mesh. Stops once the sup-norm change is at most
/// `tol`; the returned iterate then has defect at most `tol`. Running out of
/// iterations is reported through `converged = false`, not as an error.
pub fn solve_volterra(spec: &FivpSpec, mesh: &GradedMesh, opts: SolveOptions) -> Result<SolutionCurve> {
    spec.validate()?;
    if (mesh.horizon() - spec.horizon).abs() > 1e-12 * spec.horizon {
        return Err(invalid("the mesh does not cover (0, T]"));
    }
    let beta = spec.beta;
    let integrand = Integrand::new(spec)?;
    let rule = ProductRule::new(mesh, beta, integrand.alpha)?;
    let nodes = mesh.nodes();
    let g = gamma(beta)?;
    let scale: Vec<f64> = nodes.iter().map(|t| t.powf(1.0 - beta) / g).collect();

    let mut v = vec![spec.x0 + opts.initial_shift; nodes.len()];
    v[0] = spec.x0;
    let mut relax = 1.0;
    let mut last_sign = 0.0;
    let mut flips = 0;
    let mut iterations = 0;
    loop {
        let psi = integrand.sample(nodes, &v)?;
        let integral = rule.apply_all(&psi);
        let next: Vec<f64> = integral
            .iter()
            .zip(&scale)
            .map(|(i, s)| spec.x0 + s * i)
            .collect();
        check_blow_up(nodes, &next)?;
        let (delta, at) = sup_diff(&next, &v);
        if delta <= opts.tol || iterations >= opts.max_iter {
            let psi_sample = WeightedSample::new(mesh.clone(), integrand.alpha, psi)?;
            return Ok(SolutionCurve {
                weighted: WeightedSample::new(mesh.clone(), 1.0 - beta, v)?,
                iterations,
                residual: delta,
                converged: delta <= opts.tol,
                beta,
                x0: spec.x0,
                integrand: psi_sample,
            });
        }
        let sign = (next[at] - v[at]).signum();
        if sign * last_sign < 0.0 {
            flips += 1;
            if flips >= 2 {
                relax = 0.5;
            }
        } else {
            flips = 0;
        }
        last_sign = sign;
        for (x, n) in v.iter_mut().zip(&next) {
            *x += relax * (n - *x);
        }
        iterations += 1;
    }
}

/// Max defect of the Volterra equation at the nodes `t_i`, `i ≥ 1`, with
/// the integral taken on the twice-refined mesh. Values at the new nodes
/// come from the Nyström formula of `sol`.
pub fn residual(spec: &FivpSpec, sol: &SolutionCurve) -> Result<f64> {
    let mesh = sol.mesh();
    let fine = mesh.refined()?;
    let fnodes = fine.nodes();
    let coarse = KernelWeights::new(mesh, spec.beta, sol.integrand.weight_exponent)?;
    let fine_v = (0..fnodes.len())
        .into_par_iter()
        .map(|j| {
            if j % 2 == 0 {
                Ok(sol.weighted.values[j / 2])
            } else {
                sol.nystrom(&coarse, fnodes[j])
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let integrand = Integrand {
        f: &spec.f,
        beta: spec.beta,
        alpha: sol.integrand.weight_exponent,
        h0: sol.integrand.values[0],
    };
    let psi = integrand.sample(fnodes, &fine_v)?;
    let g = gamma(spec.beta)?;
    let nodes = mesh.nodes();
    let weights = KernelWeights::new(&fine, spec.beta, integrand.alpha)?;
    let defects = (1..nodes.len())
        .into_par_iter()
        .map(|i| {
            let t = nodes[i];
            let s = weights.integrate(t, &psi)?;
            Ok((sol.weighted.values[i] - spec.x0 - t.powf(1.0 - spec.beta) * s / g).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Minimal solution of an inequality family taken with equality.
#[derive(Debug, Clone)]
pub struct ExtremalSolution {
    /// `t^w u*(t)` with `w` the weight of the family (`α`, `1-β` or 0).
    pub sample: WeightedSample,
    pub iterations: usize,
    /// Whether every Picard iterate was pointwise at least the previous one.
    pub monotone: bool,
}

/// `v = A(t) + B(t) (∫₀ᵗ (t-s)^{κ-1} L(s) ω̃(v(s)) ds)^{1/P}` in the
/// weighted variable of the family.
struct Extremal {
    kappa: f64,
    power: f64,
    weight: f64,
    a: Expr,
    b: Expr,
    l: Expr,
    omega: Expr,
}

impl Extremal {
    fn of(prob: &InequalityProblem, theorem: Theorem) -> Result<Self> {
        let u = || Expr::var(Var::U);
        let p = prob.p;
        let gamma = prob.gamma.unwrap_or(1.0);
        Ok(match theorem {
            Theorem::Integral | Theorem::IntegralPower => Extremal {
                kappa: 1.0,
                power: p,
                weight: 0.0,
                a: prob.a.clone(),
                b: prob.b.clone(),
                l: prob.l.clone(),
                omega: if theorem == Theorem::Integral {
                    prob.omega.clone()
                } else {
                    Expr::powf(u(), p * gamma)
                },
            },
            Theorem::Singular => Extremal {
                kappa: prob.beta_checked()?,
                power: 1.0,
                weight: 0.0,
                a: prob.a.clone(),
                b: prob.b.clone(),
                l: prob.l.clone(),
                omega: prob.omega.clone(),
            },
            Theorem::SingularWeighted => Extremal {
                kappa: prob.beta_checked()?,
                power: 1.0,
                weight: prob.alpha,
                a: prob.a.clone(),
                b: prob.b.clone().times_t_pow(prob.alpha - prob.delta),
                l: prob.l.clone(),
                omega: prob.omega.clone(),
            },
            Theorem::SingularSplit | Theorem::SingularSplitPower => {
                let beta = prob.beta_checked()?;
                let power_law = theorem == Theorem::SingularSplitPower;
                Extremal {
                    kappa: beta,
                    power: 1.0,
                    weight: 1.0 - beta,
                    a: prob.a.clone(),
                    b: prob.b.clone().times_t_pow(1.0 - beta),
                    l: if power_law {
                        prob.l.clone().times_t_pow(gamma * (beta - 1.0))
                    } else {
                        prob.l.clone()
                    },
                    omega: if power_law {
                        Expr::powf(u(), gamma)
                    } else {
                        prob.omega.clone()
                    },
                }
            }
        })
    }
}

fn value_at_zero(e: &Expr) -> Result<f64> {
    match e.eval_t(0.0) {
        Ok(v) => Ok(v),
        Err(_) => limit_at_zero(|s| e.eval_t(s)),
    }
}

/// Monotone Picard iteration from `u⁰ = a` for the equality version of the
/// chosen family. Values above 1e12 are reported as blow-up.
pub fn extremal_inequality_solve(
    prob: &InequalityProblem,
    theorem: Theorem,
    mesh: &GradedMesh,
    tol: f64,
    max_iter: usize,
) -> Result<ExtremalSolution> {
    prob.validate(theorem)?;
    let ex = Extremal::of(prob, theorem)?;
    let nodes = mesh.nodes();
    let l_alpha = match quad::exponent_at_zero(|s| ex.l.eval_t(s))? {
        EndpointBehaviour::Zero => 0.0,
        EndpointBehaviour::Power(e) => -e,
    };
    let l_zero = limit_at_zero(|s| Ok(s.powf(l_alpha) * ex.l.eval_t(s)?))?;
    let rule = ProductRule::new(mesh, ex.kappa, l_alpha)?;
    let lw: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            if j == 0 {
                Ok(l_zero)
            } else {
                Ok(t.powf(l_alpha) * ex.l.eval_t(t).map_err(|e| at_node(t, e))?)
            }
        })
        .collect::<Result<_>>()?;
    let eval_at = |e: &Expr, j: usize| -> Result<f64> {
        if j == 0 {
            value_at_zero(e)
        } else {
            e.eval_t(nodes[j]).map_err(|err| at_node(nodes[j], err))
        }
    };
    let a: Vec<f64> = (0..nodes.len()).map(|j| eval_at(&ex.a, j)).collect::<Result<_>>()?;
    let b: Vec<f64> = (0..nodes.len())
        .map(|j| if j == 0 { Ok(0.0) } else { eval_at(&ex.b, j) })
        .collect::<Result<_>>()?;

    let mut v = a.clone();
    let mut monotone = true;
    let mut delta = f64::INFINITY;
    for iterations in 1..=max_iter {
        let psi: Vec<f64> = v
            .iter()
            .zip(&lw)
            .map(|(x, w)| Ok(w * ex.omega.eval_u(x.max(0.0))?))
            .collect::<Result<_>>()?;
        let integral = rule.apply_all(&psi);
        let next: Vec<f64> = (0..nodes.len())
            .map(|j| {
                let j_val = integral[j].max(0.0);
                let inner = if ex.power == 1.0 { j_val } else { j_val.powf(1.0 / ex.power) };
                a[j] + b[j] * inner
            })
            .collect();
        check_blow_up(nodes, &next)?;
        let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if next.iter().zip(&v).any(|(n, x)| *n < x - 1e-12 * scale) {
            monotone = false;
        }
        delta = sup_diff(&next, &v).0;
        v = next;
        if delta <= tol * scale {
            return Ok(ExtremalSolution {
                sample: WeightedSample::new(mesh.clone(), ex.weight, v)?,
                iterations,
                monotone,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        delta,
    })
}

/// The bound on `t^{1-β}|x(t)|` from the declared envelope: the split
/// singular family with `a = |x0|`, `b = 1/Γ(β)`.
pub fn envelope_bound(spec: &FivpSpec) -> Result<BoundCurve> {
    spec.validate()?;
    let env = spec
        .envelope
        .as_ref()
        .ok_or_else(|| invalid("no envelope declared"))?;
    let (l, omega) = env.combined(spec.beta);
    let prob = InequalityProblem::new(
        Expr::constant(spec.x0.abs()),
        Expr::constant(1.0 / gamma(spec.beta)?),
        l,
        omega,
        spec.p.unwrap_or(f64::NAN),
        spec.horizon,
    )
    .with_beta(spec.beta);
    bound(&prob, Theorem::SingularSplit)
}

/// Outcome of comparing a weighted sample with a bound curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance {
    pub holds: bool,
    /// Largest `|sample| / bound` over the nodes `t > 0`.
    pub worst_ratio: f64,
    pub worst_t: f64,
}

/// Checks `t^e |u(t_i)| ≤ factor · t^e B(t_i)` at every node `t_i > 0`,
/// where `e` is the weight of the sample.
pub fn check_dominance(sample: &WeightedSample, curve: &BoundCurve, factor: f64) -> Result<Dominance> {
    let shift = sample.weight_exponent + curve.weight_exponent();
    let nodes = sample.mesh.nodes();
    let mut worst = Dominance {
        holds: true,
        worst_ratio: 0.0,
        worst_t: nodes[1],
    };
    for i in 1..nodes.len() {
        let t = nodes[i];
        let mut b = curve.weighted(t)?;
        if shift != 0.0 {
            b *= t.powf(shift);
        }
        let ratio = sample.values[i].abs() / b;
        if !(ratio <= worst.worst_ratio) {
            worst.worst_ratio = ratio;
            worst.worst_t = t;
        }
    }
    worst.holds = worst.worst_ratio <= factor;
    Ok(worst)
}
