//! Riemann-Liouville fractional integral and derivative on graded meshes,
//! plus the kernel estimates used in the existence argument.
//!
//! Integrals `∫₀ᵗ (t-s)^{κ-1} φ(s) ds` are computed by product integration:
//! `φ` is interpolated linearly on each cell and the kernel moments are
//! integrated exactly. On the first cell `φ(s) ≈ s^{-α}·(linear)` so that a
//! power singularity at 0 is reproduced exactly.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::expr::Expr;
use crate::quad::{self, EndpointBehaviour, Tolerance};
use crate::special::{beta as beta_fn, gamma};

/// Nodes `t_i = T (i/N)^r`, `i = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMesh {
    horizon: f64,
    n: usize,
    r: f64,
    nodes: Vec<f64>,
}

impl GradedMesh {
    pub fn new(horizon: f64, n: usize, r: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("T must be positive, got {horizon}")));
        }
        if n < 2 {
            return Err(invalid(format!("a mesh needs N >= 2, got {n}")));
        }
        if !(r >= 1.0 && r.is_finite()) {
            return Err(invalid(format!("grading exponent must be >= 1, got {r}")));
        }
        let mut nodes: Vec<f64> = (0..=n)
            .map(|i| horizon * (i as f64 / n as f64).powf(r))
            .collect();
        nodes[n] = horizon;
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("mesh nodes are not strictly increasing; reduce N or r"));
        }
        Ok(GradedMesh {
            horizon,
            n,
            r,
            nodes,
        })
    }

    /// Mesh with the grading `r = 2/β` suited to solutions with a
    /// `t^{β-1}` boundary layer.
    pub fn for_order(horizon: f64, n: usize, beta: f64) -> Result<Self> {
        GradedMesh::new(horizon, n, (2.0 / beta).max(1.0))
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Same grading with twice as many cells; node `i` becomes node `2i`.
    pub fn refined(&self) -> Result<GradedMesh> {
        GradedMesh::new(self.horizon, 2 * self.n, self.r)
    }

    /// `k` with `t_k < t ≤ t_{k+1}`.
    fn cell_of(&self, t: f64) -> usize {
        let k = self.nodes.partition_point(|&x| x < t);
        k.saturating_sub(1).min(self.n - 1)
    }
}

/// Samples of `t^α u(t)` on a mesh; entry 0 holds `lim_{t→0⁺} t^α u(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    pub mesh: GradedMesh,
    pub weight_exponent: f64,
    pub values: Vec<f64>,
}

impl WeightedSample {
    pub fn new(mesh: GradedMesh, weight_exponent: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n() + 1 {
            return Err(invalid(format!(
                "expected {} samples, got {}",
                mesh.n() + 1,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        Ok(WeightedSample {
            mesh,
            weight_exponent,
            values,
        })
    }

    /// Samples `f`, choosing the weight from the power behaviour of `f` at 0.
    pub fn from_expr(f: &Expr, mesh: &GradedMesh) -> Result<Self> {
        let g = |t: f64| f.eval_t(t);
        let alpha = match quad::exponent_at_zero(g)? {
            EndpointBehaviour::Zero => 0.0,
            EndpointBehaviour::Power(l) => -l,
        };
        if alpha >= 1.0 {
            return Err(Error::Integrability(format!(
                "{f} behaves like t^{:.4} near 0",
                -alpha
            )));
        }
        let h0 = limit_at_zero(|s| Ok(s.powf(alpha) * g(s)?))?;
        let mut values = Vec::with_capacity(mesh.n() + 1);
        values.push(h0);
        for &t in &mesh.nodes()[1..] {
            values.push(t.powf(alpha) * g(t).map_err(|e| at_node(t, e))?);
        }
        WeightedSample::new(mesh.clone(), alpha, values)
    }

    /// `u(t_i)` for `i ≥ 1`.
    pub fn unweighted(&self, i: usize) -> f64 {
        let t = self.mesh.nodes()[i];
        self.values[i] * t.powf(-self.weight_exponent)
    }
}

pub(crate) fn at_node(t: f64, e: Error) -> Error {
    Error::AtNode {
        t,
        source: Box::new(e),
    }
}

/// `lim_{s→0⁺} g(s)`, read off at the smallest probe where `g` is finite.
pub(crate) fn limit_at_zero<F>(g: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    for s in [1e-200, 1e-100, 1e-40, 1e-16, 1e-8] {
        if let Ok(v) = g(s) {
            if v.is_finite() {
                return Ok(v);
            }
        }
    }
    Err(Error::Integrability(
        "the weighted value at 0 does not exist".into(),
    ))
}

const TERMS: usize = 64;

/// Truncated power series `Σ c_k x^k` for `0 ≤ x ≤ 1/2`, with enough terms
/// that `x^n < 2^{-57}`.
fn horner(c: &[f64; TERMS], x: f64) -> f64 {
    // x < 2^{-m} with m read off the binary exponent
    let m = (1022 - ((x.to_bits() >> 52) & 0x7ff) as i64).max(1) as usize;
    let n = (57 / m + 2).min(TERMS);
    c[..n].iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// `G(x) = ∫₀^x (t-s)^{κ-1} s^e ds` for `0 ≤ x ≤ t`, `e > -1`, via
///
/// * `x ≤ t/2`: `(t-s)^{κ-1} = t^{κ-1} Σ (1-κ)_k/k! (s/t)^k`;
/// * `x > t/2`: the full Beta integral minus `∫ₓᵗ`, expanding
///   `s^e = t^e (1 - u/t)^e` in `u = t - s`.
#[derive(Debug, Clone)]
struct Antiderivative {
    kappa: f64,
    e: f64,
    beta: f64,
    near: [f64; TERMS],
    far: [f64; TERMS],
}

impl Antiderivative {
    fn new(kappa: f64, e: f64) -> Result<Self> {
        let (mut near, mut far) = ([0.0; TERMS], [0.0; TERMS]);
        let (mut d, mut c) = (1.0, 1.0);
        for k in 0..TERMS {
            let kf = k as f64;
            near[k] = d / (kf + 1.0 + e);
            far[k] = c / (kf + kappa);
            d *= (kf + 1.0 - kappa) / (kf + 1.0);
            c *= (kf - e) / (kf + 1.0);
        }
        Ok(Antiderivative {
            kappa,
            e,
            beta: beta_fn(kappa, 1.0 + e)?,
            near,
            far,
        })
    }

    /// `x_pow = x^{1+e}`; `row` holds the powers of `t` from [`RowPowers`].
    fn eval(&self, x: f64, x_pow: f64, t: f64, row: &RowPowers) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= t {
            return row.full;
        }
        let rho = x / t;
        if rho <= 0.5 {
            row.km1 * x_pow * horner(&self.near, rho)
        } else {
            let d = t - x;
            row.full - row.te * d.powf(self.kappa) * horner(&self.far, d / t)
        }
    }

    fn row(&self, t: f64) -> RowPowers {
        RowPowers {
            km1: t.powf(self.kappa - 1.0),
            te: t.powf(self.e),
            full: t.powf(self.kappa + self.e) * self.beta,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct RowPowers {
    km1: f64,
    te: f64,
    full: f64,
}

/// Product-integration weights for `∫₀ᵗ (t-s)^{κ-1} φ(s) ds` acting on the
/// weighted samples `ψ_j = t_j^α φ(t_j)` (`ψ_0` is the limit at 0). On each
/// cell `φ(s) = s^{-α} ψ(s)` with `ψ` linear, and the moments of
/// `(t-s)^{κ-1} s^{-α}` and `(t-s)^{κ-1} s^{1-α}` are exact, so pure powers
/// `s^{-α}` are integrated without discretisation error.
#[derive(Debug, Clone)]
pub struct KernelWeights {
    mesh: GradedMesh,
    kappa: f64,
    alpha: f64,
    g0: Antiderivative,
    g1: Antiderivative,
    /// `(t_j^{1-α}, t_j^{2-α})`
    pows: Vec<(f64, f64)>,
}

impl KernelWeights {
    /// Weights for kernel `(t-s)^{κ-1}`, `0 < κ ≤ 1`, and integrands with
    /// weight exponent `α < 1`.
    pub fn new(mesh: &GradedMesh, kappa: f64, alpha: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(invalid(format!("kernel order must lie in (0, 1], got {kappa}")));
        }
        if !(alpha < 1.0) {
            return Err(Error::Integrability(format!(
                "weight exponent {alpha} is not integrable at 0"
            )));
        }
        let pows = mesh
            .nodes()
            .iter()
            .map(|t| (t.powf(1.0 - alpha), t.powf(2.0 - alpha)))
            .collect();
        Ok(KernelWeights {
            mesh: mesh.clone(),
            kappa,
            alpha,
            g0: Antiderivative::new(kappa, -alpha)?,
            g1: Antiderivative::new(kappa, 1.0 - alpha)?,
            pows,
        })
    }

    pub fn mesh(&self) -> &GradedMesh {
        &self.mesh
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Weights for `t ∈ (0, T]`; the result has one entry per node up to
    /// the right end of the cell containing `t`.
    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        let nodes = self.mesh.nodes();
        if !(t > 0.0 && t <= self.mesh.horizon() * (1.0 + 1e-14)) {
            return Err(invalid(format!("t = {t} is outside (0, T]")));
        }
        let k = self.mesh.cell_of(t);
        let (r0, r1) = (self.g0.row(t), self.g1.row(t));
        let mut w = vec![0.0; k + 2];
        let (mut g0, mut g1) = (0.0, 0.0);
        for j in 0..=k {
            let (left, right) = (nodes[j], nodes[j + 1]);
            let (n0, n1) = if right >= t {
                (r0.full, r1.full)
            } else {
                let (p0, p1) = self.pows[j + 1];
                (self.g0.eval(right, p0, t, &r0), self.g1.eval(right, p1, t, &r1))
            };
            let (d0, d1) = (n0 - g0, n1 - g1);
            let h = right - left;
            w[j] += (right * d0 - d1) / h;
            w[j + 1] += (d1 - left * d0) / h;
            (g0, g1) = (n0, n1);
        }
        Ok(w)
    }

    /// `∫₀ᵗ (t-s)^{κ-1} φ(s) ds` from the weighted samples `psi`.
    pub fn integrate(&self, t: f64, psi: &[f64]) -> Result<f64> {
        Ok(self.at(t)?.iter().zip(psi).map(|(w, v)| w * v).sum())
    }
}

/// One-off [`KernelWeights::at`].
pub fn product_weights(mesh: &GradedMesh, kappa: f64, alpha: f64, t: f64) -> Result<Vec<f64>> {
    KernelWeights::new(mesh, kappa, alpha)?.at(t)
}

/// Precomputed weight rows for every mesh node.
#[derive(Debug, Clone)]
pub struct ProductRule {
    weights: KernelWeights,
    rows: Vec<Vec<f64>>,
}

impl ProductRule {
    /// Rule for kernel `(t-s)^{κ-1}`, `0 < κ ≤ 1`, and integrands with
    /// weight exponent `α < 1`.
    pub fn new(mesh: &GradedMesh, kappa: f64, alpha: f64) -> Result<Self> {
        let weights = KernelWeights::new(mesh, kappa, alpha)?;
        let nodes = mesh.nodes();
        let rows = (0..=mesh.n())
            .into_par_iter()
            .map(|i| {
                if i == 0 {
                    Ok(vec![0.0])
                } else {
                    let mut w = weights.at(nodes[i])?;
                    w.truncate(i + 1);
                    Ok(w)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductRule { weights, rows })
    }

    pub fn weights(&self) -> &KernelWeights {
        &self.weights
    }

    /// `∫₀^{t_i} (t_i-s)^{κ-1} φ(s) ds`.
    pub fn apply(&self, i: usize, psi: &[f64]) -> f64 {
        self.rows[i].iter().zip(psi).map(|(w, v)| w * v).sum()
    }

    /// [`ProductRule::apply`] at every node.
    pub fn apply_all(&self, psi: &[f64]) -> Vec<f64> {
        (0..self.rows.len())
            .into_par_iter()
            .map(|i| self.apply(i, psi))
            .collect()
    }

    /// The integral at an arbitrary `t ∈ (0, T]`.
    pub fn apply_at(&self, t: f64, psi: &[f64]) -> Result<f64> {
        self.weights.integrate(t, psi)
    }
}

fn check_order(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(invalid(format!("beta must lie in (0, 1), got {beta}")));
    }
    Ok(())
}

/// `I^β f` on the mesh of `f`. The result carries weight exponent `α - β`.
pub fn frac_integral(beta: f64, f: &WeightedSample) -> Result<WeightedSample> {
    check_order(beta)?;
    let alpha = f.weight_exponent;
    let rule = ProductRule::new(&f.mesh, beta, alpha)?;
    let g = gamma(beta)?;
    let raw = rule.apply_all(&f.values);
    let out_alpha = alpha - beta;
    let nodes = f.mesh.nodes();
    let mut values: Vec<f64> = raw
        .iter()
        .zip(nodes)
        .map(|(v, t)| v / g * t.powf(out_alpha))
        .collect();
    // I^β[s^{-α}] = Γ(1-α)/Γ(1-α+β) s^{β-α}
    values[0] = f.values[0] * gamma(1.0 - alpha)? / gamma(1.0 - alpha + beta)?;
    WeightedSample::new(f.mesh.clone(), out_alpha, values)
}

/// `I^β f` for a closed-form `f`.
pub fn frac_integral_expr(beta: f64, f: &Expr, mesh: &GradedMesh) -> Result<WeightedSample> {
    frac_integral(beta, &WeightedSample::from_expr(f, mesh)?)
}

/// `I^β f (t)` at an arbitrary `t ∈ (0, T]`.
pub fn frac_integral_at(beta: f64, f: &WeightedSample, t: f64) -> Result<f64> {
    check_order(beta)?;
    let w = product_weights(&f.mesh, beta, f.weight_exponent, t)?;
    let s: f64 = w.iter().zip(&f.values).map(|(w, v)| w * v).sum();
    Ok(s / gamma(beta)?)
}

/// `D^β f = d/dt I^{1-β} f` at the interior nodes `1..N-1`, returned as
/// `(t_i, value)` pairs. Three-point nonuniform differences, `O(h²)`.
pub fn frac_derivative(beta: f64, f: &WeightedSample) -> Result<Vec<(f64, f64)>> {
    check_order(beta)?;
    let g = frac_integral(1.0 - beta, f)?;
    let nodes = g.mesh.nodes();
    let a = g.weight_exponent;
    // g = t^{-a} h with h bounded at 0: differentiate h, then apply the product rule
    Ok((1..g.mesh.n())
        .map(|i| {
            let t = nodes[i];
            let dh = three_point(nodes, &g.values, i);
            (t, t.powf(-a) * (dh - a * g.values[i] / t))
        })
        .collect())
}

/// [`frac_derivative`] at node `i`; node 0 and node `N` are boundary errors.
pub fn frac_derivative_at(beta: f64, f: &WeightedSample, i: usize) -> Result<f64> {
    if i == 0 || i >= f.mesh.n() {
        return Err(Error::Boundary(format!(
            "the derivative needs an interior node, got node {i} of {}",
            f.mesh.n()
        )));
    }
    Ok(frac_derivative(beta, f)?[i - 1].1)
}

/// Derivative at `t[i]` of the quadratic through nodes `i-1, i, i+1`.
fn three_point(t: &[f64], g: &[f64], i: usize) -> f64 {
    let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
    (-h1 / (h0 * (h0 + h1))) * g[i - 1]
        + ((h1 - h0) / (h0 * h1)) * g[i]
        + (h0 / (h1 * (h0 + h1))) * g[i + 1]
}

/// `φ(t) = (t^μ - 1)/(t - 1)^μ` for `t > 1`, `0 < μ < 1`.
pub fn phi(mu: f64, t: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(invalid(format!("mu must lie in (0, 1), got {mu}")));
    }
    if !(t > 1.0) {
        return Err(Error::Domain {
            expr: "(t^mu - 1)/(t - 1)^mu".into(),
            value: t,
            reason: "defined only for t > 1",
        });
    }
    let d = t - 1.0;
    // expm1/ln1p keep full precision as t → 1⁺, where φ ~ μ (t-1)^{1-μ}
    Ok((mu * d.ln_1p()).exp_m1() / (mu * d.ln()).exp())
}

/// Both sides of the estimate
/// `|∫₀ᵗ (t/(t-s))^{1-β} ρ(s) ds| ≤ C(t) (∫₀ᵗ s^{p(1-β)} |ρ|^p ds)^{1/p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub lhs: f64,
    pub rhs: f64,
}

impl Estimate {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + slack)
    }
}

struct Density {
    rho: Expr,
    exponent: f64,
}

impl Density {
    fn new(rho: &Expr) -> Result<Self> {
        let exponent = match quad::exponent_at_zero(|s| rho.eval_t(s))? {
            EndpointBehaviour::Zero => f64::INFINITY,
            EndpointBehaviour::Power(e) => e,
        };
        Ok(Density {
            rho: rho.clone(),
            exponent,
        })
    }

    /// `∫₀ᵗ (t/(t-s))^{1-β} ρ(s) ds`.
    fn kernel_integral(&self, beta: f64, t: f64) -> Result<f64> {
        let left = (self.exponent < 0.0).then_some(self.exponent);
        quad::integrate_singular(
            |s| Ok((t / (t - s)).powf(1.0 - beta) * self.rho.eval_t(s)?),
            0.0,
            t,
            left,
            Some(beta - 1.0),
            TOL,
        )
    }

    /// `∫_a^b s^{p(1-β)} |ρ(s)|^p ds`.
    fn weighted_norm(&self, beta: f64, p: f64, a: f64, b: f64) -> Result<f64> {
        let g = |s: f64| Ok(s.powf(p * (1.0 - beta)) * self.rho.eval_t(s)?.abs().powf(p));
        let e = p * (1.0 - beta) + p * self.exponent;
        if e <= -1.0 {
            return Err(Error::Integrability(format!(
                "s^(1-beta) rho is not in L^p near 0 (exponent {e:.4} after raising to p)"
            )));
        }
        if a == 0.0 {
            quad::integral_from_zero(g, b, e, TOL)
        } else {
            quad::integrate(g, a, b, TOL)
        }
    }
}

const TOL: Tolerance = Tolerance::new(1e-300, 1e-12);

fn check_kernel_args(beta: f64, p: f64) -> Result<f64> {
    check_order(beta)?;
    if !(p > 1.0 / beta) {
        return Err(invalid(format!(
            "p > 1/beta is violated (p = {p}, 1/beta = {})",
            1.0 / beta
        )));
    }
    Ok(p / (p - 1.0))
}

/// Both sides of the single-time kernel estimate for `t ∈ (0, 1]`.
pub fn kernel_bound(beta: f64, p: f64, rho: &Expr, t: f64) -> Result<Estimate> {
    let q = check_kernel_args(beta, p)?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(invalid(format!("t must lie in (0, 1], got {t}")));
    }
    let d = Density::new(rho)?;
    if rho.as_power_law(crate::expr::Var::T).is_some_and(|(c, _)| c == 0.0) {
        return Ok(Estimate { lhs: 0.0, rhs: 0.0 });
    }
    let lhs = d.kernel_integral(beta, t)?.abs();
    let norm = d.weighted_norm(beta, p, 0.0, t)?.powf(1.0 / p);
    let c = 2f64.powf(1.0 / q) * t.powf(beta - 1.0 + 1.0 / q) / (q * beta - q + 1.0).powf(1.0 / q);
    Ok(Estimate { lhs, rhs: c * norm })
}

/// Both sides of the two-time kernel estimate for `0 < t₁ ≤ t₂ ≤ 1`.
pub fn kernel_diff_bound(beta: f64, p: f64, rho: &Expr, t1: f64, t2: f64) -> Result<Estimate> {
    let q = check_kernel_args(beta, p)?;
    if !(t1 > 0.0 && t2 <= 1.0) {
        return Err(invalid(format!("need 0 < t1 <= t2 <= 1, got ({t1}, {t2})")));
    }
    if t1 > t2 {
        return Err(invalid(format!("t1 = {t1} exceeds t2 = {t2}")));
    }
    let d = Density::new(rho)?;
    let lhs = (d.kernel_integral(beta, t2)? - d.kernel_integral(beta, t1)?).abs();
    let k = q * beta - q + 1.0;
    let e = 1.0 + q * (beta - 1.0);
    let near = 2f64.powf(1.0 / q) * (t2 - t1).powf(beta - 1.0 + 1.0 / q) / k.powf(1.0 / q)
        * d.weighted_norm(beta, p, t1, t2)?.powf(1.0 / p);
    let bracket = ((t2 - t1).powf(e) + t1.powf(e) - t2.powf(e)).max(0.0) / k;
    let far = bracket.powf(1.0 / q) * d.weighted_norm(beta, p, 0.0, t1)?.powf(1.0 / p);
    Ok(Estimate {
        lhs,
        rhs: near + far,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Var;

    fn t(s: &str) -> Expr {
        Expr::parse(s, &[Var::T]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn mesh_shape() {
        let m = GradedMesh::new(2.0, 8, 3.0).unwrap();
        assert_eq!(m.nodes()[0], 0.0);
        assert_eq!(m.nodes()[8], 2.0);
        assert!((m.nodes()[4] - 0.25).abs() < 1e-15);
        assert!(GradedMesh::new(1.0, 8, 0.5).is_err());
        let r = m.refined().unwrap();
        for i in 0..=8 {
            assert!((r.nodes()[2 * i] - m.nodes()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_integrate_linear_data_exactly() {
        // α = 0 and φ(s) = 1 + s: ∫₀ᵗ (t-s)^{κ-1}(1+s) ds = t^κ/κ + t^{κ+1}/(κ(κ+1))
        let mesh = GradedMesh::new(1.0, 16, 2.0).unwrap();
        for &kappa in &[0.3, 0.5, 1.0] {
            for &x in &[0.001, 0.003_906_25, 0.2, 0.77, 1.0] {
                let w = product_weights(&mesh, kappa, 0.0, x).unwrap();
                let s: f64 = w.iter().enumerate().map(|(j, w)| w * (1.0 + mesh.nodes()[j])).sum();
                let want = x.powf(kappa) / kappa + x.powf(kappa + 1.0) / (kappa * (kappa + 1.0));
                assert!(rel(s, want) < 1e-13, "κ={kappa} t={x}: {s} vs {want}");
            }
        }
    }

    #[test]
    fn first_cell_reproduces_power_singularity() {
        let mesh = GradedMesh::new(1.0, 8, 2.0).unwrap();
        let f = WeightedSample::from_expr(&t("t^(-1/2)"), &mesh).unwrap();
        assert!((f.weight_exponent - 0.5).abs() < 1e-9);
        // only the first cell is exact; check at t ≤ t₁ and against the
        // Beta identity at t₁
        let v = frac_integral_at(0.5, &f, mesh.nodes()[1]).unwrap();
        let want = gamma(0.5).unwrap() / gamma(1.0).unwrap() * mesh.nodes()[1].powf(0.0);
        assert!(rel(v, want) < 1e-9, "{v} vs {want}");
    }

    #[test]
    fn half_integral_of_one() {
        let mesh = GradedMesh::new(1.0, 64, 1.0).unwrap();
        let g = frac_integral_expr(0.5, &t("1"), &mesh).unwrap();
        for i in 1..=64 {
            let x = mesh.nodes()[i];
            assert!(rel(g.unweighted(i), 2.0 * (x / std::f64::consts::PI).sqrt()) < 1e-12);
        }
    }

    #[test]
    fn phi_examples() {
        assert!((phi(0.5, 2.0).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(phi(0.5, 1.0 + 1e-8).unwrap() <= 1e-3);
        assert!(phi(0.5, 1.0).is_err());
        // limit form μ (t-1)^{1-μ}
        let x = 1.0 + 1e-12;
        let v = phi(0.3, x).unwrap();
        assert!(rel(v, 0.3 * (x - 1.0).powf(0.7)) < 1e-6);
    }

    #[test]
    fn kernel_examples() {
        let e = kernel_bound(2.0 / 3.0, 2.0, &t("0"), 0.5).unwrap();
        assert_eq!((e.lhs, e.rhs), (0.0, 0.0));
        let e = kernel_bound(2.0 / 3.0, 2.0, &t("1"), 1.0).unwrap();
        assert!(rel(e.lhs, 1.5) < 1e-10);
        assert!(rel(e.rhs, (18.0f64 / 5.0).sqrt()) < 1e-10);
        let e = kernel_diff_bound(2.0 / 3.0, 2.0, &t("1"), 0.4, 0.4).unwrap();
        assert_eq!((e.lhs, e.rhs), (0.0, 0.0));
        assert!(kernel_diff_bound(2.0 / 3.0, 2.0, &t("1"), 0.5, 0.25).is_err());
        assert!(kernel_bound(2.0 / 3.0, 1.4, &t("1"), 1.0).is_err());
    }

    #[test]
    fn derivative_rejects_boundary_nodes() {
        let mesh = GradedMesh::new(1.0, 16, 2.0).unwrap();
        let f = WeightedSample::from_expr(&t("t"), &mesh).unwrap();
        assert!(matches!(frac_derivative_at(0.5, &f, 0), Err(Error::Boundary(_))));
        assert!(matches!(frac_derivative_at(0.5, &f, 16), Err(Error::Boundary(_))));
        assert!(frac_derivative_at(0.5, &f, 8).is_ok());
    }
}
