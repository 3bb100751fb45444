use std::time::Instant;

use fracbound::solver::{check_dominance, extremal_inequality_solve};
use fracbound::{
    bound, BoundFlag, Expr, GradedMesh, InequalityProblem, OmegaTransform, PowerMode, Theorem, Var,
};

fn t(s: &str) -> Expr {
    Expr::parse(s, &[Var::T]).unwrap()
}

fn u(s: &str) -> Expr {
    Expr::parse(s, &[Var::U]).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
}

#[test]
fn weighted_power_example() {
    let start = Instant::now();
    let prob = InequalityProblem::new(t("1"), t("1"), t("t^(-1/3)"), u("u^(1/2)"), 2.0, 2.0)
        .with_beta(2.0 / 3.0)
        .with_weights(0.5, 1.0 / 3.0);
    let b = bound(&prob, Theorem::SingularWeighted).unwrap();
    assert_eq!(b.t1(), 2.0);
    for x in log_grid(1e-4, 2.0, 1000) {
        let want = 2f64.sqrt() * x.powf(-0.5) + 9.0 * x.sqrt();
        assert!(rel(b.eval(x).unwrap(), want) <= 1e-9, "t={x}");
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn split_power_example() {
    let start = Instant::now();
    let prob = InequalityProblem::new(t("1"), t("1"), t("t^(-1/2)"), u("u"), 2.0, 2.0)
        .with_beta(2.0 / 3.0)
        .with_gamma(0.5);
    let b = bound(&prob, Theorem::SingularSplitPower).unwrap();
    for x in log_grid(1e-4, 2.0, 1000) {
        let want = 2f64.sqrt() * x.powf(-1.0 / 3.0) + 18.0 * x.powf(1.0 / 3.0);
        assert!(rel(b.eval(x).unwrap(), want) <= 1e-9, "t={x}");
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn vanishing_l_leaves_the_prefactor() {
    let p = 2.0;
    let c = 2f64.powf(1.0 - 1.0 / p);
    let base = InequalityProblem::new(t("3"), t("1"), t("0"), u("u^(1/2)"), p, 1.0).with_beta(0.75);
    let x = 0.4f64;
    let b = bound(&base, Theorem::Singular).unwrap();
    assert!(rel(b.eval(x).unwrap(), c * 3.0) < 1e-12);
    let b = bound(&base.clone().with_weights(0.5, 0.25), Theorem::SingularWeighted).unwrap();
    assert!(rel(b.eval(x).unwrap(), c * 3.0 * x.powf(-0.5)) < 1e-12);
    let b = bound(&base, Theorem::SingularSplit).unwrap();
    assert!(rel(b.eval(x).unwrap(), c * 3.0 * x.powf(-0.25)) < 1e-12);
    let plain = InequalityProblem { p: 1.0, ..base.clone() };
    assert!(rel(bound(&plain, Theorem::Integral).unwrap().eval(x).unwrap(), 3.0) < 1e-12);
    let power = InequalityProblem { gamma: Some(1.0), ..base };
    let b = bound(&power, Theorem::IntegralPower).unwrap();
    assert!(rel(b.eval(x).unwrap(), c * 3.0) < 1e-12);
}

#[test]
fn power_closed_forms() {
    // γ = 1, p = 1, a = b = 1, l ≡ 1: e^t
    let prob = InequalityProblem::new(t("1"), t("1"), t("1"), u("u"), 1.0, 3.0).with_gamma(1.0);
    let b = bound(&prob, Theorem::IntegralPower).unwrap();
    for x in [0.1, 1.0, 3.0] {
        assert!(rel(b.eval(x).unwrap(), f64::exp(x)) < 1e-13);
    }
    // γ = 1/2, p = 2: √2 (1 + t/√2)
    let prob = InequalityProblem { p: 2.0, gamma: Some(0.5), ..prob };
    let b = bound(&prob, Theorem::IntegralPower).unwrap();
    let n = bound(&InequalityProblem { omega: u("u"), ..prob.clone() }, Theorem::Integral).unwrap();
    for x in [0.1, 1.0, 3.0] {
        let want = 2f64.sqrt() * (1.0 + x / 2f64.sqrt());
        assert!(rel(b.eval(x).unwrap(), want) < 1e-13);
        assert!(rel(n.eval(x).unwrap(), want) < 1e-6);
    }
}

#[test]
fn linear_singular_bounds_dominate_the_extremal_solution() {
    let beta = 0.7;
    let prob = InequalityProblem::new(t("1"), t("1"), t("1"), u("u"), 2.0, 1.0).with_beta(beta);
    let mesh = GradedMesh::for_order(1.0, 512, beta).unwrap();
    let sol = extremal_inequality_solve(&prob, Theorem::Singular, &mesh, 1e-12, 500).unwrap();
    let general = bound(&prob, Theorem::Singular).unwrap();
    assert!(check_dominance(&sol.sample, &general, 1.0).unwrap().holds);
    // the same data through the split family with γ = 1 bounds t^{1-β} u
    let power = InequalityProblem { gamma: Some(1.0), ..prob.clone() };
    let split = bound(&power, Theorem::SingularSplitPower).unwrap();
    let sol = extremal_inequality_solve(&power, Theorem::SingularSplitPower, &mesh, 1e-12, 500).unwrap();
    assert!(check_dominance(&sol.sample, &split, 1.0).unwrap().holds);
}

#[test]
fn quadratic_omega_collapses_the_horizon() {
    let prob = InequalityProblem::new(t("1"), t("1"), t("1"), u("u^2"), 1.0, 2.0);
    let b = bound(&prob, Theorem::Integral).unwrap();
    assert!(b.t1() < 2.0 && b.flags().contains(&BoundFlag::HorizonTruncated));
    assert!(b.eval(0.5 * b.t1()).unwrap().is_finite());
    assert!(b.eval(1.9).is_err());
}

#[test]
fn omega_examples() {
    let w = OmegaTransform::new(&u("u"), 1.0, PowerMode::Plain).unwrap();
    assert!((w.eval(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
    let w = OmegaTransform::numeric(&u("u^(1/2)"), 2.0, PowerMode::PthPower).unwrap();
    assert!((w.eval(4.0).unwrap() - 2f64.sqrt()).abs() < 1e-9);
    assert!((w.mu(4.0).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-14);
    for src in ["u", "u^(1/2)", "u^(1/2) + u", "u + 1", "u*ln(1 + u) + 1"] {
        let w = OmegaTransform::numeric(&u(src), 1.5, PowerMode::Plain).unwrap();
        assert_eq!(w.eval(1.0).unwrap(), 0.0, "{src}");
    }
    // ω has to stay finite on the table range
    let err = OmegaTransform::numeric(&u("exp(u)"), 1.0, PowerMode::Plain).unwrap_err();
    assert!(matches!(err, fracbound::Error::Domain { .. }), "{err}");
    // t/μ(t) → 2^{1-p} K^p when t/ω(t) → K
    for (src, k) in [("u^(1/2) + u", 1.0), ("2*u + 1", 0.5)] {
        for p in [1.5, 2.0] {
            let w = OmegaTransform::numeric(&u(src), p, PowerMode::PthPower).unwrap();
            let want = 2f64.powf(1.0 - p) * f64::powf(k, p);
            assert!(rel(1e6 / w.mu(1e6).unwrap(), want) < 0.1, "{src} p={p}");
        }
    }
}
