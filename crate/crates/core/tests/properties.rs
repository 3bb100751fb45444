use proptest::prelude::*;

use fracbound::hypotheses::{envelope_check, lp_loc_membership};
use fracbound::operators::{frac_integral_expr, kernel_bound, phi};
use fracbound::solver::extremal_inequality_solve;
use fracbound::special::{gamma, mittag_leffler};
use fracbound::{
    bound, Expr, GradedMesh, InequalityProblem, OmegaTransform, PowerMode, SampleBox, Theorem, Var,
    Verdict,
};

fn t(s: &str) -> Expr {
    Expr::parse(s, &[Var::T]).unwrap()
}

fn u(s: &str) -> Expr {
    Expr::parse(s, &[Var::U]).unwrap()
}

fn tx(s: &str) -> Expr {
    Expr::parse(s, &[Var::T, Var::X]).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

const OMEGAS: [&str; 5] = ["u", "u^(1/2)", "u^(3/4)", "u^(1/2) + u", "u + 1"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gamma_recurrence(x in 0.1f64..5.0) {
        let (g, g1) = (gamma(x).unwrap(), gamma(x + 1.0).unwrap());
        prop_assert!(rel(g1, x * g) < 1e-12);
    }

    #[test]
    fn mittag_leffler_reduces_to_exp(z in -10.0f64..10.0) {
        prop_assert!(rel(mittag_leffler(1.0, 1.0, z).unwrap(), z.exp()) < 1e-10);
    }

    #[test]
    fn eval_is_bit_deterministic(x in 1e-6f64..10.0, y in 0.0f64..100.0) {
        let f = tx("t^(-1/2)*x^2/(1+x) + t^(-3/4) + ln(1 + x^(1/2))*exp(-t)");
        prop_assert_eq!(f.eval_tx(x, y).unwrap().to_bits(), f.eval_tx(x, y).unwrap().to_bits());
    }

    #[test]
    fn phi_is_nondecreasing(mu in 0.01f64..0.99, a in 1e-9f64..1e6, b in 1e-9f64..1e6) {
        let (lo, hi) = (1.0 + a.min(b), 1.0 + a.max(b));
        prop_assert!(phi(mu, hi).unwrap() >= phi(mu, lo).unwrap() - 1e-12);
    }

    #[test]
    fn power_exponent_is_recovered(lambda in -0.95f64..2.0) {
        let g = Expr::powf(Expr::var(Var::T), lambda);
        let m = lp_loc_membership(&g, 1.5, None).unwrap();
        prop_assert!((m.exponent - lambda).abs() <= 0.01, "{} vs {}", m.exponent, lambda);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn monomial_rule_is_exact(beta in 0.1f64..0.95, nu in -0.9f64..3.0, r in 1.0f64..6.0) {
        let mesh = GradedMesh::new(1.0, 64, r).unwrap();
        let f = Expr::powf(Expr::var(Var::T), nu);
        let out = frac_integral_expr(beta, &f, &mesh).unwrap();
        let c = gamma(nu + 1.0).unwrap() / gamma(nu + beta + 1.0).unwrap();
        for i in 1..=64 {
            let x = mesh.nodes()[i];
            prop_assert!(rel(out.unweighted(i), c * x.powf(nu + beta)) < 1e-10);
        }
    }

    #[test]
    fn kernel_bound_holds(beta in 0.55f64..0.95, frac in 0.05f64..0.95, x in 1e-3f64..1.0, k in 0usize..3) {
        let (src, cap) = [("1", 4.0), ("t^(-1/4)", 4.0), ("t^(-1/2)", 2.0)][k];
        let p = 1.0 / beta + frac * (cap - 1.0 / beta);
        let e = kernel_bound(beta, p, &t(src), x).unwrap();
        prop_assert!(e.holds(1e-6), "{:?}", e);
    }

    #[test]
    fn omega_is_increasing_and_invertible(k in 0usize..5, p in 1.0f64..3.0, a in -6.0f64..6.0, b in -6.0f64..6.0) {
        let w = OmegaTransform::numeric(&u(OMEGAS[k]), p, PowerMode::PthPower).unwrap();
        let (x1, x2) = (10f64.powf(a.min(b)), 10f64.powf(a.max(b)) * (1.0 + 1e-9));
        prop_assert!(w.eval(x1).unwrap() < w.eval(x2).unwrap());
        let y = w.eval(x1).unwrap();
        let back = w.eval(w.inverse(y).unwrap()).unwrap();
        prop_assert!((back - y).abs() <= 1e-8 * y.abs().max(1.0));
    }

    #[test]
    fn doubling_a_never_lowers_the_bound(k in 0usize..3, beta in 0.6f64..0.9, x in 0.01f64..2.0) {
        let p = 1.0 / beta + 0.5;
        let prob = InequalityProblem::new(t("1"), t("1"), t("t^(-1/4)"), u(OMEGAS[k]), p, 2.0)
            .with_beta(beta);
        let doubled = InequalityProblem { a: t("2"), ..prob.clone() };
        for th in [Theorem::Singular, Theorem::SingularSplit] {
            let (b1, b2) = (bound(&prob, th).unwrap(), bound(&doubled, th).unwrap());
            prop_assert!(b2.eval(x).unwrap() >= b1.eval(x).unwrap());
        }
    }

    #[test]
    fn weighted_bound_is_nondecreasing(k in 0usize..3, beta in 0.6f64..0.9, a in 0.001f64..2.0, b in 0.001f64..2.0) {
        let p = 1.0 / beta + 0.5;
        let prob = InequalityProblem::new(t("1"), t("1"), t("t^(-1/4)"), u(OMEGAS[k]), p, 2.0)
            .with_beta(beta);
        let c = bound(&prob, Theorem::SingularSplit).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(c.weighted(hi).unwrap() >= c.weighted(lo).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn doubling_l_keeps_an_envelope(scale in 1.0f64..4.0) {
        let bx = SampleBox { nt: 32, nx: 32, ..SampleBox::default() };
        let f = tx("t^(-3/4)*x^(1/2) + t^(-1/2)*x");
        let l = Expr::mul(Expr::constant(scale), t("t^(-11/12) + t^(-5/6)"));
        let c = envelope_check(&f, &l, &u("u^(1/2) + u"), 2.0 / 3.0, &bx);
        prop_assert_eq!(c.verdict, Verdict::Pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn extremal_solution_is_dominated(k in 0usize..3, pi in 0usize..3, beta in 0.6f64..0.8, c in 0.5f64..2.0) {
        let p = [1.8, 2.0, 3.0][pi];
        let lsrc = format!("{c} * t^(-1/4)");
        let prob = InequalityProblem::new(t("1 + t"), t("1"), t(&lsrc), u(OMEGAS[k]), p, 1.0)
            .with_beta(beta);
        let curve = bound(&prob, Theorem::Singular).unwrap();
        let mesh = GradedMesh::for_order(1.0, 256, beta).unwrap();
        let sol = extremal_inequality_solve(&prob, Theorem::Singular, &mesh, 1e-10, 500).unwrap();
        prop_assert!(sol.monotone);
        for i in 1..=256 {
            let x = mesh.nodes()[i];
            if x <= curve.t1() {
                prop_assert!(sol.sample.values[i] <= curve.eval(x).unwrap() * (1.0 + 1e-3));
            }
        }
    }
}
