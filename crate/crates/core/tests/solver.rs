use fracbound::solver::{
    check_dominance, envelope_bound, extremal_inequality_solve, residual, solve_volterra,
};
use fracbound::special::{gamma, mittag_leffler};
use fracbound::{
    bound, Envelope, Expr, FivpSpec, GradedMesh, InequalityProblem, SolveOptions, Theorem, Var,
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

/// `x(t) = x0 Γ(β) t^{β-1} E_{β,β}(λ t^β)` solves `D^β x = λ x`.
fn linear_solution(beta: f64, lambda: f64, x0: f64, x: f64) -> f64 {
    x0 * gamma(beta).unwrap() * x.powf(beta - 1.0) * mittag_leffler(beta, beta, lambda * x.powf(beta)).unwrap()
}

#[test]
fn linear_problem_against_mittag_leffler() {
    let beta = 2.0 / 3.0;
    let spec = FivpSpec::new(beta, 1.0, tx("x"), 1.0);
    let mesh = GradedMesh::for_order(1.0, 4096, beta).unwrap();
    let sol = solve_volterra(&spec, &mesh, SolveOptions::default()).unwrap();
    assert!(sol.converged && sol.residual <= 1e-8);
    for x in [0.25, 0.5, 1.0] {
        let got = sol.eval(x).unwrap();
        assert!(rel(got, linear_solution(beta, 1.0, 1.0, x)) < 1e-3, "t={x}: {got}");
    }
    assert!(residual(&spec, &sol).unwrap() <= 1e-3);
}

#[test]
fn linear_problem_other_orders() {
    for (beta, lambda, x0) in [(0.5, -1.0, 2.0), (0.8, 0.5, 1.0), (0.3, 1.0, -1.0)] {
        let src = format!("{lambda} * x");
        let spec = FivpSpec::new(beta, x0, tx(&src), 1.0);
        let mesh = GradedMesh::for_order(1.0, 1024, beta).unwrap();
        let sol = solve_volterra(&spec, &mesh, SolveOptions::default()).unwrap();
        assert!(sol.converged);
        for i in [16, 256, 1024] {
            let x = mesh.nodes()[i];
            let want = linear_solution(beta, lambda, x0, x);
            assert!(rel(sol.x(i), want) < 1e-3, "beta={beta} t={x}");
        }
    }
}

#[test]
fn zero_right_side() {
    let spec = FivpSpec::new(0.4, -3.0, tx("0"), 2.0);
    let mesh = GradedMesh::for_order(2.0, 128, 0.4).unwrap();
    let sol = solve_volterra(&spec, &mesh, SolveOptions::default()).unwrap();
    for i in 1..=128 {
        let x = mesh.nodes()[i];
        assert!((sol.x(i) - (-3.0) * x.powf(-0.6)).abs() <= 1e-12 * x.powf(-0.6));
    }
    assert!(residual(&spec, &sol).unwrap() <= 1e-12);
}

#[test]
fn residual_detects_a_perturbed_node() {
    let beta = 2.0 / 3.0;
    let spec = FivpSpec::new(beta, 1.0, tx("x"), 1.0);
    let mesh = GradedMesh::for_order(1.0, 256, beta).unwrap();
    let mut sol = solve_volterra(&spec, &mesh, SolveOptions::default()).unwrap();
    assert!(residual(&spec, &sol).unwrap() < 1e-3);
    sol.weighted.values[100] += 0.1;
    assert!(residual(&spec, &sol).unwrap() >= 0.05);
}

fn lipschitz_example() -> FivpSpec {
    FivpSpec::new(2.0 / 3.0, 1.0, tx("t^(-1/2)*x^2/(1+x) + t^(-3/4)"), 1.0)
}

#[test]
fn lipschitz_example_is_initialization_independent() {
    let spec = lipschitz_example();
    let mesh = spec.mesh(2048).unwrap();
    let tol = 1e-8;
    let a = solve_volterra(&spec, &mesh, SolveOptions { tol, ..Default::default() }).unwrap();
    let b = solve_volterra(
        &spec,
        &mesh,
        SolveOptions {
            tol,
            initial_shift: 5.0,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(a.converged && b.converged);
    for (x, y) in a.weighted.values.iter().zip(&b.weighted.values) {
        assert!((x - y).abs() <= 10.0 * tol);
    }
    assert!(a.residual <= 1e-6);
    assert!(residual(&spec, &a).unwrap() <= 1e-3);
}

#[test]
fn adapted_grading_resolves_singular_integrands() {
    let spec = lipschitz_example();
    let r = spec.grading().unwrap();
    assert!((r - 12.0).abs() < 1e-3, "{r}");
    let at = |n: usize| {
        let sol = solve_volterra(&spec, &spec.mesh(n).unwrap(), SolveOptions::default()).unwrap();
        sol.weighted.values[n]
    };
    let (coarse, fine) = (at(512), at(1024));
    assert!(rel(coarse, fine) < 1e-4, "{coarse} vs {fine}");
    let linear = FivpSpec::new(0.6, 1.0, tx("x"), 1.0);
    assert!((linear.grading().unwrap() - 2.0 / 0.6).abs() < 1e-9);
}

#[test]
fn refinement_deltas_shrink() {
    let beta = 0.6;
    let spec = FivpSpec::new(beta, 1.0, tx("x + t"), 1.0);
    let sols: Vec<_> = [128, 256, 512, 1024]
        .into_iter()
        .map(|n| {
            let mesh = GradedMesh::for_order(1.0, n, beta).unwrap();
            solve_volterra(&spec, &mesh, SolveOptions::default()).unwrap()
        })
        .collect();
    // node j of the N-mesh is node 2j of the 2N-mesh
    let deltas: Vec<f64> = sols
        .windows(2)
        .map(|w| {
            let coarse = &w[0].weighted.values;
            let fine = &w[1].weighted.values;
            (0..coarse.len())
                .map(|j| (coarse[j] - fine[2 * j]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    for d in deltas.windows(2) {
        assert!(d[1] <= d[0], "{deltas:?}");
    }
}

#[test]
fn blow_up_is_reported() {
    let spec = FivpSpec::new(0.9, 1.0, tx("x^3"), 3.0);
    let mesh = GradedMesh::for_order(3.0, 256, 0.9).unwrap();
    let err = solve_volterra(&spec, &mesh, SolveOptions::default()).unwrap_err();
    assert!(matches!(err, fracbound::Error::BlowUp { .. }), "{err}");
}

#[test]
fn extremal_gronwall_is_exponential() {
    let prob = InequalityProblem::new(t("1"), t("1"), t("1"), u("u"), 1.0, 1.0);
    let mesh = GradedMesh::new(1.0, 512, 1.0).unwrap();
    let sol = extremal_inequality_solve(&prob, Theorem::Integral, &mesh, 1e-12, 200).unwrap();
    assert!(sol.monotone);
    for (i, &x) in mesh.nodes().iter().enumerate() {
        assert!(rel(sol.sample.values[i], x.exp()) < 1e-4);
    }
}

#[test]
fn extremal_with_zero_l_returns_a() {
    let prob = InequalityProblem::new(t("1 + t^2"), t("2"), t("0"), u("u"), 2.0, 1.0);
    let mesh = GradedMesh::new(1.0, 64, 2.0).unwrap();
    let sol = extremal_inequality_solve(&prob, Theorem::Integral, &mesh, 1e-12, 10).unwrap();
    assert_eq!(sol.iterations, 1);
    for (i, &x) in mesh.nodes().iter().enumerate() {
        assert_eq!(sol.sample.values[i], 1.0 + x * x);
    }
}

#[test]
fn weighted_example_extremal_is_dominated() {
    let prob = InequalityProblem::new(t("1"), t("1"), t("t^(-1/3)"), u("u^(1/2)"), 2.0, 2.0)
        .with_beta(2.0 / 3.0)
        .with_weights(0.5, 1.0 / 3.0);
    let curve = bound(&prob, Theorem::SingularWeighted).unwrap();
    let mesh = GradedMesh::for_order(2.0, 1024, 2.0 / 3.0).unwrap();
    let sol = extremal_inequality_solve(&prob, Theorem::SingularWeighted, &mesh, 1e-10, 500).unwrap();
    assert!(sol.monotone);
    let d = check_dominance(&sol.sample, &curve, 1.0).unwrap();
    assert!(d.holds, "{d:?}");
    // and directly against the closed form
    for i in 1..=1024 {
        let x = mesh.nodes()[i];
        let b = 2f64.sqrt() * x.powf(-0.5) + 9.0 * x.sqrt();
        assert!(sol.sample.unweighted(i) <= b, "t={x}");
    }
}

#[test]
fn envelope_dominates_solutions() {
    let growth = FivpSpec::new(2.0 / 3.0, 1.0, tx("t^(-2/3)*ln(1 + x^(1/2))"), 2.0).with_envelope(
        Envelope::Growth {
            l: t("t^(-2/3)"),
            k: t("0"),
            gamma: 0.5,
        },
        1.75,
    );
    let omega = FivpSpec::new(2.0 / 3.0, 1.0, tx("t^(-3/4)*x^(1/2) + t^(-1/2)*x"), 1.0).with_envelope(
        Envelope::Omega {
            l: t("t^(-11/12) + t^(-5/6)"),
            omega: u("u^(1/2) + u"),
        },
        1.6,
    );
    for spec in [growth, omega] {
        let sol = solve_volterra(&spec, &spec.mesh(1024).unwrap(), SolveOptions::default()).unwrap();
        assert!(sol.converged);
        let curve = envelope_bound(&spec).unwrap();
        let d = check_dominance(&sol.weighted, &curve, 1.01).unwrap();
        assert!(d.holds, "{d:?}");
    }
}

#[test]
fn envelope_requires_admissible_p() {
    let spec = FivpSpec::new(0.5, 1.0, tx("x"), 1.0).with_envelope(
        Envelope::Omega {
            l: t("1"),
            omega: u("u"),
        },
        2.0,
    );
    let err = envelope_bound(&spec).unwrap_err();
    assert!(err.to_string().contains("p > 1/beta"), "{err}");
}
