use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracbound::bounds::{bound, InequalityProblem, Theorem};
use fracbound::operators::{frac_integral_expr, GradedMesh};
use fracbound::solver::{solve_volterra, FivpSpec, SolveOptions};
use fracbound::{Expr, OmegaTransform, PowerMode, Var};

fn e(s: &str, vars: &[Var]) -> Expr {
    Expr::parse(s, vars).unwrap()
}

fn bench_frac_integral(c: &mut Criterion) {
    let f = e("t^(-1/3) * exp(t)", &[Var::T]);
    let mut g = c.benchmark_group("frac_integral");
    for n in [256usize, 1024, 4096] {
        let mesh = GradedMesh::for_order(1.0, n, 2.0 / 3.0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &mesh, |b, mesh| {
            b.iter(|| frac_integral_expr(black_box(2.0 / 3.0), &f, mesh).unwrap())
        });
    }
    g.finish();
}

fn bench_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_volterra");
    g.sample_size(10);
    let spec = FivpSpec::new(2.0 / 3.0, 1.0, e("x", &[Var::T, Var::X]), 1.0);
    for n in [256usize, 1024] {
        let mesh = spec.mesh(n).unwrap();
        g.bench_with_input(BenchmarkId::new("linear", n), &mesh, |b, mesh| {
            b.iter(|| solve_volterra(&spec, mesh, SolveOptions::default()).unwrap())
        });
    }
    let spec = FivpSpec::new(
        0.5,
        1.0,
        e("t^(-5/12) * x^2 / (1 + x)", &[Var::T, Var::X]),
        1.0,
    );
    let mesh = spec.mesh(1024).unwrap();
    g.bench_function("rational/1024", |b| {
        b.iter(|| solve_volterra(&spec, &mesh, SolveOptions::default()).unwrap())
    });
    g.finish();
}

fn bench_bound(c: &mut Criterion) {
    let t = &[Var::T];
    let prob = InequalityProblem::new(
        e("1", t),
        e("1", t),
        e("t^(-1/3)", t),
        e("u^(1/2)", &[Var::U]),
        2.0,
        2.0,
    )
    .with_beta(2.0 / 3.0)
    .with_weights(0.5, 1.0 / 3.0);
    c.bench_function("bound/singular-weighted/build", |b| {
        b.iter(|| bound(black_box(&prob), Theorem::SingularWeighted).unwrap())
    });
    let curve = bound(&prob, Theorem::SingularWeighted).unwrap();
    c.bench_function("bound/singular-weighted/eval", |b| {
        b.iter(|| curve.eval(black_box(1.37)).unwrap())
    });
}

fn bench_omega(c: &mut Criterion) {
    let u = &[Var::U];
    let mut g = c.benchmark_group("omega_transform");
    let power = e("u^(1/2)", u);
    g.bench_function("closed", |b| {
        b.iter(|| OmegaTransform::new(black_box(&power), 2.0, PowerMode::PthPower).unwrap())
    });
    let log = e("u * ln(2 + u)", u);
    g.bench_function("tabulated", |b| {
        b.iter(|| OmegaTransform::new(black_box(&log), 1.5, PowerMode::Plain).unwrap())
    });
    g.finish();
}

criterion_group!(kernels, bench_frac_integral, bench_solve, bench_bound, bench_omega);
criterion_main!(kernels);
