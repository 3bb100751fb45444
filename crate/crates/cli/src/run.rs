//! The four pipelines.

use fracbound::hypotheses::{existence_check, growth_check, lipschitz_check};
use fracbound::solver::{
    check_dominance, envelope_bound, extremal_inequality_solve, solve_volterra,
};
use fracbound::{
    bound, CheckOptions, Envelope, Expr, FivpSpec, GradedMesh, HypothesisReport,
    InequalityProblem, SampleBox, SolutionCurve, SolveOptions, Theorem, Var, Verdict,
};
use serde_json::json;

use crate::config::{Config, EnvelopeKind, EnvelopeSection, Format, Mode, Real};
use crate::error::{exit, CliError};
use crate::output::{self, Table};

/// Dominance slack used by `verify`.
pub const VERIFY_FACTOR: f64 = 1.01;

const DEFAULT_N: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
    Inconclusive,
    NotConverged,
    DominanceViolated,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => exit::OK,
            Status::CheckFailed => exit::CHECK_FAILED,
            Status::Inconclusive => exit::INCONCLUSIVE,
            Status::NotConverged => exit::NOT_CONVERGED,
            Status::DominanceViolated => exit::DOMINANCE,
        }
    }
}

/// What a pipeline produced: a status, human-readable lines, and the
/// rendered curve or report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub report: Vec<String>,
    pub data: Option<Vec<u8>>,
}

impl Outcome {
    fn new(status: Status) -> Self {
        Outcome {
            status,
            report: Vec::new(),
            data: None,
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.report.push(s.into());
    }
}

pub fn execute(mode: Mode, cfg: &Config) -> Result<Outcome, CliError> {
    match mode {
        Mode::Bound => run_bound(cfg),
        Mode::Solve => run_solve(cfg),
        Mode::Check => run_check(cfg),
        Mode::Verify => run_verify(cfg),
        Mode::Example => Err(CliError::Config("`example` only selects a preset's own mode".into())),
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!("{key} is required"))
}

fn real(r: &Option<Real>, key: &str) -> Result<Option<f64>, CliError> {
    r.as_ref().map(|r| r.value(key)).transpose()
}

fn horizon(cfg: &Config) -> Result<f64, CliError> {
    real(&cfg.mesh.horizon, "mesh.T")?.ok_or_else(|| missing("mesh.T"))
}

fn cells(cfg: &Config) -> Result<usize, CliError> {
    match cfg.mesh.n {
        Some(0) => Err(CliError::Config("mesh.N must be positive".into())),
        Some(n) => Ok(n),
        None => Ok(DEFAULT_N),
    }
}

fn solve_options(cfg: &Config) -> Result<SolveOptions, CliError> {
    let mut opts = SolveOptions::default();
    if let Some(tol) = real(&cfg.numeric.tol, "numeric.tol")? {
        if !(tol > 0.0) {
            return Err(CliError::Config(format!("numeric.tol must be positive, got {tol}")));
        }
        opts.tol = tol;
    }
    if let Some(m) = cfg.numeric.max_iter {
        opts.max_iter = m;
    }
    Ok(opts)
}

fn format_of(cfg: &Config, fallback: Format) -> Format {
    cfg.output.format.unwrap_or(fallback)
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn run_bound(cfg: &Config) -> Result<Outcome, CliError> {
    let ps = cfg.problem.as_ref().ok_or_else(|| missing("[problem]"))?;
    let theorem = Theorem::from_name(&ps.theorem).ok_or_else(|| {
        let names: Vec<_> = Theorem::ALL.iter().map(|t| t.name()).collect();
        CliError::Config(format!(
            "problem.theorem: unknown family `{}` (one of {})",
            ps.theorem,
            names.join(", ")
        ))
    })?;
    let p = real(&cfg.numeric.p, "numeric.p")?.ok_or_else(|| missing("numeric.p"))?;
    let t = [Var::T];
    let mut prob = InequalityProblem::new(
        ps.a.parse("problem.a", &t)?,
        ps.b.parse("problem.b", &t)?,
        ps.l.parse("problem.l", &t)?,
        ps.omega.parse("problem.omega", &[Var::U])?,
        p,
        horizon(cfg)?,
    );
    let beta = real(&ps.beta, "problem.beta")?;
    if let Some(b) = beta {
        prob = prob.with_beta(b);
    }
    let (alpha, delta) = (real(&ps.alpha, "problem.alpha")?, real(&ps.delta, "problem.delta")?);
    if alpha.is_some() || delta.is_some() {
        prob = prob.with_weights(alpha.unwrap_or(0.0), delta.unwrap_or(0.0));
    }
    if let Some(g) = real(&ps.gamma, "problem.gamma")? {
        prob = prob.with_gamma(g);
    }

    let curve = bound(&prob, theorem)?;
    let n = cells(cfg)?;
    let r = match real(&cfg.mesh.r, "mesh.r")? {
        Some(r) => r,
        None => beta.map_or(1.0, |b| (2.0 / b).max(1.0)),
    };
    let mesh = GradedMesh::new(curve.t1(), n, r)?;
    let extremal = if cfg.output.extremal == Some(true) {
        let opts = solve_options(cfg)?;
        Some(extremal_inequality_solve(&prob, theorem, &mesh, opts.tol, opts.max_iter)?)
    } else {
        None
    };

    let mut table = Table::new(if extremal.is_some() {
        &["t", "bound", "u_extremal"]
    } else {
        &["t", "bound"]
    });
    for (i, &x) in mesh.nodes().iter().enumerate().skip(1) {
        let mut row = vec![x, curve.eval(x)?];
        if let Some(e) = &extremal {
            row.push(e.sample.unweighted(i));
        }
        table.push(row);
    }
    let flags: Vec<String> = curve
        .flags()
        .iter()
        .map(|f| serde_json::to_value(f).map_or(String::new(), |v| v.as_str().unwrap_or("").to_string()))
        .collect();
    table.meta("theorem", theorem.name());
    table.meta("t1", output::number(curve.t1()));
    table.meta("flags", flags.clone());

    let mut out = Outcome::new(Status::Ok);
    out.line(format!("theorem: {theorem}"));
    out.line(format!("T1: {}", sci(curve.t1())));
    if curve.t1() < prob.horizon {
        out.line(format!("note: the bound holds only on (0, T1], T = {}", prob.horizon));
    }
    out.line(format!("flags: {}", flags.join(", ")));
    if let Some(e) = &extremal {
        out.line(format!("extremal iterations: {}", e.iterations));
    }
    out.data = Some(table.render(format_of(cfg, Format::Csv))?);
    Ok(out)
}

fn fivp(cfg: &Config) -> Result<FivpSpec, CliError> {
    let fs = cfg.fivp.as_ref().ok_or_else(|| missing("[fivp]"))?;
    let spec = FivpSpec::new(
        fs.beta.value("fivp.beta")?,
        fs.x0.value("fivp.x0")?,
        fs.f.parse("fivp.f", &[Var::T, Var::X])?,
        horizon(cfg)?,
    );
    spec.validate()?;
    Ok(spec)
}

fn envelope_section(cfg: &Config) -> Result<&EnvelopeSection, CliError> {
    cfg.envelope.as_ref().ok_or_else(|| missing("[envelope]"))
}

fn envelope(es: &EnvelopeSection, f: &Expr) -> Result<Envelope, CliError> {
    let l = es.l.parse("envelope.l", &[Var::T])?;
    Ok(match es.kind {
        EnvelopeKind::Omega => Envelope::Omega { l, omega: omega(es)? },
        EnvelopeKind::Growth => Envelope::Growth {
            l,
            k: growth_k(es)?,
            gamma: growth_gamma(es)?,
        },
        EnvelopeKind::Lipschitz => Envelope::lipschitz(f, &l),
    })
}

fn omega(es: &EnvelopeSection) -> Result<Expr, CliError> {
    es.omega
        .as_ref()
        .ok_or_else(|| missing("envelope.omega"))?
        .parse("envelope.omega", &[Var::U])
}

fn growth_gamma(es: &EnvelopeSection) -> Result<f64, CliError> {
    real(&es.gamma, "envelope.gamma")?.ok_or_else(|| missing("envelope.gamma"))
}

fn growth_k(es: &EnvelopeSection) -> Result<Expr, CliError> {
    es.k.as_ref()
        .map_or(Ok(Expr::constant(0.0)), |k| k.parse("envelope.k", &[Var::T]))
}

fn sample_box(cfg: &Config) -> Result<SampleBox, CliError> {
    let mut bx = SampleBox::default();
    if let Some(s) = &cfg.sample {
        bx.t_lo = s.t_lo.unwrap_or(bx.t_lo);
        bx.t_hi = s.t_hi.unwrap_or(bx.t_hi);
        bx.x_lo = s.x_lo.unwrap_or(bx.x_lo);
        bx.x_hi = s.x_hi.unwrap_or(bx.x_hi);
        bx.nt = s.nt.unwrap_or(bx.nt);
        bx.nx = s.nx.unwrap_or(bx.nx);
    }
    if !(bx.t_lo > 0.0 && bx.t_hi > bx.t_lo && bx.x_hi > bx.x_lo && bx.nt >= 2 && bx.nx >= 2) {
        return Err(CliError::Config(
            "sample: need 0 < tLo < tHi, xLo < xHi and at least 2 points per axis".into(),
        ));
    }
    Ok(bx)
}

/// Runs the hypothesis route matching the envelope kind.
pub fn hypothesis_report(cfg: &Config) -> Result<HypothesisReport, CliError> {
    let spec = fivp(cfg)?;
    let es = envelope_section(cfg)?;
    let opts = CheckOptions {
        p: real(&cfg.numeric.p, "numeric.p")?,
        sample: sample_box(cfg)?,
        l_exponent: real(&es.l_exponent, "envelope.lExponent")?,
        k_exponent: real(&es.k_exponent, "envelope.kExponent")?,
    };
    let l = es.l.parse("envelope.l", &[Var::T])?;
    let report = match es.kind {
        EnvelopeKind::Omega => existence_check(&spec.f, &l, &omega(es)?, spec.beta, &opts)?,
        EnvelopeKind::Growth => {
            growth_check(Some(&spec.f), &l, &growth_k(es)?, growth_gamma(es)?, spec.beta, &opts)?
        }
        EnvelopeKind::Lipschitz => lipschitz_check(&spec.f, &l, spec.beta, &opts)?,
    };
    Ok(report)
}

fn describe(report: &HypothesisReport, out: &mut Outcome) {
    out.line(format!("route: {}", report.route.name()));
    match report.admissible_p {
        Some((lo, hi)) => out.line(format!("admissible p: ({lo:.6}, {hi:.6})")),
        None => out.line("admissible p: none"),
    }
    for c in &report.checks {
        out.line(format!("  [{}] {}: {}", c.verdict, c.name, c.evidence));
    }
    out.line(format!("verdict: {}", report.verdict()));
}

fn status_of(v: Verdict) -> Status {
    match v {
        Verdict::Pass => Status::Ok,
        Verdict::Fail => Status::CheckFailed,
        Verdict::Inconclusive => Status::Inconclusive,
    }
}

pub fn run_check(cfg: &Config) -> Result<Outcome, CliError> {
    let report = hypothesis_report(cfg)?;
    let mut out = Outcome::new(status_of(report.verdict()));
    describe(&report, &mut out);
    out.data = Some(match format_of(cfg, Format::Json) {
        Format::Json => {
            let mut v = serde_json::to_value(&report).map_err(|e| CliError::Config(e.to_string()))?;
            v["verdict"] = json!(report.verdict());
            output::json_bytes(&v)?
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| vec![c.name.clone(), c.verdict.to_string(), c.evidence.clone()])
                .collect();
            output::text_csv(&["check", "verdict", "evidence"], &rows)?
        }
    });
    Ok(out)
}

fn solve(cfg: &Config, spec: &FivpSpec) -> Result<SolutionCurve, CliError> {
    let n = cells(cfg)?;
    let mesh = match real(&cfg.mesh.r, "mesh.r")? {
        Some(r) => GradedMesh::new(spec.horizon, n, r)?,
        None => spec.mesh(n)?,
    };
    Ok(solve_volterra(spec, &mesh, solve_options(cfg)?)?)
}

fn convergence(sol: &SolutionCurve, out: &mut Outcome, table: &mut Table) {
    out.line(format!("iterations: {}", sol.iterations));
    out.line(format!("residual: {:.6e}", sol.residual));
    out.line(format!("grading r: {}", sol.mesh().r()));
    table.meta("iterations", sol.iterations);
    table.meta("residual", output::number(sol.residual));
    table.meta("converged", sol.converged);
    if !sol.converged {
        let msg = format!(
            "not converged after {} iterations; last change {:e}",
            sol.iterations, sol.residual
        );
        out.line(msg.clone());
        out.status = Status::NotConverged;
        table.warning = Some(msg);
    }
}

pub fn run_solve(cfg: &Config) -> Result<Outcome, CliError> {
    let spec = fivp(cfg)?;
    let sol = solve(cfg, &spec)?;
    let mut out = Outcome::new(Status::Ok);
    let mut table = Table::new(&["t", "v", "x"]);
    for (i, &t) in sol.mesh().nodes().iter().enumerate().skip(1) {
        table.push(vec![t, sol.weighted.values[i], sol.x(i)]);
    }
    convergence(&sol, &mut out, &mut table);
    out.data = Some(table.render(format_of(cfg, Format::Csv))?);
    Ok(out)
}

pub fn run_verify(cfg: &Config) -> Result<Outcome, CliError> {
    let report = hypothesis_report(cfg)?;
    let mut out = Outcome::new(status_of(report.verdict()));
    describe(&report, &mut out);
    if out.status != Status::Ok {
        out.line("hypotheses not established; nothing verified");
        return Ok(out);
    }
    let mut spec = fivp(cfg)?;
    let es = envelope_section(cfg)?;
    let p = real(&cfg.numeric.p, "numeric.p")?.ok_or_else(|| missing("numeric.p"))?;
    let env = envelope(es, &spec.f)?;
    spec = spec.with_envelope(env, p);
    spec.validate()?;
    let curve = envelope_bound(&spec)?;
    out.line(format!("domain sup: {}", curve.domain_sup()));
    out.line(format!("T1: {}", sci(curve.t1())));
    if curve.t1() < spec.horizon {
        return Err(fracbound::Error::HorizonCollapse(format!(
            "the envelope bound stops at T1 = {} < T = {}",
            curve.t1(),
            spec.horizon
        ))
        .into());
    }

    let sol = solve(cfg, &spec)?;
    let mut table = Table::new(&["t", "v", "bound", "ratio"]);
    convergence(&sol, &mut out, &mut table);
    let dom = check_dominance(&sol.weighted, &curve, VERIFY_FACTOR)?;
    let shift = sol.weighted.weight_exponent + curve.weight_exponent();
    for (i, &t) in sol.mesh().nodes().iter().enumerate().skip(1) {
        let b = curve.weighted(t)? * if shift == 0.0 { 1.0 } else { t.powf(shift) };
        let v = sol.weighted.values[i];
        table.push(vec![t, v, b, v.abs() / b]);
    }
    table.meta("domain_sup", output::number(curve.domain_sup()));
    table.meta("worst_ratio", output::number(dom.worst_ratio));
    table.meta("worst_t", output::number(dom.worst_t));
    out.line(format!("worst ratio: {:.6} at t = {:.6e}", dom.worst_ratio, dom.worst_t));
    out.line(format!("worst margin: {:.6}", 1.0 - dom.worst_ratio));
    if out.status == Status::Ok && !dom.holds {
        out.line(format!(
            "dominance violated at t = {:e}: ratio {} > {VERIFY_FACTOR}",
            dom.worst_t, dom.worst_ratio
        ));
        out.status = Status::DominanceViolated;
    }
    out.data = Some(table.render(format_of(cfg, Format::Csv))?);
    Ok(out)
}
