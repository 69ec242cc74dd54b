//! Subcommand implementations and the exit-code contract:
//! 0 pass, 1 mathematical violation, 2 invalid input, 3 numerical failure.

use std::path::Path;

use serde::Serialize;
use tdirac_core::clifford::fiber_battery;
use tdirac_core::geometry::{load_model, ModelSpec};
use tdirac_core::spectral::{crosscheck_suite, gap_scan, GridConfig, Solver, SpectrumReport, TorusBundle};
use tdirac_core::weitzenbock::{verify_suite, IdentityReport, Status, SuiteConfig};
use tdirac_core::Error;

use crate::config::{Cli, Command, CrosscheckArgs, FiberArgs, GapArgs, KRange, VerifyArgs};
use crate::output::{emit, render};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("output: {0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence(_) | Error::AmbiguousCluster(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Result of a completed run.
pub struct Outcome {
    pub code: i32,
    pub summary: String,
    pub warnings: Vec<String>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Gap(a) => gap(a),
        Command::Fiber(a) => fiber(a),
        Command::Crosscheck(a) => crosscheck(a),
    }
}

fn model(path: &Path) -> Result<ModelSpec, CliError> {
    load_model(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn torus(spec: &ModelSpec) -> Result<TorusBundle, CliError> {
    Ok(TorusBundle::from_spec(spec)?)
}

fn verdict(code: i32) -> &'static str {
    if code == 0 {
        "pass"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct VerifyRow {
    k: i64,
    label: &'static str,
    name: &'static str,
    fiber: String,
    asserted: bool,
    status: Status,
    /// Status with its note, e.g. `pass (τ basic)`.
    result: String,
    exact_zero: bool,
    residual: String,
    monomials: String,
}

fn verify_row(k: i64, r: &IdentityReport) -> VerifyRow {
    let status = match r.status {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skipped => "skipped",
    };
    VerifyRow {
        k,
        label: r.label,
        name: r.name,
        fiber: r.fiber.to_string(),
        asserted: r.asserted,
        status: r.status,
        result: match &r.note {
            Some(n) => format!("{status} ({n})"),
            None => status.into(),
        },
        exact_zero: r.exact_zero,
        residual: r.residual.clone(),
        monomials: r.monomials.iter().map(|m| format!("{}={}", m.monomial, m.residual)).collect::<Vec<_>>().join(";"),
    }
}

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let spec = model(&a.model)?;
    let data = spec.connection_data()?;
    let base = SuiteConfig::from_spec(&spec)?;
    let ks = match a.k {
        Some(r) => r,
        None => KRange { min: base.k, max: base.k },
    };
    let mut reports = Vec::new();
    for k in ks.min..=ks.max {
        reports.push(verify_suite(&data, &SuiteConfig { k, ..base.clone() })?);
    }
    let counts = |r: &IdentityReport| r.asserted || a.strict;
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|rep| {
            rep.items.iter().filter(|i| counts(i) && i.status == Status::Fail).map(move |i| format!("k={} ({}) {}", rep.k, i.label, i.name))
        })
        .collect();
    let passed = reports.iter().flat_map(|r| &r.items).filter(|i| i.status == Status::Pass).count();
    let rows: Vec<VerifyRow> = reports.iter().flat_map(|rep| rep.items.iter().map(move |i| verify_row(rep.k, i))).collect();
    let code = i32::from(!failed.is_empty());
    let report = serde_json::json!({
        "command": "verify",
        "model": spec.model.name,
        "strict": a.strict,
        "verdict": verdict(code),
        "runs": reports,
    });
    emit(&a.output, &render(a.output.format, &report, &rows)?)?;
    let mut summary = format!("verify {}: {passed} identities pass", spec.model.name);
    if !failed.is_empty() {
        summary.push_str(&format!("; violated: {}", failed.join(", ")));
    }
    Ok(Outcome { code, summary, warnings: Vec::new() })
}

#[derive(Serialize)]
struct GapRow {
    k: i64,
    #[serde(rename = "N")]
    n: usize,
    gap: f64,
    #[serde(rename = "2km")]
    two_km: f64,
    #[serde(rename = "fitted_C")]
    fitted_c: f64,
    kernel_odd: usize,
    kernel_even: usize,
    runtime_ms: u64,
}

impl From<&SpectrumReport> for GapRow {
    fn from(r: &SpectrumReport) -> Self {
        GapRow {
            k: r.k,
            n: r.n,
            gap: r.gap,
            two_km: r.two_km,
            fitted_c: r.fitted_c,
            kernel_odd: r.kernel_dim_odd,
            kernel_even: r.kernel_dim_even,
            runtime_ms: r.runtime_ms,
        }
    }
}

/// Grids coarser than this do not resolve the lowest Landau levels.
const RESOLUTION_HEURISTIC: usize = 8;

fn gap(a: &GapArgs) -> Result<Outcome, CliError> {
    if a.n < 4 || a.n % 2 == 1 {
        return Err(CliError::Input(format!("--N must be even and at least 4 (got {})", a.n)));
    }
    if !(0.0..1.0).contains(&a.tol) {
        return Err(CliError::Input(format!("--tol must lie in [0, 1) (got {})", a.tol)));
    }
    let mut warnings = Vec::new();
    if a.n < RESOLUTION_HEURISTIC {
        warnings.push(format!("grid below resolution heuristic (N = {} < {RESOLUTION_HEURISTIC})", a.n));
    }
    let spec = model(&a.model)?;
    let bundle = torus(&spec)?;
    if bundle.line.is_none() {
        return Err(CliError::Input(format!("{} declares no line bundle", spec.model.name)));
    }
    let grid = GridConfig {
        count: a.count,
        leaf_points: a.leaf_points.max(1),
        solver: if a.strict { Solver::Dense } else { Solver::Auto },
        gauge_seed: a.seed,
        ..GridConfig::new(a.n)
    };
    let reports = gap_scan(&bundle, a.k.min..=a.k.max, &grid)?;
    let mut notes = Vec::new();
    let mut violations = Vec::new();
    for r in &reports {
        if r.k < 1 {
            notes.push(format!("k={}: vanishing asserted only for large k", r.k));
            continue;
        }
        if r.kernel_dim_odd != 0 {
            violations.push(format!("k={}: odd kernel of dimension {}", r.k, r.kernel_dim_odd));
        }
        if r.gap < r.two_km * (1.0 - a.tol) {
            violations.push(format!("k={}: gap {:.6} below 2km(1 − tol) = {:.6}", r.k, r.gap, r.two_km * (1.0 - a.tol)));
        }
    }
    let code = i32::from(!violations.is_empty());
    let rows: Vec<GapRow> = reports.iter().map(GapRow::from).collect();
    let report = serde_json::json!({
        "command": "gap",
        "model": spec.model.name,
        "grid": grid,
        "tol": a.tol,
        "verdict": verdict(code),
        "notes": notes,
        "violations": violations,
        "fitted_C": tdirac_core::spectral::fitted_c(&reports),
        "reports": reports,
    });
    emit(&a.output, &render(a.output.format, &report, &rows)?)?;
    let mut summary = format!("gap {}: k = {} at N = {}: {}", spec.model.name, a.k, a.n, verdict(code));
    for line in notes.iter().chain(&violations) {
        summary.push_str("\n  ");
        summary.push_str(line);
    }
    Ok(Outcome { code, summary, warnings })
}

fn fiber(a: &FiberArgs) -> Result<Outcome, CliError> {
    let report = fiber_battery(a.q, a.trials, a.seed).map_err(|e| match e {
        Error::OddCodimension(q) => CliError::Input(format!("codimension must be even (got q = {q})")),
        e => CliError::from(e),
    })?;
    let code = i32::from(!report.passed());
    let rows: Vec<_> = report
        .failures
        .iter()
        .map(|f| {
            serde_json::json!({
                "trial": f.trial,
                "reason": f.reason,
                "B": serde_json::to_string(&f.b).unwrap_or_default(),
                "J": serde_json::to_string(&f.j).unwrap_or_default(),
            })
        })
        .collect();
    emit(&a.output, &render(a.output.format, &report, &rows)?)?;
    let summary = if a.trials == 0 {
        format!("fiber q = {}: no trials requested", a.q)
    } else {
        format!(
            "fiber q = {}: {}/{} exact, {}/{} within bound: {}",
            a.q,
            report.rl1_exact,
            a.trials,
            report.bound_ok,
            a.trials,
            verdict(code)
        )
    };
    Ok(Outcome { code, summary, warnings: Vec::new() })
}

#[derive(Serialize)]
struct CrossCsvRow {
    k: i64,
    label: &'static str,
    name: &'static str,
    residual: f64,
    absolute: f64,
    passed: bool,
}

fn crosscheck(a: &CrosscheckArgs) -> Result<Outcome, CliError> {
    if a.n < 4 || a.n % 2 == 1 {
        return Err(CliError::Input(format!("--N must be even and at least 4 (got {})", a.n)));
    }
    if a.trials == 0 {
        return Err(CliError::Input("--trials must be positive".into()));
    }
    let spec = model(&a.model)?;
    let bundle = torus(&spec)?;
    let mut rows = Vec::new();
    for k in a.k.min..=a.k.max {
        for r in crosscheck_suite(&bundle, k, a.n, a.trials, a.seed, a.tol)? {
            rows.push(CrossCsvRow { k, label: r.label, name: r.name, residual: r.residual, absolute: r.absolute, passed: r.passed });
        }
    }
    let code = i32::from(rows.iter().any(|r| !r.passed));
    let mut notes = Vec::new();
    if a.trials == 1 {
        notes.push("single trial: residuals rest on one random section".to_string());
    }
    let report = serde_json::json!({
        "command": "crosscheck",
        "model": spec.model.name,
        "N": a.n,
        "trials": a.trials,
        "seed": a.seed,
        "tol": a.tol,
        "verdict": verdict(code),
        "notes": notes,
        "identities": rows,
    });
    emit(&a.output, &render(a.output.format, &report, &rows)?)?;
    let mut summary = format!("crosscheck {} at N = {}: {}", spec.model.name, a.n, verdict(code));
    for n in &notes {
        summary.push_str(&format!("\n  note: {n}"));
    }
    if code != 0 {
        summary.push_str(&format!("\n  {:<3} {:<4} {:>14} {:>14}  {}", "k", "id", "relative", "absolute", "identity"));
        for r in &rows {
            let mark = if r.passed { "" } else { "  <- exceeds tolerance" };
            summary.push_str(&format!("\n  {:<3} {:<4} {:>14.6e} {:>14.6e}  {}{mark}", r.k, r.label, r.residual, r.absolute, r.name));
        }
    }
    Ok(Outcome { code, summary, warnings: Vec::new() })
}
