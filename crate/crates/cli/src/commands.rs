//! Subcommand implementations, writing to any `Write` so tests can capture them.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use polyeig::{solve, MatrixPolynomial, SolveOptions, Structure};

use crate::bench::{rows_to_csv, run_suite, Suite};
use crate::check::check_outcome;
use crate::generate::{generate, GenKind};
use crate::problem_file::{emit_problem, parse_complex, parse_problem, Format, Problem};
use crate::report::RunReport;

/// Usage problems exit with 2, failed checks and solver failures with 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("write failed: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    Json,
}

pub fn read_problem(path: &Path) -> Result<Problem, CliError> {
    let src = std::fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let src = String::from_utf8(src).map_err(|_| CliError::Usage(format!("{}: not valid UTF-8", path.display())))?;
    parse_problem(&src, Format::from_path(path)).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn options(max_iter: usize, seed: u64, rank_tol: Option<f64>) -> Result<SolveOptions, CliError> {
    if max_iter == 0 {
        return Err(CliError::Usage("--max-iter must be at least 1".into()));
    }
    if rank_tol.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
        return Err(CliError::Usage("--rank-tol must be a nonnegative number".into()));
    }
    Ok(SolveOptions { max_iter, seed, rank_tol })
}

fn run(p: &MatrixPolynomial, name: Option<String>, opts: &SolveOptions) -> Result<RunReport, CliError> {
    let t = Instant::now();
    let out = solve(p, opts).map_err(|e| CliError::Failure(format!("solve failed: {e}")))?;
    Ok(RunReport::new(p, name, opts.seed, &out, t.elapsed().as_secs_f64()))
}

fn write_report(r: &RunReport, format: ReportFormat, out: &mut dyn Write) -> Result<(), CliError> {
    let s = match format {
        ReportFormat::Text => r.to_text(),
        ReportFormat::Csv => r.to_csv(),
        ReportFormat::Json => r.to_json(),
    };
    out.write_all(s.as_bytes())?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SolveArgs {
    pub file: PathBuf,
    pub format: ReportFormat,
    pub max_iter: usize,
    pub seed: u64,
    pub rank_tol: Option<f64>,
}

pub fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = options(a.max_iter, a.seed, a.rank_tol)?;
    let prob = read_problem(&a.file)?;
    let report = run(&prob.poly, prob.name, &opts)?;
    write_report(&report, a.format, out)
}

#[derive(Debug, Clone)]
pub struct RootsArgs {
    pub file: Option<PathBuf>,
    /// Coefficients `a_0 .. a_d` as `re,im` literals.
    pub coeffs: Vec<String>,
    pub format: ReportFormat,
    pub max_iter: usize,
    pub seed: u64,
}

pub fn cmd_roots(a: &RootsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = options(a.max_iter, a.seed, None)?;
    let (poly, name) = match (&a.file, a.coeffs.is_empty()) {
        (Some(_), false) => return Err(CliError::Usage("give either a file or --coeffs, not both".into())),
        (None, true) => return Err(CliError::Usage("give a problem file or --coeffs".into())),
        (Some(path), true) => {
            let prob = read_problem(path)?;
            if prob.poly.n() != 1 {
                return Err(CliError::Usage(format!("roots needs a 1x1 problem, file has n = {}", prob.poly.n())));
            }
            let poly = prob
                .poly
                .with_structure(Structure::Scalar)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            (poly, prob.name)
        }
        (None, false) => {
            let coeffs = a
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, s)| parse_complex(s).map_err(|e| CliError::Usage(format!("coefficient {i}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let poly = MatrixPolynomial::scalar(&coeffs).map_err(|e| CliError::Usage(e.to_string()))?;
            (poly, None)
        }
    };
    let report = run(&poly, name, &opts)?;
    write_report(&report, a.format, out)
}

#[derive(Debug, Clone)]
pub struct BenchArgs {
    pub suite: Suite,
    pub repeats: usize,
    pub seed: u64,
    /// Empty means the suite's default grid.
    pub sizes: Vec<usize>,
    pub json: bool,
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.sizes.contains(&0) {
        return Err(CliError::Usage("--sizes entries must be positive".into()));
    }
    let grid = if a.sizes.is_empty() { a.suite.default_grid() } else { a.sizes.clone() };
    let rows = run_suite(a.suite, &grid, a.repeats, a.seed).map_err(|e| match e {
        crate::bench::BenchError::Solve(e) => CliError::Failure(e.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;
    if a.json {
        let doc = serde_json::json!({ "schema": crate::report::SCHEMA_VERSION, "rows": rows });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("rows serialize"))?;
    } else {
        out.write_all(rows_to_csv(&rows).as_bytes())?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CheckArgs {
    pub file: PathBuf,
    pub max_iter: usize,
    pub seed: u64,
    pub json: bool,
}

/// Returns `Failure` when any check is violated (after printing the report).
pub fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = options(a.max_iter, a.seed, None)?;
    let prob = read_problem(&a.file)?;
    let outcome = solve(&prob.poly, &opts).map_err(|e| CliError::Failure(format!("solve failed: {e}")))?;
    let rep = check_outcome(&prob.poly, &outcome);
    if a.json {
        let doc = serde_json::json!({ "schema": crate::report::SCHEMA_VERSION, "passed": rep.passed(), "check": rep });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("check serializes"))?;
    } else {
        writeln!(out, "results: {} (expected {})", rep.count, rep.expected_count)?;
        writeln!(out, "converged: {}", rep.converged)?;
        writeln!(out, "max criterion-1 backward error: {:.3e} (bound {:.3e})", rep.max_residual, rep.residual_bound)?;
        let upper = rep.pellet_upper.map_or("inf".to_string(), |u| format!("{u:.6e}"));
        writeln!(out, "Pellet annulus: [{:.6e}, {upper}]", rep.pellet_lower)?;
        for v in &rep.violations {
            writeln!(out, "VIOLATION {v}")?;
        }
        writeln!(out, "{}", if rep.passed() { "PASS" } else { "FAIL" })?;
    }
    if rep.passed() {
        Ok(())
    } else {
        Err(CliError::Failure(format!("{} check(s) failed", rep.violations.len())))
    }
}

#[derive(Debug, Clone)]
pub struct GenArgs {
    pub kind: GenKind,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub format: Format,
}

pub fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let poly = generate(a.kind, a.n, a.d, a.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let prob = Problem {
        poly,
        name: Some(format!("{}-seed{}", a.kind, a.seed)),
    };
    out.write_all(emit_problem(&prob, a.format).as_bytes())?;
    Ok(())
}
