//! Run reports: one record per eigenvalue plus aggregates, as text, CSV or JSON.

use polyeig::{EigenResult, Eigenvalue, MatrixPolynomial, SolveOutcome};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the per-eigenvalue CSV.
pub const RECORD_CSV_HEADER: &str = "index,kind,re,im,berr,berr_left,cond,cond_reliable,status,iterations";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    /// `zero`, `finite` or `infinite`.
    pub kind: String,
    /// `None` for infinite eigenvalues.
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub berr: f64,
    pub berr_left: f64,
    pub cond: f64,
    pub cond_reliable: bool,
    /// `criterion1`, `criterion2`, `criterion3` or `maxiter`.
    pub status: String,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub converged: usize,
    pub max_berr: f64,
    pub avg_berr: f64,
    pub total_iterations: usize,
    pub reversal_steps: usize,
    pub forward_steps: usize,
    pub nonfinite_events: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub name: Option<String>,
    pub n: usize,
    pub d: usize,
    pub structure: String,
    pub seed: u64,
    pub records: Vec<Record>,
    pub aggregate: Aggregate,
}

fn record(index: usize, r: &EigenResult) -> Record {
    let (re, im) = match r.eigenvalue {
        Eigenvalue::Infinite => (None, None),
        ev => (Some(ev.value().re), Some(ev.value().im)),
    };
    Record {
        index,
        kind: r.kind().name().to_string(),
        re,
        im,
        berr: r.berr,
        berr_left: r.berr_left,
        cond: r.cond.value,
        cond_reliable: r.cond.reliable,
        status: r.status.name().to_string(),
        iterations: r.iterations,
    }
}

impl RunReport {
    pub fn new(p: &MatrixPolynomial, name: Option<String>, seed: u64, out: &SolveOutcome, wall_seconds: f64) -> Self {
        let records: Vec<Record> = out.results.iter().enumerate().map(|(i, r)| record(i, r)).collect();
        let count = records.len();
        let max_berr = records.iter().map(|r| r.berr).fold(0.0, f64::max);
        let avg_berr = if count == 0 {
            0.0
        } else {
            records.iter().map(|r| r.berr).sum::<f64>() / count as f64
        };
        RunReport {
            schema: SCHEMA_VERSION,
            name,
            n: p.n(),
            d: p.degree(),
            structure: p.structure().name().to_string(),
            seed,
            aggregate: Aggregate {
                count,
                converged: out.results.iter().filter(|r| r.status.converged()).count(),
                max_berr,
                avg_berr,
                total_iterations: out.stats.total_iterations,
                reversal_steps: out.stats.reversal_steps,
                forward_steps: out.stats.forward_steps,
                nonfinite_events: out.stats.nonfinite_events,
                wall_seconds,
            },
            records,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Per-eigenvalue CSV; infinite eigenvalues print `inf` in both value columns.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(RECORD_CSV_HEADER);
        s.push('\n');
        let num = |v: Option<f64>| v.map_or("inf".to_string(), |x| format!("{x:e}"));
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{},{:e},{:e},{:e},{},{},{}\n",
                r.index,
                r.kind,
                num(r.re),
                num(r.im),
                r.berr,
                r.berr_left,
                r.cond,
                r.cond_reliable,
                r.status,
                r.iterations
            ));
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{}n = {}, d = {}, structure = {}, seed = {}\n",
            self.name.as_ref().map(|n| format!("{n}: ")).unwrap_or_default(),
            self.n,
            self.d,
            self.structure,
            self.seed
        );
        s.push_str(&format!(
            "{:>5}  {:>24} {:>24}  {:>9} {:>9}  {:>10}  iter\n",
            "#", "re", "im", "berr", "cond", "status"
        ));
        for r in &self.records {
            let (re, im) = match (r.re, r.im) {
                (Some(a), Some(b)) => (format!("{a:.16e}"), format!("{b:.16e}")),
                _ => ("inf".into(), String::new()),
            };
            let cond = if r.cond_reliable { format!("{:.2e}", r.cond) } else { "unreliable".into() };
            s.push_str(&format!(
                "{:>5}  {:>24} {:>24}  {:>9.2e} {:>9}  {:>10}  {}\n",
                r.index, re, im, r.berr, cond, r.status, r.iterations
            ));
        }
        let a = &self.aggregate;
        s.push_str(&format!(
            "{} eigenvalues, {} converged, max berr {:.2e}, avg berr {:.2e}, {:.3} s\n",
            a.count, a.converged, a.max_berr, a.avg_berr, a.wall_seconds
        ));
        s
    }
}
