//! Timing sweeps over problem size.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use polyeig::{solve, SolveOptions};
use serde::{Deserialize, Serialize};

use crate::generate::{generate, GenError, GenKind};

pub const BENCH_CSV_HEADER: &str = "suite,param,mean_seconds,max_berr";

/// A sweep: one structure, with either `n` or `d` varying and the other fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ScalarD,
    GeneralD,
    GeneralN,
    HessD,
    HessN,
    TriD,
    TriN,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::ScalarD,
        Suite::GeneralD,
        Suite::GeneralN,
        Suite::HessD,
        Suite::HessN,
        Suite::TriD,
        Suite::TriN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ScalarD => "scalar-d",
            Suite::GeneralD => "general-d",
            Suite::GeneralN => "general-n",
            Suite::HessD => "hess-d",
            Suite::HessN => "hess-n",
            Suite::TriD => "tri-d",
            Suite::TriN => "tri-n",
        }
    }

    pub fn kind(self) -> GenKind {
        match self {
            Suite::ScalarD => GenKind::Scalar,
            Suite::GeneralD | Suite::GeneralN => GenKind::General,
            Suite::HessD | Suite::HessN => GenKind::HessenbergReduced,
            Suite::TriD | Suite::TriN => GenKind::Tridiagonal,
        }
    }

    fn varies_n(self) -> bool {
        matches!(self, Suite::GeneralN | Suite::HessN | Suite::TriN)
    }

    /// `(n, d)` for sweep parameter `param`: n-sweeps use `d = 2`, matrix
    /// d-sweeps use `n = 2`.
    pub fn dims(self, param: usize) -> (usize, usize) {
        match self {
            Suite::ScalarD => (1, param),
            _ if self.varies_n() => (param, 2),
            _ => (2, param),
        }
    }

    /// Default doubling grid.
    pub fn default_grid(self) -> Vec<usize> {
        let (start, stop) = match self {
            Suite::ScalarD => (50, 3200),
            _ if self.varies_n() => (20, 160),
            _ => (50, 800),
        };
        std::iter::successors(Some(start), |&x| Some(x * 2)).take_while(|&x| x <= stop).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub suite: String,
    pub param: usize,
    pub mean_seconds: f64,
    pub max_berr: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Solve(#[from] polyeig::PolyError),
    #[error("repeats must be at least 1")]
    NoRepeats,
}

/// Time `repeats` solves per grid point; repeat `r` uses seed `seed + r`.
/// Only the solve is timed. `max_berr` is over all results of all repeats.
pub fn run_suite(suite: Suite, grid: &[usize], repeats: usize, seed: u64) -> Result<Vec<BenchRow>, BenchError> {
    if repeats == 0 {
        return Err(BenchError::NoRepeats);
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &param in grid {
        let (n, d) = suite.dims(param);
        let mut total = 0.0;
        let mut max_berr: f64 = 0.0;
        for r in 0..repeats {
            let p = generate(suite.kind(), n, d, seed.wrapping_add(r as u64))?;
            let opts = SolveOptions {
                seed: seed.wrapping_add(r as u64),
                ..SolveOptions::default()
            };
            let t = Instant::now();
            let out = solve(&p, &opts)?;
            total += t.elapsed().as_secs_f64();
            max_berr = out.results.iter().map(|x| x.berr).fold(max_berr, f64::max);
        }
        rows.push(BenchRow {
            suite: suite.name().to_string(),
            param,
            mean_seconds: total / repeats as f64,
            max_berr,
        });
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(BENCH_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!("{},{},{:e},{:e}\n", r.suite, r.param, r.mean_seconds, r.max_berr));
    }
    s
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
