//! Result types and the one-eigenvalue-at-a-time Laguerre driver shared by the
//! dense and structured engines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::PolyError;
use crate::laguerre::{deflate, laguerre_denominator};
use crate::matrix::{normalize, CMatrix};
use crate::metrics::{error_report, Condition};
use crate::poly::{MatrixPolynomial, Weights};
use crate::prep::EstimateSet;
use crate::scalar::{solve_scalar, ScalarPolynomial};
use crate::{C64, EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenKind {
    Zero,
    Finite,
    Infinite,
}

impl EigenKind {
    pub fn name(self) -> &'static str {
        match self {
            EigenKind::Zero => "zero",
            EigenKind::Finite => "finite",
            EigenKind::Infinite => "infinite",
        }
    }
}

/// A classified eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eigenvalue {
    Zero,
    Finite(C64),
    Infinite,
}

impl Eigenvalue {
    pub fn kind(self) -> EigenKind {
        match self {
            Eigenvalue::Zero => EigenKind::Zero,
            Eigenvalue::Finite(_) => EigenKind::Finite,
            Eigenvalue::Infinite => EigenKind::Infinite,
        }
    }

    /// The value as a complex number; infinite eigenvalues map to `(inf, 0)`.
    pub fn value(self) -> C64 {
        match self {
            Eigenvalue::Zero => C64::new(0.0, 0.0),
            Eigenvalue::Finite(z) => z,
            Eigenvalue::Infinite => C64::new(f64::INFINITY, 0.0),
        }
    }

    pub fn modulus(self) -> f64 {
        match self {
            Eigenvalue::Infinite => f64::INFINITY,
            other => other.value().norm(),
        }
    }
}

/// Why the iteration for an eigenvalue stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopStatus {
    /// Smallest pivot of the factorization below `τ`.
    Criterion1,
    /// Backward-error bound from three solves below `ε`.
    Criterion2,
    /// The Laguerre step no longer changes the iterate.
    Criterion3,
    MaxIter,
}

impl StopStatus {
    pub fn name(self) -> &'static str {
        match self {
            StopStatus::Criterion1 => "criterion1",
            StopStatus::Criterion2 => "criterion2",
            StopStatus::Criterion3 => "criterion3",
            StopStatus::MaxIter => "maxiter",
        }
    }

    pub fn converged(self) -> bool {
        self != StopStatus::MaxIter
    }
}

/// One eigentriple with its diagnostics. `x` and `y` have unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub eigenvalue: Eigenvalue,
    pub x: Vec<C64>,
    pub y: Vec<C64>,
    /// Right backward error `η(λ, x)`.
    pub berr: f64,
    /// Left backward error `η(λ, y^*)`.
    pub berr_left: f64,
    pub cond: Condition,
    pub status: StopStatus,
    pub iterations: usize,
}

impl EigenResult {
    pub(crate) fn new(
        p: &MatrixPolynomial,
        w: &Weights,
        eigenvalue: Eigenvalue,
        mut x: Vec<C64>,
        mut y: Vec<C64>,
        status: StopStatus,
        iterations: usize,
    ) -> Self {
        normalize(&mut x);
        normalize(&mut y);
        let rep = error_report(p, eigenvalue, &x, &y, w);
        Self {
            eigenvalue,
            x,
            y,
            berr: rep.eta_right,
            berr_left: rep.eta_left,
            cond: rep.kappa,
            status,
            iterations,
        }
    }

    pub fn kind(&self) -> EigenKind {
        self.eigenvalue.kind()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Iteration cap per eigenvalue.
    pub max_iter: usize,
    /// Seed for the criterion-2 probe vector and step perturbations.
    pub seed: u64,
    /// Rank tolerance relative to `‖A‖_F` (default `n ε`).
    pub rank_tol: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: crate::scalar::DEFAULT_MAX_ITER,
            seed: 0,
            rank_tol: None,
        }
    }
}

/// Counters collected during a solve.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Factorizations done on the reversal (`|λ| > 1`).
    pub reversal_steps: usize,
    pub forward_steps: usize,
    /// Non-finite intermediates met (each one triggers a perturbation).
    pub nonfinite_events: usize,
    pub total_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    /// Zero eigenvalues first, then infinite ones, then finite ones.
    pub results: Vec<EigenResult>,
    pub stats: SolveStats,
}

/// Laguerre state for the eigenvalue currently being refined.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub lambda: C64,
    pub iter: usize,
    /// Converged finite eigenvalues so far.
    pub deflation_set: Vec<C64>,
    /// Zero eigenvalues deflated from the start.
    pub n_zero_deflated: usize,
    /// Number of finite eigenvalues, `nd - N_2`.
    pub n1: usize,
}

impl IterationState {
    /// Roots still unaccounted for; the `N` of the Laguerre iterate.
    pub fn remaining(&self) -> usize {
        self.n1
            .saturating_sub(self.n_zero_deflated + self.deflation_set.len())
            .max(1)
    }
}

/// Undeflated sums from an engine.
pub(crate) enum Sums {
    Ok(C64, C64),
    /// The determinant vanished exactly at the factored point.
    Singular,
    NonFinite,
}

/// One Laguerre engine: factor, test, correct, extract vectors.
pub(crate) trait Engine {
    type Factors;

    /// Factor `P(z)` (or `rP(z)` when `rev`).
    fn factor(&mut self, z: C64, rev: bool) -> Result<Self::Factors, PolyError>;
    /// Smallest pivot magnitude, compared against `τ`.
    fn min_pivot(&self, f: &Self::Factors) -> f64;
    /// Whether the three-vector backward error bound falls below `ε`.
    fn criterion2(&self, f: &Self::Factors, alpha: f64) -> bool;
    /// `(S1, S2)` in `λ` coordinates.
    fn sums(&self, f: &Self::Factors, z: C64, rev: bool) -> Sums;
    /// Right and left eigenvectors at the factored point.
    fn vectors(&self, f: &Self::Factors, status: StopStatus) -> (Vec<C64>, Vec<C64>);
}

/// Fixed probe vectors for criterion 2: all ones and a seeded random vector.
pub(crate) fn probe_vectors(n: usize, seed: u64) -> [Vec<C64>; 2] {
    let mut ones = vec![C64::new(1.0, 0.0); n];
    normalize(&mut ones);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut r: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut r);
    [ones, r]
}

fn unit_random(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
}

fn basis_results(
    p: &MatrixPolynomial,
    w: &Weights,
    ev: Eigenvalue,
    (right, left): &(CMatrix, CMatrix),
) -> Vec<EigenResult> {
    (0..right.cols())
        .map(|j| EigenResult::new(p, w, ev, right.column(j), left.column(j), StopStatus::Criterion1, 0))
        .collect()
}

/// Iterates remembered for the cycle form of criterion 3.
pub(crate) const CYCLE_WINDOW: usize = 8;

/// Recent iterates, most recent last, capped at [`CYCLE_WINDOW`].
#[derive(Debug, Clone, Default)]
pub(crate) struct History(Vec<C64>);

impl History {
    pub(crate) fn push(&mut self, z: C64) {
        if self.0.len() == CYCLE_WINDOW {
            self.0.remove(0);
        }
        self.0.push(z);
    }
}

/// Criterion 3: `|λ̂ - λ| < ε|λ|`, or `λ̂` back within `ε|λ|` of one of the
/// recent iterates. With `ε = 2^-53` the first test only holds at an exact
/// fixed point; the second catches the ulp-level cycles rounding can produce.
pub(crate) fn stagnant(next: C64, lambda: C64, recent: &History) -> bool {
    let tol = EPS * lambda.norm();
    (next - lambda).norm() < tol || recent.0.iter().any(|b| (next - b).norm() < tol)
}

/// Run the driver over all finite estimates.
pub(crate) fn run<E: Engine>(
    p: &MatrixPolynomial,
    est: EstimateSet,
    engine: &mut E,
    opts: &SolveOptions,
) -> Result<SolveOutcome, PolyError> {
    let w = p.coefficient_weights();
    let nd = p.n() * p.degree();
    let mut stats = SolveStats::default();
    let mut results = Vec::with_capacity(nd);
    results.extend(basis_results(p, &w, Eigenvalue::Zero, &est.zero_vectors));
    results.extend(basis_results(p, &w, Eigenvalue::Infinite, &est.infinite_vectors));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut st = IterationState {
        lambda: C64::new(0.0, 0.0),
        iter: 0,
        deflation_set: Vec::with_capacity(est.finite_estimates.len()),
        n_zero_deflated: est.zero_multiplicity,
        n1: nd - est.infinite_multiplicity,
    };

    for &start in &est.finite_estimates {
        st.lambda = start;
        st.iter = 0;
        let mut recent = History::default();
        let (status, f) = loop {
            let rev = st.lambda.norm() > 1.0;
            let z = if rev { st.lambda.inv() } else { st.lambda };
            let f = engine.factor(z, rev)?;
            if rev {
                stats.reversal_steps += 1;
            } else {
                stats.forward_steps += 1;
            }
            let alpha = w.alpha_at(z, rev);
            if engine.min_pivot(&f) < alpha * EPS {
                break (StopStatus::Criterion1, f);
            }
            if engine.criterion2(&f, alpha) {
                break (StopStatus::Criterion2, f);
            }
            if st.iter >= opts.max_iter {
                break (StopStatus::MaxIter, f);
            }
            st.iter += 1;
            let (s1, s2) = match engine.sums(&f, z, rev) {
                Sums::Ok(a, b) => (a, b),
                Sums::Singular => break (StopStatus::Criterion1, f),
                Sums::NonFinite => {
                    stats.nonfinite_events += 1;
                    st.lambda = perturb(st.lambda, &mut rng);
                    continue;
                }
            };
            let (s1, s2) = deflate(st.lambda, s1, s2, &st.deflation_set, st.n_zero_deflated);
            let big_n = st.remaining();
            let den = laguerre_denominator(s1, s2, big_n);
            let usable = s1.is_finite() && s2.is_finite() && den.is_finite() && den.norm() > EPS * s1.norm();
            if !usable {
                st.lambda = perturb(st.lambda, &mut rng);
                continue;
            }
            let next = st.lambda - big_n as f64 / den;
            if !next.is_finite() {
                stats.nonfinite_events += 1;
                st.lambda = perturb(st.lambda, &mut rng);
                continue;
            }
            if stagnant(next, st.lambda, &recent) {
                break (StopStatus::Criterion3, f);
            }
            recent.push(st.lambda);
            st.lambda = next;
        };
        let (x, y) = engine.vectors(&f, status);
        stats.total_iterations += st.iter;
        results.push(EigenResult::new(p, &w, Eigenvalue::Finite(st.lambda), x, y, status, st.iter));
        st.deflation_set.push(st.lambda);
    }
    Ok(SolveOutcome { results, stats })
}

/// Nudge a stuck iterate by a relative `10^-3` in a random direction.
fn perturb(lambda: C64, rng: &mut ChaCha8Rng) -> C64 {
    let u = unit_random(rng);
    if lambda == C64::new(0.0, 0.0) {
        u * 1e-3
    } else {
        lambda * (1.0 + 1e-3 * u)
    }
}

/// `n = 1` problems go straight to the scalar root finder.
pub(crate) fn solve_scalar_problem(p: &MatrixPolynomial, opts: &SolveOptions) -> Result<SolveOutcome, PolyError> {
    let coeffs: Vec<C64> = p.coeffs().iter().map(|a| a[(0, 0)]).collect();
    let w = ScalarPolynomial::new(&coeffs)?;
    let sol = solve_scalar(&w, opts.max_iter)?;
    let k0 = w.zero_multiplicity();
    let weights = p.coefficient_weights();
    let one = vec![C64::new(1.0, 0.0)];
    let results = sol
        .roots
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let ev = if i < k0 { Eigenvalue::Zero } else { Eigenvalue::Finite(r) };
            EigenResult::new(p, &weights, ev, one.clone(), one.clone(), sol.status[i], sol.iterations[i])
        })
        .collect();
    let stats = SolveStats {
        reversal_steps: sol.reversal_steps,
        forward_steps: sol.iterations.iter().sum::<usize>() - sol.reversal_steps,
        nonfinite_events: sol.nonfinite_events,
        total_iterations: sol.iterations.iter().sum(),
    };
    Ok(SolveOutcome { results, stats })
}
