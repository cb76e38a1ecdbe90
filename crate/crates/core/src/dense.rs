//! General (dense) Laguerre engine.
//!
//! Every iterate factors `P(λ)` (or `rP(1/λ)` when `|λ| > 1`) by a pivoted QR.
//! The factorization drives the stopping tests, the trace-formula correction
//! and the eigenvector recovery.

use crate::driver::{probe_vectors, run, Engine, SolveOptions, SolveOutcome, StopStatus, Sums};
use crate::error::PolyError;
use crate::laguerre::map_reversal_sums;
use crate::matrix::{dot, norm2, normalize, CMatrix};
use crate::poly::{pow2_inverse, EvalTriple, MatrixPolynomial, Weights};
use crate::prep::initial_estimates;
pub use crate::qr::{qr_col_pivot, QrpFactors};
use crate::qr::{back_substitute, forward_substitute_adjoint};
use crate::{C64, EPS};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Alignment `|<x_k, x_{k+1}>|` at which inverse iteration stops.
const ALIGNMENT: f64 = 1.0 - 1e-12;
const INVERSE_ITERATION_CAP: usize = 20;

/// Undeflated `(s1, s2)` at `λ` from the factors of `P(λ)` or `rP(1/λ)`.
///
/// Solves `M X_1 = M'` and `M X_2 = M''` through the factors, then forms
/// `tr X_1` and `tr(X_1² - X_2)` using only the diagonal of `X_1²`. On the
/// reversal the traces are mapped back to `λ`. Returns `None` when `R` has an
/// exactly zero pivot or the solves overflow.
pub fn laguerre_correction_dense(
    triple: &EvalTriple,
    f: &QrpFactors,
    z: C64,
    total_degree: usize,
) -> Option<(C64, C64)> {
    let n = f.n();
    let r = f.r();
    if (0..n).any(|k| r[(k, k)] == ZERO) {
        return None;
    }
    let x1 = solve_matrix(f, &triple.deriv1);
    let x2 = solve_matrix(f, &triple.deriv2);
    let mut t1 = ZERO;
    let mut t2 = ZERO;
    for i in 0..n {
        t1 += x1[(i, i)];
        let sq: C64 = (0..n).map(|k| x1[(i, k)] * x1[(k, i)]).sum();
        t2 += sq - x2[(i, i)];
    }
    if !(t1.is_finite() && t2.is_finite()) {
        return None;
    }
    Some(if triple.at_reversal {
        map_reversal_sums(t1, t2, z, total_degree)
    } else {
        (t1, t2)
    })
}

/// `M^{-1} B` through the factors: `E R^{-1} Q^* B`.
fn solve_matrix(f: &QrpFactors, b: &CMatrix) -> CMatrix {
    let n = f.n();
    let r = f.r();
    let mut y = b.clone();
    f.apply_qh_matrix(&mut y);
    for k in (0..n).rev() {
        for m in k + 1..n {
            let rkm = r[(k, m)];
            if rkm == ZERO {
                continue;
            }
            let (head, tail) = y.as_mut_slice().split_at_mut(m * n);
            let row_k = &mut head[k * n..(k + 1) * n];
            for (a, b) in row_k.iter_mut().zip(&tail[..n]) {
                *a -= rkm * b;
            }
        }
        let inv = r[(k, k)].inv();
        y.row_mut(k).iter_mut().for_each(|v| *v *= inv);
    }
    let mut x = CMatrix::zeros(n, n);
    for (k, &p) in f.perm().iter().enumerate() {
        x.row_mut(p).copy_from_slice(y.row(k));
    }
    x
}

/// Which test, if any, ends the iteration at the factored point.
///
/// Criterion 3 needs the next iterate and is left to the driver.
pub fn check_stop(f: &QrpFactors, alpha: f64, probes: &[Vec<C64>]) -> Option<StopStatus> {
    if f.last_pivot() < alpha * EPS {
        return Some(StopStatus::Criterion1);
    }
    let qn = f.last_q_column();
    let bound = probes
        .iter()
        .chain(std::iter::once(&qn))
        .map(|b| {
            let (x, s) = f.solve_scaled(b);
            norm2(b) * s / (alpha * norm2(&x))
        })
        .fold(f64::INFINITY, f64::min);
    (bound < EPS).then_some(StopStatus::Criterion2)
}

/// `x = E x̂` with `R_11 x̂_1 = -R(1:n-1, n)`, `x̂_n = 1`, and `y = Q e_n`.
/// Returns `None` when the leading block is singular.
pub fn eigenvectors_from_factors(f: &QrpFactors) -> Option<(Vec<C64>, Vec<C64>)> {
    let n = f.n();
    let r = f.r();
    if (0..n.saturating_sub(1)).any(|k| r[(k, k)] == ZERO) {
        return None;
    }
    let mut lead: Vec<C64> = (0..n - 1).map(|i| -r[(i, n - 1)]).collect();
    let s = back_substitute(r, &mut lead, 0.0);
    lead.push(C64::new(s, 0.0));
    let mut x = f.permute(&lead);
    let mut y = f.last_q_column();
    if !crate::matrix::all_finite(&x) || normalize(&mut x) == 0.0 {
        return None;
    }
    normalize(&mut y);
    Some((x, y))
}

/// Right and left singular vectors for `σ_min` of the factored matrix by
/// inverse iteration on `E R^*R E^T` and `Q R R^* Q^*`.
///
/// Returns the vectors and whether both iterations met the alignment test.
pub fn singular_vectors(f: &QrpFactors) -> (Vec<C64>, Vec<C64>, bool) {
    let n = f.n();
    let r = f.r();
    let rmax = (0..n).map(|k| r[(k, k)].norm()).fold(0.0, f64::max);
    let floor = if rmax > 0.0 { EPS * rmax } else { f64::MIN_POSITIVE };
    let (mut x, mut y) = match eigenvectors_from_factors(f) {
        Some(v) => v,
        None => {
            let mut e = vec![ZERO; n];
            e[f.perm()[n - 1]] = C64::new(1.0, 0.0);
            (e, f.last_q_column())
        }
    };

    let mut ok_x = false;
    for _ in 0..INVERSE_ITERATION_CAP {
        let mut z = f.permute_back(&x);
        forward_substitute_adjoint(r, &mut z, floor);
        back_substitute(r, &mut z, floor);
        let mut next = f.permute(&z);
        normalize(&mut next);
        let align = dot(&x, &next).norm();
        x = next;
        if align >= ALIGNMENT {
            ok_x = true;
            break;
        }
    }

    let mut ok_y = false;
    for _ in 0..INVERSE_ITERATION_CAP {
        let mut u = y.clone();
        f.apply_qh(&mut u);
        back_substitute(r, &mut u, floor);
        forward_substitute_adjoint(r, &mut u, floor);
        f.apply_q(&mut u);
        normalize(&mut u);
        let align = dot(&y, &u).norm();
        y = u;
        if align >= ALIGNMENT {
            ok_y = true;
            break;
        }
    }
    (x, y, ok_x && ok_y)
}

/// Factors of `s·P(z)` (or `s·rP(z)`), `s` a power of two near `1/α`.
pub(crate) struct DenseFactors {
    triple: EvalTriple,
    qr: QrpFactors,
    scale: f64,
}

struct DenseEngine<'a> {
    p: &'a MatrixPolynomial,
    weights: Weights,
    probes: [Vec<C64>; 2],
}

impl Engine for DenseEngine<'_> {
    type Factors = DenseFactors;

    fn factor(&mut self, z: C64, rev: bool) -> Result<DenseFactors, PolyError> {
        let mut triple = if rev {
            self.p.eval_reversal(z)?
        } else {
            self.p.eval_with_derivatives(z)?
        };
        // keeps the factors and inverse iterates clear of under/overflow
        let scale = pow2_inverse(self.weights.alpha_at(z, rev));
        triple.scale(scale);
        let mut qr = qr_col_pivot(&triple.value);
        qr.at_reversal = rev;
        Ok(DenseFactors { triple, qr, scale })
    }

    fn min_pivot(&self, f: &DenseFactors) -> f64 {
        f.qr.last_pivot() / f.scale
    }

    fn criterion2(&self, f: &DenseFactors, alpha: f64) -> bool {
        let alpha = f64::max(alpha * f.scale, f64::MIN_POSITIVE);
        check_stop(&f.qr, alpha, &self.probes) == Some(StopStatus::Criterion2)
    }

    fn sums(&self, f: &DenseFactors, z: C64, _rev: bool) -> Sums {
        if f.qr.last_pivot() == 0.0 {
            return Sums::Singular;
        }
        let nd = self.p.n() * self.p.degree();
        match laguerre_correction_dense(&f.triple, &f.qr, z, nd) {
            Some((a, b)) => Sums::Ok(a, b),
            None => Sums::NonFinite,
        }
    }

    fn vectors(&self, f: &DenseFactors, status: StopStatus) -> (Vec<C64>, Vec<C64>) {
        if status == StopStatus::Criterion1 {
            if let Some(v) = eigenvectors_from_factors(&f.qr) {
                return v;
            }
        }
        let (x, y, _) = singular_vectors(&f.qr);
        (x, y)
    }
}

/// Solve a general matrix polynomial eigenproblem; returns `nd` results.
pub fn solve_dense(p: &MatrixPolynomial, opts: &SolveOptions) -> Result<SolveOutcome, PolyError> {
    let est = initial_estimates(p, opts.rank_tol)?;
    let mut engine = DenseEngine {
        p,
        weights: p.coefficient_weights(),
        probes: probe_vectors(p.n(), opts.seed),
    };
    run(p, est, &mut engine, opts)
}
