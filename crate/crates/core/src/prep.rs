//! Detection of zero and infinite eigenvalues and starting points for the
//! finite ones.

use crate::bounds::PelletBounds;
use crate::error::PolyError;
use crate::matrix::{normalize, CMatrix};
use crate::poly::{MatrixPolynomial, Structure};
use crate::qr::{back_substitute, qr_col_pivot, Givens};
use crate::scalar::{solve_scalar, ScalarPolynomial, DEFAULT_MAX_ITER, ESTIMATE_PHASE};
use crate::{C64, EPS};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Numerical rank of a matrix with bases for its right and left null spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReveal {
    pub rank: usize,
    /// `n x (n - rank)`, unit-norm columns with `A x ≈ 0`.
    pub right_null: CMatrix,
    /// `n x (n - rank)`, unit-norm columns with `y^* A ≈ 0`.
    pub left_null: CMatrix,
    /// Unitary factor of the factorization.
    pub q_columns: CMatrix,
}

impl RankReveal {
    pub fn nullity(&self) -> usize {
        self.right_null.cols()
    }
}

/// Default absolute rank tolerance `n ε ‖A‖_F`.
pub fn default_rank_tol(a: &CMatrix) -> f64 {
    a.rows() as f64 * EPS * a.frobenius_norm()
}

/// Rank and null bases from a Householder QR with column pivoting.
///
/// `rank` counts the leading `|r_jj| > tol`. Right null vectors solve
/// `R_11 x_1 = -R_12 e_j` with unit padding in the trailing block; left null
/// vectors are the trailing columns of `Q`.
pub fn rank_reveal(a: &CMatrix, tol: f64) -> RankReveal {
    let n = a.rows();
    let f = qr_col_pivot(a);
    let r = f.r();
    let rank = (0..n).take_while(|&k| r[(k, k)].norm() > tol).count();
    let k2 = n - rank;
    let q = f.q();
    let mut right = CMatrix::zeros(n, k2);
    let mut left = CMatrix::zeros(n, k2);
    for j in 0..k2 {
        let mut lead: Vec<C64> = (0..rank).map(|i| -r[(i, rank + j)]).collect();
        let s = back_substitute(r, &mut lead, 0.0);
        let mut xh = vec![ZERO; n];
        xh[..rank].copy_from_slice(&lead);
        xh[rank + j] = C64::new(s, 0.0);
        let mut x = f.permute(&xh);
        normalize(&mut x);
        right.set_column(j, &x);
        left.set_column(j, &q.column(rank + j));
    }
    RankReveal {
        rank,
        right_null: right,
        left_null: left,
        q_columns: q,
    }
}

/// Rank reveal for a tridiagonal matrix by plane rotations without pivoting.
///
/// After the Givens QR, `R` is brought to row echelon form one row at a time:
/// entries below the current row in the candidate pivot column are rotated
/// into it, and a column whose collected entry stays at or below `tol` is a
/// non-pivot column. Null vectors follow from the non-pivot columns.
pub fn tridiagonal_pivot_scan(a: &CMatrix, tol: f64) -> RankReveal {
    let n = a.rows();
    let mut r = a.clone();
    let mut q = CMatrix::identity(n);

    let rotate = |r: &mut CMatrix, q: &mut CMatrix, top: usize, col: usize| {
        let (g, val) = Givens::new(r[(top, col)], r[(top + 1, col)]);
        r[(top, col)] = val;
        r[(top + 1, col)] = ZERO;
        for j in col + 1..n {
            let (mut x, mut y) = (r[(top, j)], r[(top + 1, j)]);
            g.apply(&mut x, &mut y);
            r[(top, j)] = x;
            r[(top + 1, j)] = y;
        }
        for i in 0..n {
            let (mut x, mut y) = (q[(i, top)], q[(i, top + 1)]);
            g.apply_adjoint_right(&mut x, &mut y);
            q[(i, top)] = x;
            q[(i, top + 1)] = y;
        }
    };

    for k in 0..n.saturating_sub(1) {
        if r[(k + 1, k)] != ZERO {
            rotate(&mut r, &mut q, k, k);
        }
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut nonpivot: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row >= n {
            nonpivot.push(col);
            continue;
        }
        for t in (row + 1..=col.min(n - 1)).rev() {
            if r[(t, col)] != ZERO {
                rotate(&mut r, &mut q, t - 1, col);
            }
        }
        if r[(row, col)].norm() > tol {
            pivots.push((row, col));
            row += 1;
        } else {
            nonpivot.push(col);
        }
    }

    let rank = pivots.len();
    let k2 = n - rank;
    let mut right = CMatrix::zeros(n, k2);
    let mut left = CMatrix::zeros(n, k2);
    for (j, &c) in nonpivot.iter().enumerate() {
        let mut x = vec![ZERO; n];
        x[c] = C64::new(1.0, 0.0);
        for &(i, p) in pivots.iter().rev() {
            if p > c {
                continue;
            }
            let mut acc = ZERO;
            for k in p + 1..n {
                acc += r[(i, k)] * x[k];
            }
            x[p] = -acc / r[(i, p)];
        }
        normalize(&mut x);
        right.set_column(j, &x);
        left.set_column(j, &q.column(rank + j));
    }
    RankReveal {
        rank,
        right_null: right,
        left_null: left,
        q_columns: q,
    }
}

/// Zero/infinite multiplicities with eigenvector bases, and starting points
/// for the finite eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSet {
    pub zero_multiplicity: usize,
    pub infinite_multiplicity: usize,
    /// Right/left eigenvectors of the zero eigenvalue (bases of `A_0`).
    pub zero_vectors: (CMatrix, CMatrix),
    /// Right/left eigenvectors of the infinite eigenvalue (bases of `A_d`).
    pub infinite_vectors: (CMatrix, CMatrix),
    pub finite_estimates: Vec<C64>,
}

fn reveal(p: &MatrixPolynomial, a: &CMatrix, rel_tol: Option<f64>) -> RankReveal {
    let tol = match rel_tol {
        Some(t) => t * a.frobenius_norm(),
        None => default_rank_tol(a),
    };
    if p.structure() == Structure::Tridiagonal {
        tridiagonal_pivot_scan(a, tol)
    } else {
        rank_reveal(a, tol)
    }
}

/// Coefficients of `q^* P(λ) q` with negligible leading terms trimmed, or
/// `None` when every coefficient is negligible.
fn form_coeffs(p: &MatrixPolynomial, q: &[C64], norms: &[f64]) -> Option<Vec<C64>> {
    let n = p.n() as f64;
    let mut c = p.quadratic_form_coeffs(q);
    while let Some(last) = c.last() {
        let i = c.len() - 1;
        if last.norm() <= n * EPS * norms[i] {
            c.pop();
        } else {
            break;
        }
    }
    (!c.is_empty()).then_some(c)
}

/// Prepare a problem: detect zero and infinite eigenvalues, then seed the
/// finite ones with roots of the quadratic forms `q_j^* P(λ) q_j`.
///
/// `rel_tol` scales `‖A‖_F` to give the rank tolerance (default `n ε`).
pub fn initial_estimates(p: &MatrixPolynomial, rel_tol: Option<f64>) -> Result<EstimateSet, PolyError> {
    let n = p.n();
    let d = p.degree();
    let a0 = p.coeff(0);
    let ad = p.coeff(d);
    let rr0 = reveal(p, a0, rel_tol);
    let rrd = reveal(p, ad, rel_tol);
    let n0 = rr0.nullity();
    let n2 = rrd.nullity();
    let norms = p.coefficient_weights().norms().to_vec();
    let ad_norm = norms[d];

    let mut estimates = Vec::new();
    let mut any_form = false;
    for j in 0..n {
        let mut qj = rrd.q_columns.column(j);
        if p.quadratic_form_coeffs(&qj)[d].norm() < EPS * ad_norm {
            qj = rr0.q_columns.column(j);
        }
        let Some(c) = form_coeffs(p, &qj, &norms) else {
            continue;
        };
        any_form = true;
        if c.len() < 2 {
            continue;
        }
        let w = ScalarPolynomial::new(&c)?;
        estimates.extend(solve_scalar(&w, DEFAULT_MAX_ITER)?.roots);
    }
    if !any_form {
        return Err(PolyError::PossiblyNonRegular);
    }

    let target = (n * d).checked_sub(n0 + n2).ok_or(PolyError::PossiblyNonRegular)?;
    reconcile(&mut estimates, target, n0, || {
        PelletBounds::for_polynomial(p).map(|b| b.upper).unwrap_or(f64::INFINITY)
    });
    if n0 > 0 {
        for e in estimates.iter_mut().filter(|e| **e == ZERO) {
            *e = C64::from_polar(1e-3, ESTIMATE_PHASE);
        }
    }
    Ok(EstimateSet {
        zero_multiplicity: n0,
        infinite_multiplicity: n2,
        zero_vectors: (rr0.right_null, rr0.left_null),
        infinite_vectors: (rrd.right_null, rrd.left_null),
        finite_estimates: estimates,
    })
}

/// Bring the estimate count to `target`.
///
/// A surplus first drops up to `n_zero` smallest-modulus estimates (forms pick
/// up the detected zero eigenvalues) and then the largest-modulus ones (forms
/// pick up the detected infinite ones through a degree drop in the other
/// direction). A shortfall is filled on a circle of radius `upper()`.
fn reconcile(estimates: &mut Vec<C64>, target: usize, n_zero: usize, upper: impl FnOnce() -> f64) {
    if estimates.len() > target {
        estimates.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        let surplus = estimates.len() - target;
        let front = surplus.min(n_zero);
        estimates.drain(..front);
        let keep = estimates.len() - (surplus - front);
        estimates.truncate(keep);
    } else if estimates.len() < target {
        let missing = target - estimates.len();
        let mut radius = upper();
        if !radius.is_finite() || radius <= 0.0 {
            radius = estimates.iter().map(|e| e.norm()).fold(0.0, f64::max);
        }
        if !radius.is_finite() || radius <= 0.0 {
            radius = 1.0;
        }
        for k in 0..missing {
            let theta = std::f64::consts::TAU * k as f64 / missing as f64 + ESTIMATE_PHASE;
            estimates.push(C64::from_polar(radius, theta));
        }
    }
}
