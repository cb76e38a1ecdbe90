//! Pellet bounds on eigenvalue moduli.
//!
//! With `c_k = σ_min(A_k)` and `w_i = ‖A_i‖_F`, no eigenvalue has modulus
//! above the positive root of `c_d μ^d = Σ_{i<d} w_i μ^i`, and none below the
//! positive root of `c_0 = Σ_{i>0} w_i μ^i`.

use crate::error::PolyError;
use crate::matrix::{normalize, CMatrix};
use crate::poly::MatrixPolynomial;
use crate::qr::{back_substitute, forward_substitute_adjoint, qr_col_pivot};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PelletBounds {
    pub lower: f64,
    pub upper: f64,
}

impl PelletBounds {
    /// Bounds for `p` using `σ_min` of the end coefficients.
    pub fn for_polynomial(p: &MatrixPolynomial) -> Result<Self, PolyError> {
        let w = p.coefficient_weights();
        let s0 = sigma_min(p.coeff(0));
        let sd = sigma_min(p.coeff(p.degree()));
        pellet_bounds(w.norms(), s0, sd)
    }

    pub fn contains(&self, modulus: f64, rel: f64) -> bool {
        modulus >= self.lower * (1.0 - rel) && modulus <= self.upper * (1.0 + rel)
    }
}

/// Solve both outer Pellet equations.
///
/// `weights[i]` bounds `‖A_i‖`; `sigma0` and `sigmad` are `‖A_0^{-1}‖^{-1}` and
/// `‖A_d^{-1}‖^{-1}` (zero when singular).
pub fn pellet_bounds(weights: &[f64], sigma0: f64, sigmad: f64) -> Result<PelletBounds, PolyError> {
    if weights.len() < 2 {
        return Err(PolyError::DegreeTooSmall);
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || !(sigma0 >= 0.0 && sigmad >= 0.0) {
        return Err(PolyError::InvalidArgument("weights must be finite and nonnegative".into()));
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(PolyError::InvalidArgument("all weights are zero".into()));
    }
    let d = weights.len() - 1;

    let upper = if sigmad == 0.0 {
        f64::INFINITY
    } else if weights[..d].iter().all(|&w| w == 0.0) {
        0.0
    } else {
        // Σ_{i<d} w_i μ^(i-d) decreases in μ
        let terms: Vec<(f64, f64)> = (0..d).map(|i| (weights[i], i as f64 - d as f64)).collect();
        solve_log_equation(&terms, sigmad.ln(), false)
    };

    let lower = if sigma0 == 0.0 {
        0.0
    } else {
        let terms: Vec<(f64, f64)> = (1..=d).map(|i| (weights[i], i as f64)).collect();
        if terms.iter().all(|t| t.0 == 0.0) {
            f64::INFINITY
        } else {
            solve_log_equation(&terms, sigma0.ln(), true)
        }
    };
    let lower = lower.min(upper);
    Ok(PelletBounds { lower, upper })
}

/// Find `μ` with `ln Σ w_j μ^{e_j} = target` where the sum is monotone in `μ`
/// (increasing when `increasing`). Works on `t = ln μ` by bisection.
fn solve_log_equation(terms: &[(f64, f64)], target: f64, increasing: bool) -> f64 {
    let lse = |t: f64| -> f64 {
        let logs: Vec<f64> = terms
            .iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(w, e)| w.ln() + e * t)
            .collect();
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
    };
    // g(t) > 0 means t is past the root
    let g = |t: f64| {
        let v = lse(t) - target;
        if increasing {
            v
        } else {
            -v
        }
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g(lo) > 0.0 && lo > -5000.0 {
        lo *= 2.0;
    }
    while g(hi) < 0.0 && hi < 5000.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    // report the side that keeps the bound valid
    if increasing {
        lo.exp()
    } else {
        hi.exp()
    }
}

/// Smallest singular value by inverse iteration on `A^*A` through a pivoted QR.
pub fn sigma_min(a: &CMatrix) -> f64 {
    let n = a.rows();
    if n == 0 || a.is_zero() {
        return 0.0;
    }
    let f = qr_col_pivot(a);
    let r = f.r();
    if (0..n).any(|k| r[(k, k)].norm() == 0.0) {
        return 0.0;
    }
    let mut x: Vec<C64> = (0..n).map(|k| C64::new(1.0, 0.37 * k as f64)).collect();
    normalize(&mut x);
    let mut est = f64::INFINITY;
    let mut stable = 0;
    for _ in 0..500 {
        // (R^*R)^{-1} x in permuted coordinates
        let mut z = f.permute_back(&x);
        let s1 = forward_substitute_adjoint(r, &mut z, 0.0);
        let s2 = back_substitute(r, &mut z, 0.0);
        let nz = crate::matrix::norm2(&z);
        if nz == 0.0 || !nz.is_finite() {
            return 0.0;
        }
        let next = (s1 * s2 / nz).sqrt();
        x = f.permute(&z);
        normalize(&mut x);
        if (next - est).abs() <= 1e-15 * next {
            stable += 1;
            if stable >= 3 {
                est = next;
                break;
            }
        } else {
            stable = 0;
        }
        est = next;
    }
    // ‖A x‖ for the final unit vector is also an upper estimate; keep the smaller
    est.min(crate::matrix::norm2(&a.matvec(&x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_scalar() {
        let b = pellet_bounds(&[2.0, 1.0], 2.0, 1.0).unwrap();
        assert!((b.upper - 2.0).abs() < 1e-12 * 3.0);
        assert!((b.lower - 2.0).abs() < 1e-12 * 3.0);
    }

    #[test]
    fn difference_of_squares() {
        let b = pellet_bounds(&[1.0, 0.0, 1.0], 1.0, 1.0).unwrap();
        assert!((b.upper - 1.0).abs() < 1e-12);
        assert!((b.lower - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_ends() {
        let b = pellet_bounds(&[1.0, 1.0, 1.0], 0.0, 0.0).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.upper, f64::INFINITY);
        assert!(pellet_bounds(&[0.0, 0.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn extreme_weight_ratios() {
        for &ratio in &[1e-15, 1e-8, 1.0, 1e8, 1e15] {
            let b = pellet_bounds(&[ratio, 1.0, 1.0], ratio, 1.0).unwrap();
            // upper: μ² = μ + ratio
            let exact = 0.5 * (1.0 + (1.0 + 4.0 * ratio).sqrt());
            assert!((b.upper - exact).abs() <= 1e-12 * (1.0 + exact), "{ratio}");
            assert!(b.lower <= b.upper);
        }
    }

    #[test]
    fn sigma_min_of_diagonal() {
        let a = CMatrix::from_diag(&[C64::new(3.0, 0.0), C64::new(0.0, 0.25), C64::new(1.0, 0.0)]);
        assert!((sigma_min(&a) - 0.25).abs() < 1e-14);
        assert_eq!(sigma_min(&CMatrix::zeros(2, 2)), 0.0);
    }
}
