//! Backward errors and condition numbers of computed eigenpairs.

use crate::driver::Eigenvalue;
use crate::matrix::{dot, norm2};
use crate::poly::{MatrixPolynomial, Weights};
use crate::{C64, EPS};

/// A condition number together with a flag saying whether its denominator was
/// resolvable in floating point. Multiple eigenvalues come out unreliable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub value: f64,
    pub reliable: bool,
}

/// Left and right backward errors plus the condition number of one eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub eta_right: f64,
    pub eta_left: f64,
    pub kappa: Condition,
}

/// Where to evaluate for a given eigenvalue: `(z, at_reversal)`.
fn eval_point(ev: Eigenvalue) -> (C64, bool) {
    match ev {
        Eigenvalue::Zero => (C64::new(0.0, 0.0), false),
        Eigenvalue::Infinite => (C64::new(0.0, 0.0), true),
        Eigenvalue::Finite(l) if l.norm() <= 1.0 => (l, false),
        Eigenvalue::Finite(l) => (l.inv(), true),
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `(‖P(λ)x‖/(α‖x‖), ‖y^*P(λ)‖/(α‖y‖))`, on the reversal when `|λ| > 1`.
pub fn backward_error(
    p: &MatrixPolynomial,
    ev: Eigenvalue,
    x: &[C64],
    y: &[C64],
    weights: &Weights,
) -> (f64, f64) {
    let (z, rev) = eval_point(ev);
    let alpha = weights.alpha_at(z, rev);
    let right = ratio(norm2(&p.apply(z, x, rev)), alpha * norm2(x));
    let left = ratio(norm2(&p.apply_adjoint(z, y, rev)), alpha * norm2(y));
    (right, left)
}

/// Normwise condition number of an eigenvalue.
///
/// Finite nonzero `λ` uses `α‖x‖‖y‖ / (|λ| |y^*P'(λ)x|)`, or
/// `rα‖x‖‖y‖ / |y^*(d rP(ρ) - ρ rP'(ρ))x|` for `|λ| > 1`. Zero and infinite
/// eigenvalues report `‖x‖‖y‖/|y^*x|`.
pub fn condition_number(
    p: &MatrixPolynomial,
    ev: Eigenvalue,
    x: &[C64],
    y: &[C64],
    weights: &Weights,
) -> Condition {
    let xy = norm2(x) * norm2(y);
    let (num, den) = match ev {
        Eigenvalue::Zero | Eigenvalue::Infinite => (xy, dot(y, x).norm()),
        Eigenvalue::Finite(l) if l.norm() <= 1.0 => {
            let (_, dx) = p.apply_with_derivative(l, x, false);
            (weights.alpha(l) * xy, l.norm() * dot(y, &dx).norm())
        }
        Eigenvalue::Finite(l) => {
            let rho = l.inv();
            let (vx, dx) = p.apply_with_derivative(rho, x, true);
            let d = p.degree() as f64;
            let comb: Vec<C64> = vx.iter().zip(&dx).map(|(v, w)| v * d - rho * w).collect();
            (weights.alpha_rev(rho) * xy, dot(y, &comb).norm())
        }
    };
    let reliable = den.is_finite() && den >= EPS * num && den > 0.0;
    let value = if reliable { num / den } else { 1.0 / EPS };
    Condition { value, reliable }
}

/// Both backward errors and the condition number.
pub fn error_report(
    p: &MatrixPolynomial,
    ev: Eigenvalue,
    x: &[C64],
    y: &[C64],
    weights: &Weights,
) -> ErrorReport {
    let (eta_right, eta_left) = backward_error(p, ev, x, y, weights);
    ErrorReport {
        eta_right,
        eta_left,
        kappa: condition_number(p, ev, x, y, weights),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{unit_vector, CMatrix};
    use crate::poly::Structure;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn shifted_diag() -> MatrixPolynomial {
        let a0 = CMatrix::from_diag(&[c(-1.0), c(-2.0)]);
        MatrixPolynomial::new(vec![a0, CMatrix::identity(2)], Structure::General).unwrap()
    }

    #[test]
    fn exact_pair_has_zero_error() {
        let p = shifted_diag();
        let w = p.coefficient_weights();
        let e = unit_vector(2, 1);
        let (r, l) = backward_error(&p, Eigenvalue::Finite(c(2.0)), &e, &e, &w);
        assert_eq!((r, l), (0.0, 0.0));
    }

    #[test]
    fn kappa_uses_frobenius_weights() {
        let p = shifted_diag();
        let w = p.coefficient_weights();
        let e = unit_vector(2, 0);
        let k = condition_number(&p, Eigenvalue::Finite(c(1.0)), &e, &e, &w);
        assert!(k.reliable);
        let expected = 2f64.sqrt() + 5f64.sqrt();
        assert!((k.value - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn zero_eigenvalue_with_equal_vectors() {
        let p = shifted_diag();
        let w = p.coefficient_weights();
        let x = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let k = condition_number(&p, Eigenvalue::Zero, &x, &x, &w);
        assert!((k.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_vectors_flag_unreliable() {
        let p = shifted_diag();
        let w = p.coefficient_weights();
        let k = condition_number(&p, Eigenvalue::Infinite, &unit_vector(2, 0), &unit_vector(2, 1), &w);
        assert!(!k.reliable);
        assert!(k.value.is_finite());
    }
}
