//! Post-solve verification that does not reuse the solver's own metrics.

use polyeig::{Eigenvalue, MatrixPolynomial, PelletBounds, SolveOutcome, StopStatus, C64, EPS};
use serde::Serialize;

/// Relative slack on the Pellet annulus.
pub const PELLET_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub count: usize,
    pub expected_count: usize,
    pub converged: usize,
    /// Largest recomputed backward error over criterion-1 results.
    pub max_residual: f64,
    pub residual_bound: f64,
    pub pellet_lower: f64,
    pub pellet_upper: Option<f64>,
    pub violations: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn mat_apply(p: &MatrixPolynomial, k: usize, x: &[C64]) -> Vec<C64> {
    let a = p.coeff(k);
    (0..p.n()).map(|i| a.row(i).iter().zip(x).map(|(u, v)| u * v).sum()).collect()
}

/// `‖P(λ)x‖ / (α ‖x‖)` from explicit powers, on the reversal when `|λ| > 1`.
pub fn residual(p: &MatrixPolynomial, ev: Eigenvalue, x: &[C64]) -> f64 {
    let d = p.degree();
    let norms: Vec<f64> = p.coeffs().iter().map(|a| a.frobenius_norm()).collect();
    let (z, rev) = match ev {
        Eigenvalue::Zero => (C64::new(0.0, 0.0), false),
        Eigenvalue::Infinite => (C64::new(0.0, 0.0), true),
        Eigenvalue::Finite(l) if l.norm() <= 1.0 => (l, false),
        Eigenvalue::Finite(l) => (l.inv(), true),
    };
    let mut acc = vec![C64::new(0.0, 0.0); p.n()];
    let mut alpha = 0.0;
    for k in 0..=d {
        let power = if rev { d - k } else { k };
        let zk = if power == 0 { C64::new(1.0, 0.0) } else { z.powu(power as u32) };
        let ax = mat_apply(p, k, x);
        for (s, v) in acc.iter_mut().zip(ax) {
            *s += zk * v;
        }
        alpha += zk.norm() * norms[k];
    }
    let num = norm(&acc);
    if num == 0.0 {
        0.0
    } else {
        num / (alpha * norm(x))
    }
}

/// Verify residuals of criterion-1 results against `10 (2n+1) ε`, finite
/// moduli against the Pellet bounds, and the total count against `nd`.
pub fn check_outcome(p: &MatrixPolynomial, out: &SolveOutcome) -> CheckReport {
    let n = p.n();
    let expected = n * p.degree();
    let bound = 10.0 * (2 * n + 1) as f64 * EPS;
    let mut violations = Vec::new();

    if out.results.len() != expected {
        violations.push(format!("{} results, expected nd = {expected}", out.results.len()));
    }

    let mut max_residual: f64 = 0.0;
    for (i, r) in out.results.iter().enumerate() {
        if r.status != StopStatus::Criterion1 {
            continue;
        }
        let eta = residual(p, r.eigenvalue, &r.x);
        max_residual = max_residual.max(eta);
        if !(eta <= bound) {
            violations.push(format!("result {i}: backward error {eta:.3e} exceeds {bound:.3e}"));
        }
    }

    let (lower, upper) = match PelletBounds::for_polynomial(p) {
        Ok(b) => {
            for (i, r) in out.results.iter().enumerate() {
                if let Eigenvalue::Finite(z) = r.eigenvalue {
                    if r.status.converged() && !b.contains(z.norm(), PELLET_SLACK) {
                        violations.push(format!(
                            "result {i}: |λ| = {:.6e} outside Pellet bounds [{:.6e}, {:.6e}]",
                            z.norm(),
                            b.lower,
                            b.upper
                        ));
                    }
                }
            }
            (b.lower, b.upper)
        }
        Err(e) => {
            violations.push(format!("Pellet bounds failed: {e}"));
            (0.0, f64::INFINITY)
        }
    };

    CheckReport {
        count: out.results.len(),
        expected_count: expected,
        converged: out.results.iter().filter(|r| r.status.converged()).count(),
        max_residual,
        residual_bound: bound,
        pellet_lower: lower,
        pellet_upper: upper.is_finite().then_some(upper),
        violations,
    }
}
