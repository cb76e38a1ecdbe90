//! The Laguerre update shared by every engine.
//!
//! Engines supply `S1 = p'/p` and `S2 = -(p'/p)'` for `p = det P`; this module
//! removes already-found roots from those sums and forms the next iterate.

use crate::C64;

/// Map sums computed on the reversal back to `λ = 1/ρ`.
///
/// `g = r'/r` and `h = -(r'/r)' = (r'/r)² - r''/r` for `r(ρ) = det rP(ρ)`;
/// `total_degree` is `nd` (all eigenvalues, infinite ones included).
pub fn map_reversal_sums(g: C64, h: C64, rho: C64, total_degree: usize) -> (C64, C64) {
    let nd = total_degree as f64;
    let s1 = rho * (nd - rho * g);
    let s2 = rho * rho * (nd - 2.0 * rho * g + rho * rho * h);
    (s1, s2)
}

/// Subtract `Σ 1/(λ-r)` and `Σ 1/(λ-r)²` over found roots, with `zeros`
/// copies of the root at the origin.
pub fn deflate(lambda: C64, s1: C64, s2: C64, roots: &[C64], zeros: usize) -> (C64, C64) {
    let mut a = s1;
    let mut b = s2;
    for &r in roots {
        let t = (lambda - r).inv();
        a -= t;
        b -= t * t;
    }
    if zeros > 0 {
        let t = lambda.inv();
        let z = zeros as f64;
        a -= t * z;
        b -= t * t * z;
    }
    (a, b)
}

/// Laguerre denominator `S1 ± sqrt((N-1)(N S2 - S1²))` with the sign that
/// maximizes its modulus.
pub fn laguerre_denominator(s1: C64, s2: C64, remaining: usize) -> C64 {
    let nf = remaining.max(1) as f64;
    let disc = ((nf - 1.0) * (nf * s2 - s1 * s1)).sqrt();
    let plus = s1 + disc;
    let minus = s1 - disc;
    if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    }
}

/// Next Laguerre iterate, or `None` when the denominator vanishes or is not finite.
pub fn laguerre_iterate(lambda: C64, s1: C64, s2: C64, remaining: usize) -> Option<C64> {
    let den = laguerre_denominator(s1, s2, remaining);
    if den.norm() == 0.0 || !den.is_finite() {
        return None;
    }
    let next = lambda - (remaining.max(1) as f64) / den;
    next.is_finite().then_some(next)
}
