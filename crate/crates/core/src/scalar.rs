//! Laguerre root finder for scalar polynomials.
//!
//! Used on its own for `n = 1` problems and to solve the quadratic forms that
//! seed the matrix engines. Roots are found one at a time from Newton-polygon
//! starting points, each deflated implicitly against the ones already found.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::driver::{stagnant, History, StopStatus};
use crate::error::PolyError;
use crate::laguerre::{deflate, laguerre_iterate, map_reversal_sums};
use crate::{C64, EPS};

/// Phase offset of the starting points on each Newton-polygon circle.
pub const ESTIMATE_PHASE: f64 = 0.7;

/// Default iteration cap per root.
pub const DEFAULT_MAX_ITER: usize = 60;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `w(λ) = Σ a_i λ^i` with trailing zero coefficients trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPolynomial {
    coeffs: Vec<C64>,
}

impl ScalarPolynomial {
    /// Trims zero leading-order coefficients. The zero polynomial is rejected.
    pub fn new(coeffs: &[C64]) -> Result<Self, PolyError> {
        if coeffs.iter().any(|z| !z.is_finite()) {
            return Err(PolyError::NonFinite("polynomial coefficient"));
        }
        let len = coeffs
            .iter()
            .rposition(|&z| z != ZERO)
            .ok_or(PolyError::ConstantPolynomial)?
            + 1;
        Ok(Self {
            coeffs: coeffs[..len].to_vec(),
        })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self, PolyError> {
        Self::new(&coeffs.iter().map(|&a| C64::new(a, 0.0)).collect::<Vec<_>>())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut c = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Multiplicity of the root at zero (index of the first nonzero coefficient).
    pub fn zero_multiplicity(&self) -> usize {
        self.coeffs.iter().position(|&z| z != ZERO).unwrap_or(0)
    }

    /// `w`, `w'`, `w''` at `z`.
    pub fn eval(&self, z: C64) -> (C64, C64, C64) {
        horner3(self.coeffs.iter().rev(), z)
    }

    /// Reversal `Σ ρ^(d-i) a_i` and its two derivatives at `ρ`.
    pub fn eval_reversal(&self, rho: C64) -> (C64, C64, C64) {
        horner3(self.coeffs.iter(), rho)
    }

    /// `Σ |z|^i |a_i|`
    pub fn weight(&self, z: C64) -> f64 {
        let t = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * t + a.norm())
    }

    /// `Σ |ρ|^(d-i) |a_i|`
    pub fn weight_reversal(&self, rho: C64) -> f64 {
        let t = rho.norm();
        self.coeffs.iter().fold(0.0, |acc, a| acc * t + a.norm())
    }

    /// Scaled residual `|w(z)| / Σ|z|^i|a_i|`, evaluated on the reversal for
    /// `|z| > 1` so it never overflows. This is the backward error of a root.
    pub fn relative_residual(&self, z: C64) -> f64 {
        let (v, wt) = if z.norm() <= 1.0 {
            (self.eval(z).0, self.weight(z))
        } else {
            let rho = z.inv();
            (self.eval_reversal(rho).0, self.weight_reversal(rho))
        };
        if wt == 0.0 {
            0.0
        } else {
            v.norm() / wt
        }
    }

    /// Divided by the power of two nearest `max |a_i|`. Exact, so roots and
    /// relative residuals are unchanged, and for `|z| <= 1` the value and both
    /// derivatives stay below `(d+1)^3` in either orientation.
    pub fn normalized(&self) -> Self {
        let m = self.coeffs.iter().map(|a| a.re.abs().max(a.im.abs())).fold(0.0, f64::max);
        let e = m.log2().round() as i32;
        // two factors so neither over- nor underflows on its own
        let (s1, s2) = (2f64.powi(-e / 2), 2f64.powi(-(e - e / 2)));
        Self {
            coeffs: self.coeffs.iter().map(|a| a * s1 * s2).collect(),
        }
    }

    /// Drop the `k` lowest coefficients (divide by `λ^k`).
    fn shifted_down(&self, k: usize) -> Self {
        Self {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }
}

fn horner3<'a>(mut coeffs: impl Iterator<Item = &'a C64>, z: C64) -> (C64, C64, C64) {
    let mut p = *coeffs.next().expect("nonempty polynomial");
    let mut d1 = ZERO;
    let mut d2 = ZERO;
    for &a in coeffs {
        d2 = d2 * z + d1;
        d1 = d1 * z + p;
        p = p * z + a;
    }
    (p, d1, d2 * 2.0)
}

/// Upper convex hull of `{(i, log|a_i|)}` with the circle radii it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolygon {
    pub vertex_abscissas: Vec<usize>,
    pub radii: Vec<f64>,
}

impl NewtonPolygon {
    /// Starting points: `k_i - k_{i-1}` equispaced points on each circle.
    pub fn initial_estimates(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for (seg, &r) in self.vertex_abscissas.windows(2).zip(&self.radii) {
            let m = seg[1] - seg[0];
            for j in 0..m {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64 + ESTIMATE_PHASE;
                out.push(C64::from_polar(r, theta));
            }
        }
        out
    }
}

/// Newton polygon of `w`.
///
/// A polynomial with a single nonzero coefficient yields one vertex and no
/// radii; its roots are all at zero.
pub fn newton_polygon(w: &ScalarPolynomial) -> Result<NewtonPolygon, PolyError> {
    if w.degree() == 0 {
        return Err(PolyError::ConstantPolynomial);
    }
    let pts: Vec<(usize, f64)> = w
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != ZERO)
        .map(|(i, a)| (i, a.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while hull.len() >= 2 {
            let (x0, y0) = hull[hull.len() - 2];
            let (x1, y1) = hull[hull.len() - 1];
            let cross = (x1 as f64 - x0 as f64) * (p.1 - y0) - (y1 - y0) * (p.0 as f64 - x0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let radii = hull
        .windows(2)
        .map(|s| ((s[0].1 - s[1].1) / (s[1].0 - s[0].0) as f64).exp())
        .collect();
    Ok(NewtonPolygon {
        vertex_abscissas: hull.iter().map(|p| p.0).collect(),
        radii,
    })
}

/// Free-function form of [`NewtonPolygon::initial_estimates`].
pub fn initial_estimates_scalar(np: &NewtonPolygon) -> Vec<C64> {
    np.initial_estimates()
}

/// Why a Laguerre step could not be taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepError {
    /// The denominator vanished; the caller should perturb the iterate.
    ZeroDenominator,
    /// An intermediate quantity was not finite (`w(λ)` underflowed to zero).
    NonFinite,
}

/// One Laguerre step for `w` at `λ`, deflated against `deflated`, with
/// `remaining` roots still to find.
pub fn laguerre_step_scalar(
    w: &ScalarPolynomial,
    lambda: C64,
    deflated: &[C64],
    remaining: usize,
) -> Result<C64, StepError> {
    let (s1, s2) = scalar_sums(w, lambda).ok_or(StepError::NonFinite)?;
    let (s1, s2) = deflate(lambda, s1, s2, deflated, 0);
    if !(s1.is_finite() && s2.is_finite()) {
        return Err(StepError::NonFinite);
    }
    laguerre_iterate(lambda, s1, s2, remaining).ok_or(StepError::ZeroDenominator)
}

/// Undeflated `(p'/p, -(p'/p)')` at `λ`, on the reversal when `|λ| > 1`.
fn scalar_sums(w: &ScalarPolynomial, lambda: C64) -> Option<(C64, C64)> {
    let (s1, s2) = if lambda.norm() <= 1.0 {
        let (p, p1, p2) = w.eval(lambda);
        let g = p1 / p;
        (g, g * g - p2 / p)
    } else {
        let rho = lambda.inv();
        let (r, r1, r2) = w.eval_reversal(rho);
        let g = r1 / r;
        map_reversal_sums(g, g * g - r2 / r, rho, w.degree())
    };
    (s1.is_finite() && s2.is_finite()).then_some((s1, s2))
}

/// Bookkeeping for a sequential scalar solve.
#[derive(Debug, Clone, Default)]
pub struct ScalarSolveState {
    pub estimates: Vec<C64>,
    pub converged_roots: Vec<C64>,
    pub max_iter: usize,
    pub iterations: Vec<usize>,
}

/// Roots of a scalar polynomial with per-root diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSolution {
    pub roots: Vec<C64>,
    pub iterations: Vec<usize>,
    pub status: Vec<StopStatus>,
    /// Count of non-finite intermediates met along the way (should stay 0).
    pub nonfinite_events: usize,
    /// Laguerre steps taken on the reversal branch.
    pub reversal_steps: usize,
}

impl ScalarSolution {
    pub fn converged(&self, i: usize) -> bool {
        self.status[i] != StopStatus::MaxIter
    }

    pub fn all_converged(&self) -> bool {
        self.status.iter().all(|s| *s != StopStatus::MaxIter)
    }
}

/// All `d` roots of `w`.
///
/// Exact zero roots are emitted first without iterating. Each remaining root
/// runs from its Newton-polygon estimate until the residual falls below
/// `ε Σ|λ|^i|a_i|` (reported as `Criterion1`), the step stalls below `ε|λ|`
/// (`Criterion3`), or `max_iter` is hit.
pub fn solve_scalar(w: &ScalarPolynomial, max_iter: usize) -> Result<ScalarSolution, PolyError> {
    if w.degree() == 0 {
        return Err(PolyError::ConstantPolynomial);
    }
    let k0 = w.zero_multiplicity();
    let mut sol = ScalarSolution {
        roots: vec![ZERO; k0],
        iterations: vec![0; k0],
        status: vec![StopStatus::Criterion1; k0],
        nonfinite_events: 0,
        reversal_steps: 0,
    };
    let reduced = w.shifted_down(k0).normalized();
    let m = reduced.degree();
    if m == 0 {
        return Ok(sol);
    }
    let np = newton_polygon(&reduced)?;
    let mut state = ScalarSolveState {
        estimates: np.initial_estimates(),
        max_iter,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    for idx in 0..m {
        let mut lambda = state.estimates[idx];
        let remaining = m - state.converged_roots.len();
        let mut status = StopStatus::MaxIter;
        let mut iters = 0;
        let mut recent = History::default();
        while iters < max_iter {
            if reduced.relative_residual(lambda) <= EPS {
                status = StopStatus::Criterion1;
                break;
            }
            if lambda.norm() > 1.0 {
                sol.reversal_steps += 1;
            }
            iters += 1;
            match laguerre_step_scalar(&reduced, lambda, &state.converged_roots, remaining) {
                Ok(next) => {
                    if stagnant(next, lambda, &recent) {
                        status = StopStatus::Criterion3;
                        break;
                    }
                    recent.push(lambda);
                    lambda = next;
                }
                Err(e) => {
                    if e == StepError::NonFinite {
                        sol.nonfinite_events += 1;
                    }
                    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                    lambda += C64::from_polar(EPS * lambda.norm().max(1.0), theta);
                }
            }
        }
        if status == StopStatus::MaxIter && reduced.relative_residual(lambda) <= EPS {
            status = StopStatus::Criterion1;
        }
        state.converged_roots.push(lambda);
        state.iterations.push(iters);
        sol.status.push(status);
    }
    sol.roots.extend(state.converged_roots);
    sol.iterations.extend(state.iterations);
    Ok(sol)
}
