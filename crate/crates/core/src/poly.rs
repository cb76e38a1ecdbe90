//! Matrix polynomials and their evaluation.
//!
//! Everything here uses a single Horner sweep with three accumulators, so the
//! value and the first two derivatives come out together. For `|λ| > 1` callers
//! evaluate the reversal `rP(ρ) = Σ ρ^(d-i) A_i` at `ρ = 1/λ` instead, which
//! keeps every intermediate bounded by the coefficient norms.

use crate::error::PolyError;
use crate::matrix::CMatrix;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Sparsity pattern shared by every coefficient of a matrix polynomial.
///
/// Coefficients are always stored dense; the tag only tells the algorithms
/// which entries may be nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    General,
    Hessenberg,
    Tridiagonal,
    Scalar,
}

impl Structure {
    pub fn name(self) -> &'static str {
        match self {
            Structure::General => "general",
            Structure::Hessenberg => "hessenberg",
            Structure::Tridiagonal => "tridiagonal",
            Structure::Scalar => "scalar",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "general" | "dense" => Some(Structure::General),
            "hessenberg" => Some(Structure::Hessenberg),
            "tridiagonal" | "tridiag" => Some(Structure::Tridiagonal),
            "scalar" => Some(Structure::Scalar),
            _ => None,
        }
    }

    /// Column range of row `i` that may hold nonzeros.
    #[inline]
    pub fn col_range(self, n: usize, i: usize) -> std::ops::Range<usize> {
        match self {
            Structure::General | Structure::Scalar => 0..n,
            Structure::Hessenberg => i.saturating_sub(1)..n,
            Structure::Tridiagonal => i.saturating_sub(1)..(i + 2).min(n),
        }
    }

    /// Number of superdiagonals in the pattern (used by the band views).
    pub fn superdiagonals(self, n: usize) -> usize {
        match self {
            Structure::Tridiagonal => 1.min(n.saturating_sub(1)),
            _ => n.saturating_sub(1),
        }
    }
}

/// `P(λ) = Σ_{i=0}^{d} λ^i A_i` with `n x n` complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    n: usize,
    coeffs: Vec<CMatrix>,
    structure: Structure,
}

impl MatrixPolynomial {
    /// Validate and wrap coefficients `A_0..A_d`.
    pub fn new(coeffs: Vec<CMatrix>, structure: Structure) -> Result<Self, PolyError> {
        if coeffs.len() < 2 {
            return Err(PolyError::DegreeTooSmall);
        }
        let n = coeffs[0].rows();
        if n == 0 {
            return Err(PolyError::EmptyMatrix);
        }
        for (index, a) in coeffs.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(PolyError::DimensionMismatch {
                    index,
                    rows: a.rows(),
                    cols: a.cols(),
                    n,
                });
            }
            if !a.is_finite() {
                return Err(PolyError::NonFinite("coefficient matrix"));
            }
        }
        if structure == Structure::Scalar && n != 1 {
            return Err(PolyError::ScalarDimension(n));
        }
        if coeffs.last().is_some_and(CMatrix::is_zero) {
            return Err(PolyError::ZeroLeadingCoefficient);
        }
        for (index, a) in coeffs.iter().enumerate() {
            for i in 0..n {
                let allowed = structure.col_range(n, i);
                for j in 0..n {
                    if !allowed.contains(&j) && a[(i, j)] != ZERO {
                        return Err(PolyError::StructureViolation {
                            index,
                            row: i,
                            col: j,
                            structure: structure.name(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            n,
            coeffs,
            structure,
        })
    }

    /// Scalar polynomial `Σ a_i λ^i` as a `1 x 1` matrix polynomial.
    pub fn scalar(coeffs: &[C64]) -> Result<Self, PolyError> {
        let mats = coeffs
            .iter()
            .map(|&a| CMatrix::from_row_major(1, 1, vec![a]))
            .collect();
        Self::new(mats, Structure::Scalar)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &CMatrix {
        &self.coeffs[i]
    }

    /// Same coefficients under a different structure tag (validated).
    pub fn with_structure(&self, structure: Structure) -> Result<Self, PolyError> {
        Self::new(self.coeffs.clone(), structure)
    }

    /// The reversal `rP` as a polynomial in its own right.
    pub fn reversed(&self) -> Result<Self, PolyError> {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c, self.structure)
    }

    /// Frobenius norms of the coefficients, computed once per problem.
    pub fn coefficient_weights(&self) -> Weights {
        Weights::new(self.coeffs.iter().map(CMatrix::frobenius_norm).collect())
    }

    /// Coefficient indices in Horner order: leading first for `P`, `A_0` first for `rP`.
    fn horner_indices(&self, reversal: bool) -> impl Iterator<Item = usize> {
        let d = self.degree();
        (0..=d).map(move |k| if reversal { k } else { d - k })
    }

    /// `P(λ)`, `P'(λ)`, `P''(λ)` by one Horner sweep.
    pub fn eval_with_derivatives(&self, lambda: C64) -> Result<EvalTriple, PolyError> {
        self.eval_triple(lambda, false)
    }

    /// `rP(ρ)`, `rP'(ρ)`, `rP''(ρ)`.
    pub fn eval_reversal(&self, rho: C64) -> Result<EvalTriple, PolyError> {
        self.eval_triple(rho, true)
    }

    /// Forward evaluation for `|λ| <= 1`, reversal at `1/λ` otherwise.
    pub fn eval_auto(&self, lambda: C64) -> Result<EvalTriple, PolyError> {
        if lambda.norm() <= 1.0 {
            self.eval_triple(lambda, false)
        } else {
            self.eval_triple(lambda.inv(), true)
        }
    }

    fn eval_triple(&self, z: C64, reversal: bool) -> Result<EvalTriple, PolyError> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(PolyError::NonFinite("evaluation point"));
        }
        let n = self.n;
        let mut idx = self.horner_indices(reversal);
        let first = idx.next().expect("degree >= 1");
        let mut v = self.coeffs[first].clone();
        let mut d1 = CMatrix::zeros(n, n);
        let mut d2 = CMatrix::zeros(n, n);
        for k in idx {
            let a = self.coeffs[k].as_slice();
            let (vs, d1s, d2s) = (v.as_mut_slice(), d1.as_mut_slice(), d2.as_mut_slice());
            for t in 0..n * n {
                d2s[t] = d2s[t] * z + d1s[t];
                d1s[t] = d1s[t] * z + vs[t];
                vs[t] = vs[t] * z + a[t];
            }
        }
        let d2 = d2.scaled(C64::new(2.0, 0.0));
        if !(v.is_finite() && d1.is_finite() && d2.is_finite()) {
            return Err(PolyError::NumericRange("matrix polynomial"));
        }
        Ok(EvalTriple {
            value: v,
            deriv1: d1,
            deriv2: d2,
            at_reversal: reversal,
        })
    }

    /// Band view of `P(z)` (or `rP(z)`) and its two derivatives, touching only
    /// the entries allowed by the structure tag.
    pub fn eval_band(&self, z: C64, reversal: bool) -> BandTriple {
        let n = self.n;
        let sup = self.structure.superdiagonals(n);
        let mut out = [Band::zeros(n, sup), Band::zeros(n, sup), Band::zeros(n, sup)];
        let d = self.degree();
        let entry = |i: usize, j: usize| -> [C64; 3] {
            let mut v = ZERO;
            let mut p1 = ZERO;
            let mut p2 = ZERO;
            for k in 0..=d {
                let idx = if reversal { k } else { d - k };
                p2 = p2 * z + p1;
                p1 = p1 * z + v;
                v = v * z + self.coeffs[idx][(i, j)];
            }
            [v, p1, p2 * 2.0]
        };
        for i in 0..n {
            if i > 0 {
                let e = entry(i, i - 1);
                for (b, val) in out.iter_mut().zip(e) {
                    b.sub[i - 1] = val;
                }
            }
            for j in i..(i + sup + 1).min(n) {
                let e = entry(i, j);
                for (b, val) in out.iter_mut().zip(e) {
                    b.set_upper(i, j, val);
                }
            }
        }
        let [value, deriv1, deriv2] = out;
        BandTriple {
            value,
            deriv1,
            deriv2,
            at_reversal: reversal,
        }
    }

    /// `(M x, M' x)` where `M` is `P(z)` or `rP(z)`, by vector Horner.
    /// Costs `O(d * nnz)` for the structure tag.
    pub fn apply_with_derivative(&self, z: C64, x: &[C64], reversal: bool) -> (Vec<C64>, Vec<C64>) {
        let n = self.n;
        let mut v = vec![ZERO; n];
        let mut d1 = vec![ZERO; n];
        let mut ax = vec![ZERO; n];
        for k in self.horner_indices(reversal) {
            self.coeff_matvec(k, x, &mut ax);
            for t in 0..n {
                d1[t] = d1[t] * z + v[t];
                v[t] = v[t] * z + ax[t];
            }
        }
        (v, d1)
    }

    /// `M x` where `M` is `P(z)` or `rP(z)`.
    pub fn apply(&self, z: C64, x: &[C64], reversal: bool) -> Vec<C64> {
        self.apply_with_derivative(z, x, reversal).0
    }

    /// `M^* y` where `M` is `P(z)` or `rP(z)`; its norm equals `‖y^* M‖`.
    pub fn apply_adjoint(&self, z: C64, y: &[C64], reversal: bool) -> Vec<C64> {
        let n = self.n;
        let zc = z.conj();
        let mut v = vec![ZERO; n];
        let mut ay = vec![ZERO; n];
        for k in self.horner_indices(reversal) {
            self.coeff_adjoint_matvec(k, y, &mut ay);
            for t in 0..n {
                v[t] = v[t] * zc + ay[t];
            }
        }
        v
    }

    fn coeff_matvec(&self, k: usize, x: &[C64], out: &mut [C64]) {
        let a = &self.coeffs[k];
        for (i, o) in out.iter_mut().enumerate() {
            let r = self.structure.col_range(self.n, i);
            let row = &a.row(i)[r.clone()];
            *o = row.iter().zip(&x[r]).map(|(p, q)| p * q).sum();
        }
    }

    fn coeff_adjoint_matvec(&self, k: usize, y: &[C64], out: &mut [C64]) {
        let a = &self.coeffs[k];
        out.iter_mut().for_each(|o| *o = ZERO);
        for (i, &yi) in y.iter().enumerate() {
            let r = self.structure.col_range(self.n, i);
            for j in r {
                out[j] += a[(i, j)].conj() * yi;
            }
        }
    }

    /// Coefficients of the scalar polynomial `x^* P(λ) x`.
    pub fn quadratic_form_coeffs(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut ax = vec![ZERO; n];
        (0..=self.degree())
            .map(|k| {
                self.coeff_matvec(k, x, &mut ax);
                crate::matrix::dot(x, &ax)
            })
            .collect()
    }
}

/// `P`, `P'`, `P''` at one point (or `rP`, `rP'`, `rP''` when `at_reversal`).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTriple {
    pub value: CMatrix,
    pub deriv1: CMatrix,
    pub deriv2: CMatrix,
    pub at_reversal: bool,
}

/// `2^-k` with `2^k` the power of two nearest `alpha`; 1 when `alpha` is zero
/// or not finite. Scaling by it is exact.
pub fn pow2_inverse(alpha: f64) -> f64 {
    if alpha > 0.0 && alpha.is_finite() {
        2f64.powi(-(alpha.log2().round() as i32))
    } else {
        1.0
    }
}

impl EvalTriple {
    /// Multiply all three matrices by `s`.
    pub fn scale(&mut self, s: f64) {
        for m in [&mut self.value, &mut self.deriv1, &mut self.deriv2] {
            m.as_mut_slice().iter_mut().for_each(|v| *v *= s);
        }
    }
}

/// Coefficient weights `‖A_i‖_F` with the `α` evaluators built on them.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    norms: Vec<f64>,
}

impl Weights {
    pub fn new(norms: Vec<f64>) -> Self {
        Self { norms }
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn degree(&self) -> usize {
        self.norms.len() - 1
    }

    /// `α(λ) = Σ |λ|^i ‖A_i‖`
    pub fn alpha(&self, lambda: C64) -> f64 {
        let t = lambda.norm();
        self.norms.iter().rev().fold(0.0, |acc, &w| acc * t + w)
    }

    /// `rα(ρ) = Σ |ρ|^(d-i) ‖A_i‖`
    pub fn alpha_rev(&self, rho: C64) -> f64 {
        let t = rho.norm();
        self.norms.iter().fold(0.0, |acc, &w| acc * t + w)
    }

    /// `α` at `λ` when `at_reversal` is false, `rα` at `ρ = z` otherwise.
    pub fn alpha_at(&self, z: C64, at_reversal: bool) -> f64 {
        if at_reversal {
            self.alpha_rev(z)
        } else {
            self.alpha(z)
        }
    }
}

/// Banded square matrix: one subdiagonal plus `sup` superdiagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    n: usize,
    sup: usize,
    /// `sub[j]` is entry `(j+1, j)`.
    pub sub: Vec<C64>,
    upper: Vec<C64>,
}

impl Band {
    pub fn zeros(n: usize, sup: usize) -> Self {
        Self {
            n,
            sup,
            sub: vec![ZERO; n.saturating_sub(1)],
            upper: vec![ZERO; n * (sup + 1)],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn superdiagonals(&self) -> usize {
        self.sup
    }

    /// Entry `(i, j)` for `i <= j <= i + sup`.
    #[inline]
    pub fn upper(&self, i: usize, j: usize) -> C64 {
        self.upper[i * (self.sup + 1) + (j - i)]
    }

    #[inline]
    pub fn set_upper(&mut self, i: usize, j: usize, v: C64) {
        self.upper[i * (self.sup + 1) + (j - i)] = v;
    }

    /// Last column index (exclusive) stored in row `i`.
    #[inline]
    pub fn row_end(&self, i: usize) -> usize {
        (i + self.sup + 1).min(self.n)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if j + 1 == i {
            self.sub[j]
        } else if j >= i && j < self.row_end(i) {
            self.upper(i, j)
        } else {
            ZERO
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let mut s = ZERO;
                if i > 0 {
                    s += self.sub[i - 1] * x[i - 1];
                }
                for j in i..self.row_end(i) {
                    s += self.upper(i, j) * x[j];
                }
                s
            })
            .collect()
    }
}

impl BandTriple {
    /// Multiply all three bands by `s`.
    pub fn scale(&mut self, s: f64) {
        for b in [&mut self.value, &mut self.deriv1, &mut self.deriv2] {
            b.sub.iter_mut().chain(b.upper.iter_mut()).for_each(|v| *v *= s);
        }
    }
}

/// Band views of `P`, `P'`, `P''` (or the reversal triple).
#[derive(Debug, Clone, PartialEq)]
pub struct BandTriple {
    pub value: Band,
    pub deriv1: Band,
    pub deriv2: Band,
    pub at_reversal: bool,
}
