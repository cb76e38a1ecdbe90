//! Householder QR with greedy column pivoting, `Q R = M E`.

use crate::matrix::{guarded_div, norm2, CMatrix, RESCALE_THRESHOLD};
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// One Householder reflector `H = I - tau v v^*` acting on rows `k..n`.
#[derive(Debug, Clone, PartialEq)]
struct Reflector {
    v: Vec<C64>,
    tau: f64,
}

impl Reflector {
    #[inline]
    fn apply(&self, k: usize, x: &mut [C64]) {
        if self.tau == 0.0 {
            return;
        }
        let tail = &mut x[k..];
        let s: C64 = self.v.iter().zip(tail.iter()).map(|(v, x)| v.conj() * x).sum();
        let s = s * self.tau;
        for (xi, vi) in tail.iter_mut().zip(&self.v) {
            *xi -= vi * s;
        }
    }
}

/// Factors of `M E = Q R` with `|r_11| >= |r_22| >= ... >= |r_nn|`.
///
/// `Q` is kept as its reflectors; `perm[k]` is the original column that ended
/// up in position `k`, so `(M E)[:, k] = M[:, perm[k]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QrpFactors {
    reflectors: Vec<Reflector>,
    r: CMatrix,
    perm: Vec<usize>,
    /// Whether the factored matrix was `rP(ρ)` rather than `P(λ)`.
    pub at_reversal: bool,
}

/// Householder QR of a square matrix with column pivoting on remaining norms.
pub fn qr_col_pivot(m: &CMatrix) -> QrpFactors {
    assert!(m.is_square(), "qr_col_pivot expects a square matrix");
    let n = m.rows();
    // factor 2^-k·M with 2^k near max|m_ij| so column norms cannot overflow;
    // the reflectors do not depend on the scale and R is scaled back exactly
    let big = m.as_slice().iter().fold(0.0_f64, |acc, z| acc.max(z.re.abs()).max(z.im.abs()));
    let scale = crate::poly::pow2_inverse(big);
    let mut a = m.clone();
    if scale != 1.0 {
        a.as_mut_slice().iter_mut().for_each(|z| *z *= scale);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors = Vec::with_capacity(n);
    let mut colnorm = vec![0.0f64; n];
    let mut w = vec![ZERO; n];

    for k in 0..n {
        colnorm[k..].iter_mut().for_each(|c| *c = 0.0);
        for i in k..n {
            let row = a.row(i);
            for j in k..n {
                colnorm[j] += row[j].norm_sqr();
            }
        }
        let mut p = k;
        for j in k + 1..n {
            if colnorm[j] > colnorm[p] {
                p = j;
            }
        }
        if p != k {
            a.swap_columns(k, p);
            perm.swap(k, p);
        }

        let x: Vec<C64> = (k..n).map(|i| a[(i, k)]).collect();
        let sigma = norm2(&x);
        if sigma == 0.0 {
            reflectors.push(Reflector {
                v: vec![ZERO; n - k],
                tau: 0.0,
            });
            continue;
        }
        let phase = if x[0] == ZERO { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * sigma;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };

        if tau != 0.0 {
            w[k + 1..].iter_mut().for_each(|z| *z = ZERO);
            for (i, vi) in (k..n).zip(&v) {
                let vc = vi.conj();
                let row = a.row(i);
                for j in k + 1..n {
                    w[j] += vc * row[j];
                }
            }
            for (i, vi) in (k..n).zip(&v) {
                let f = vi * tau;
                let row = a.row_mut(i);
                for j in k + 1..n {
                    row[j] -= f * w[j];
                }
            }
        }
        a[(k, k)] = alpha;
        for i in k + 1..n {
            a[(i, k)] = ZERO;
        }
        reflectors.push(Reflector { v, tau });
    }
    if scale != 1.0 {
        let undo = scale.recip();
        a.as_mut_slice().iter_mut().for_each(|z| *z *= undo);
    }

    QrpFactors {
        reflectors,
        r: a,
        perm,
        at_reversal: false,
    }
}

impl QrpFactors {
    pub fn n(&self) -> usize {
        self.r.rows()
    }

    pub fn r(&self) -> &CMatrix {
        &self.r
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// `|r_nn|`, the smallest diagonal magnitude.
    pub fn last_pivot(&self) -> f64 {
        let n = self.n();
        self.r[(n - 1, n - 1)].norm()
    }

    /// `b <- Q^* b`
    pub fn apply_qh(&self, b: &mut [C64]) {
        for (k, h) in self.reflectors.iter().enumerate() {
            h.apply(k, b);
        }
    }

    /// `b <- Q b`
    pub fn apply_q(&self, b: &mut [C64]) {
        for (k, h) in self.reflectors.iter().enumerate().rev() {
            h.apply(k, b);
        }
    }

    /// `B <- Q^* B` for every column of `B`.
    pub fn apply_qh_matrix(&self, b: &mut CMatrix) {
        let n = self.n();
        let cols = b.cols();
        let mut w = vec![ZERO; cols];
        for (k, h) in self.reflectors.iter().enumerate() {
            if h.tau == 0.0 {
                continue;
            }
            w.iter_mut().for_each(|z| *z = ZERO);
            for (i, vi) in (k..n).zip(&h.v) {
                let vc = vi.conj();
                for (wj, bij) in w.iter_mut().zip(b.row(i)) {
                    *wj += vc * bij;
                }
            }
            for (i, vi) in (k..n).zip(&h.v) {
                let f = vi * h.tau;
                for (bij, wj) in b.row_mut(i).iter_mut().zip(&w) {
                    *bij -= f * wj;
                }
            }
        }
    }

    /// The unitary factor as a dense matrix.
    pub fn q(&self) -> CMatrix {
        let n = self.n();
        let mut q = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = crate::matrix::unit_vector(n, j);
            self.apply_q(&mut e);
            q.set_column(j, &e);
        }
        q
    }

    /// `Q e_n`, the last column of `Q`.
    pub fn last_q_column(&self) -> Vec<C64> {
        let n = self.n();
        let mut e = crate::matrix::unit_vector(n, n - 1);
        self.apply_q(&mut e);
        e
    }

    /// `E x` (undo the column permutation).
    pub fn permute(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; x.len()];
        for (k, &p) in self.perm.iter().enumerate() {
            out[p] = x[k];
        }
        out
    }

    /// `E^T x`
    pub fn permute_back(&self, x: &[C64]) -> Vec<C64> {
        self.perm.iter().map(|&p| x[p]).collect()
    }

    /// `M^{-1} b` up to a positive scale: returns `(x, s)` with `M x = s b`.
    pub fn solve_scaled(&self, b: &[C64]) -> (Vec<C64>, f64) {
        let mut y = b.to_vec();
        self.apply_qh(&mut y);
        let s = back_substitute(&self.r, &mut y, 0.0);
        (self.permute(&y), s)
    }

    /// Reconstruct `M` from the factors (`Q R E^T`).
    pub fn reconstruct(&self) -> CMatrix {
        let qr = self.q().matmul(&self.r);
        let n = self.n();
        let mut m = CMatrix::zeros(n, n);
        for (k, &p) in self.perm.iter().enumerate() {
            for i in 0..n {
                m[(i, p)] = qr[(i, k)];
            }
        }
        m
    }
}

/// Solve the leading `b.len() x b.len()` upper-triangular system of `r` in
/// place. Pivots smaller than `floor` are replaced by `floor` (same phase).
/// Returns the scale `s` such that `R x = s b`.
pub(crate) fn back_substitute(r: &CMatrix, b: &mut [C64], floor: f64) -> f64 {
    let m = b.len();
    let mut scale = 1.0;
    for j in (0..m).rev() {
        let row = r.row(j);
        let mut acc = b[j];
        for k in j + 1..m {
            acc -= row[k] * b[k];
        }
        let xj = guarded_div(acc, row[j], floor);
        b[j] = xj;
        let mag = xj.norm();
        if mag > RESCALE_THRESHOLD && mag.is_finite() {
            let f = 1.0 / mag;
            b.iter_mut().for_each(|z| *z *= f);
            scale *= f;
        }
    }
    scale
}

/// Solve `R^* x = s b` on the leading block, in place; returns `s`.
pub(crate) fn forward_substitute_adjoint(r: &CMatrix, b: &mut [C64], floor: f64) -> f64 {
    let m = b.len();
    let mut scale = 1.0;
    for j in 0..m {
        let mut acc = b[j];
        for k in 0..j {
            acc -= r[(k, j)].conj() * b[k];
        }
        let xj = guarded_div(acc, r[(j, j)].conj(), floor);
        b[j] = xj;
        let mag = xj.norm();
        if mag > RESCALE_THRESHOLD && mag.is_finite() {
            let f = 1.0 / mag;
            b.iter_mut().for_each(|z| *z *= f);
            scale *= f;
        }
    }
    scale
}

/// Plane rotation `G = [[c, s], [-conj(s), c]]` with real `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Givens {
    pub c: f64,
    pub s: C64,
}

impl Givens {
    /// Rotation with `G [a; b] = [r; 0]`; returns `(G, r)`.
    pub fn new(a: C64, b: C64) -> (Self, C64) {
        if b == ZERO {
            return (Self { c: 1.0, s: ZERO }, a);
        }
        let na = a.norm();
        let norm = na.hypot(b.norm());
        if na == 0.0 {
            let g = Self {
                c: 0.0,
                s: b.conj() / b.norm(),
            };
            return (g, C64::new(b.norm(), 0.0));
        }
        let phase = a / na;
        let g = Self {
            c: na / norm,
            s: phase * b.conj() / norm,
        };
        (g, phase * norm)
    }

    /// `(x, y) <- G (x, y)`
    #[inline]
    pub fn apply(&self, x: &mut C64, y: &mut C64) {
        let (a, b) = (*x, *y);
        *x = a * self.c + self.s * b;
        *y = -self.s.conj() * a + b * self.c;
    }

    /// `(x, y) <- G^* (x, y)`
    #[inline]
    pub fn apply_adjoint(&self, x: &mut C64, y: &mut C64) {
        let (a, b) = (*x, *y);
        *x = a * self.c - self.s * b;
        *y = self.s.conj() * a + b * self.c;
    }

    /// Row pair `[x, y] <- [x, y] G^*`, used to accumulate `Q <- Q G^*`.
    #[inline]
    pub fn apply_adjoint_right(&self, x: &mut C64, y: &mut C64) {
        let (a, b) = (*x, *y);
        *x = a * self.c + b * self.s.conj();
        *y = -a * self.s + b * self.c;
    }
}
