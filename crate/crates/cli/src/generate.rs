//! Seeded random problem generators.
//!
//! Entries have real and imaginary parts uniform on `[-1, 1]` unless a kind
//! says otherwise.

use std::fmt;
use std::str::FromStr;

use polyeig::{CMatrix, MatrixPolynomial, PolyError, Structure, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    General,
    Hessenberg,
    /// Unitary Hessenberg reduction of a uniform random dense matrix. Uniform
    /// entries inside the Hessenberg pattern give exponentially ill-conditioned
    /// matrices as `n` grows; these keep the singular values of a dense one.
    HessenbergReduced,
    Tridiagonal,
    Scalar,
    /// Hermitian `A_0..A_{d-1}` and Hermitian positive definite `A_d`.
    HermitianCoefficients,
    /// `A_0` and `A_d` each with nullity `k`.
    RankDeficientEnds(usize),
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKind::General => f.write_str("general"),
            GenKind::Hessenberg => f.write_str("hessenberg"),
            GenKind::HessenbergReduced => f.write_str("hessenberg-reduced"),
            GenKind::Tridiagonal => f.write_str("tridiagonal"),
            GenKind::Scalar => f.write_str("scalar"),
            GenKind::HermitianCoefficients => f.write_str("hermitian-coefficients"),
            GenKind::RankDeficientEnds(k) => write!(f, "rank-deficient-ends({k})"),
        }
    }
}

impl FromStr for GenKind {
    type Err = String;

    /// Accepts the display names; the rank-deficient kind also as
    /// `rank-deficient-ends=k` or `rank-deficient-ends:k`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        Ok(match s.as_str() {
            "general" => GenKind::General,
            "hessenberg" => GenKind::Hessenberg,
            "hessenberg-reduced" => GenKind::HessenbergReduced,
            "tridiagonal" => GenKind::Tridiagonal,
            "scalar" => GenKind::Scalar,
            "hermitian-coefficients" | "hermitian" => GenKind::HermitianCoefficients,
            _ => {
                let rest = s
                    .strip_prefix("rank-deficient-ends")
                    .ok_or_else(|| format!("unknown kind `{s}`"))?;
                let k = rest
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| rest.strip_prefix('='))
                    .or_else(|| rest.strip_prefix(':'))
                    .ok_or_else(|| format!("expected rank-deficient-ends(k), found `{s}`"))?;
                let k = k.parse().map_err(|_| format!("bad nullity `{k}`"))?;
                GenKind::RankDeficientEnds(k)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("n and d must be at least 1")]
    EmptySize,
    #[error("scalar problems have n = 1, got n = {0}")]
    ScalarSize(usize),
    #[error("nullity k = {k} must be below n = {n}")]
    NullityTooLarge { k: usize, n: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn entry(r: &mut ChaCha8Rng) -> C64 {
    C64::new(r.gen_range(-1.0..=1.0), r.gen_range(-1.0..=1.0))
}

fn random_matrix(r: &mut ChaCha8Rng, n: usize, s: Structure) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in s.col_range(n, i) {
            a[(i, j)] = entry(r);
        }
    }
    a
}

fn hermitian(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let b = random_matrix(r, n, Structure::General);
    b.add(&b.adjoint()).scaled(C64::new(0.5, 0.0))
}

fn positive_definite(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let b = random_matrix(r, n, Structure::General);
    b.matmul(&b.adjoint()).add(&CMatrix::identity(n).scaled(C64::new(0.1, 0.0)))
}

/// Householder reduction `Q^* A Q` to upper Hessenberg form; entries below the
/// subdiagonal are set to exact zeros.
fn reduce_to_hessenberg(mut a: CMatrix) -> CMatrix {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let alpha = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { v[0] / v[0].norm() };
        v[0] += phase * alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        // H = I - 2 v v^* / (v^* v), applied as H A H
        for j in 0..n {
            let s: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * a[(k + 1 + t, j)]).sum();
            let s = s * (2.0 / vn);
            for (t, vi) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= vi * s;
            }
        }
        for i in 0..n {
            let s: C64 = v.iter().enumerate().map(|(t, vi)| a[(i, k + 1 + t)] * vi).sum();
            let s = s * (2.0 / vn);
            for (t, vi) in v.iter().enumerate() {
                a[(i, k + 1 + t)] -= s * vi.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    a
}

/// `B (I - V V^*)` with `V` having `k` orthonormal columns.
fn with_nullity(r: &mut ChaCha8Rng, n: usize, k: usize) -> CMatrix {
    let b = random_matrix(r, n, Structure::General);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<C64> = (0..n).map(|_| entry(r)).collect();
        for _ in 0..2 {
            for u in &basis {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-8 {
            v.iter_mut().for_each(|z| *z /= nv);
            basis.push(v);
        }
    }
    let mut proj = CMatrix::identity(n);
    for u in &basis {
        for i in 0..n {
            for j in 0..n {
                proj[(i, j)] -= u[i] * u[j].conj();
            }
        }
    }
    b.matmul(&proj)
}

/// Deterministic random problem of the given kind.
pub fn generate(kind: GenKind, n: usize, d: usize, seed: u64) -> Result<MatrixPolynomial, GenError> {
    if n == 0 || d == 0 {
        return Err(GenError::EmptySize);
    }
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let (coeffs, structure) = match kind {
        GenKind::General | GenKind::Hessenberg | GenKind::Tridiagonal => {
            let s = match kind {
                GenKind::General => Structure::General,
                GenKind::Hessenberg => Structure::Hessenberg,
                _ => Structure::Tridiagonal,
            };
            ((0..=d).map(|_| random_matrix(&mut r, n, s)).collect(), s)
        }
        GenKind::HessenbergReduced => (
            (0..=d)
                .map(|_| reduce_to_hessenberg(random_matrix(&mut r, n, Structure::General)))
                .collect(),
            Structure::Hessenberg,
        ),
        GenKind::Scalar => {
            if n != 1 {
                return Err(GenError::ScalarSize(n));
            }
            ((0..=d).map(|_| random_matrix(&mut r, 1, Structure::Scalar)).collect(), Structure::Scalar)
        }
        GenKind::HermitianCoefficients => {
            let mut c: Vec<CMatrix> = (0..d).map(|_| hermitian(&mut r, n)).collect();
            c.push(positive_definite(&mut r, n));
            (c, Structure::General)
        }
        GenKind::RankDeficientEnds(k) => {
            if k >= n {
                return Err(GenError::NullityTooLarge { k, n });
            }
            let mut c = vec![with_nullity(&mut r, n, k)];
            c.extend((1..d).map(|_| random_matrix(&mut r, n, Structure::General)));
            c.push(with_nullity(&mut r, n, k));
            (c, Structure::General)
        }
    };
    Ok(MatrixPolynomial::new(coeffs, structure)?)
}
