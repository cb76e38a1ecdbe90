#![allow(dead_code)]

use num_complex::Complex64 as C64;
use polyeig::{CMatrix, MatrixPolynomial, Structure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EPS: f64 = f64::EPSILON / 2.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rand_c(r: &mut ChaCha8Rng) -> C64 {
    C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn rand_matrix(r: &mut ChaCha8Rng, n: usize, structure: Structure) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let keep = match structure {
            Structure::General | Structure::Scalar => true,
            Structure::Hessenberg => i <= j + 1,
            Structure::Tridiagonal => i.abs_diff(j) <= 1,
        };
        if keep {
            rand_c(r)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn rand_poly(seed: u64, n: usize, d: usize, structure: Structure) -> MatrixPolynomial {
    let mut r = rng(seed);
    let coeffs = (0..=d).map(|_| rand_matrix(&mut r, n, structure)).collect();
    MatrixPolynomial::new(coeffs, structure).unwrap()
}

pub fn rand_unit(r: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n).map(|_| rand_c(r)).collect();
    let nrm = norm(&v);
    v.iter_mut().for_each(|z| *z /= nrm);
    v
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn matvec(a: &CMatrix, x: &[C64]) -> Vec<C64> {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

/// `P(λ)` by explicit powers, no Horner.
pub fn naive_eval(p: &MatrixPolynomial, lambda: C64) -> CMatrix {
    let n = p.n();
    let mut out = CMatrix::zeros(n, n);
    for (i, a) in p.coeffs().iter().enumerate() {
        let pw = lambda.powu(i as u32);
        for r in 0..n {
            for s in 0..n {
                out[(r, s)] += a[(r, s)] * pw;
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.as_slice().iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn lu_det(a: &CMatrix) -> C64 {
    let n = a.rows();
    let mut m = a.clone();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm()))
            .unwrap();
        if m[(p, k)].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
            }
            det = -det;
        }
        let piv = m[(k, k)];
        det *= piv;
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    det
}

/// Singular values by one-sided Jacobi (ascending).
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let n = a.cols();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-17 * (alpha * beta).sqrt() {
                    continue;
                }
                off = off.max(g / (alpha * beta).sqrt());
                let phase = gamma.conj() / g;
                let bq: Vec<C64> = cols[q].iter().map(|z| z * phase).collect();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let ap = cols[p].clone();
                for k in 0..a.rows() {
                    cols[p][k] = ap[k] * cs - bq[k] * sn;
                    cols[q][k] = ap[k] * sn + bq[k] * cs;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut s: Vec<f64> = cols.iter().map(|v| norm(v)).collect();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Greedy pairing: for each `a`, the closest unused `b`; returns the worst
/// relative distance.
pub fn greedy_match(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &x in a {
        let (k, dist) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm() / y.norm().max(1e-300)))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(dist);
    }
    worst
}

/// `‖P(λ)x‖/(α‖x‖)` recomputed from scratch (explicit powers, reversal for `|λ| > 1`).
pub fn independent_eta(p: &MatrixPolynomial, lambda: C64, x: &[C64]) -> f64 {
    let d = p.degree();
    let (z, rev) = if lambda.norm() <= 1.0 { (lambda, false) } else { (lambda.inv(), true) };
    let n = p.n();
    let mut m = CMatrix::zeros(n, n);
    let mut alpha = 0.0;
    for (i, a) in p.coeffs().iter().enumerate() {
        let e = if rev { d - i } else { i };
        let pw = z.powu(e as u32);
        alpha += z.norm().powi(e as i32) * a.frobenius_norm();
        for r in 0..n {
            for s in 0..n {
                m[(r, s)] += a[(r, s)] * pw;
            }
        }
    }
    norm(&matvec(&m, x)) / (alpha * norm(x))
}

/// Same for the left vector: `‖y^*P(λ)‖/(α‖y‖)`.
pub fn independent_eta_left(p: &MatrixPolynomial, lambda: C64, y: &[C64]) -> f64 {
    let d = p.degree();
    let (z, rev) = if lambda.norm() <= 1.0 { (lambda, false) } else { (lambda.inv(), true) };
    let n = p.n();
    let mut m = CMatrix::zeros(n, n);
    let mut alpha = 0.0;
    for (i, a) in p.coeffs().iter().enumerate() {
        let e = if rev { d - i } else { i };
        let pw = z.powu(e as u32);
        alpha += z.norm().powi(e as i32) * a.frobenius_norm();
        for r in 0..n {
            for s in 0..n {
                m[(r, s)] += a[(r, s)] * pw;
            }
        }
    }
    let yh: Vec<C64> = (0..n).map(|j| (0..n).map(|i| y[i].conj() * m[(i, j)]).sum()).collect();
    norm(&yh) / (alpha * norm(y))
}
