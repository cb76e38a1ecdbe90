mod common;

use common::*;
use num_complex::Complex64 as C64;
use polyeig::bounds::sigma_min;
use polyeig::prep::{default_rank_tol, initial_estimates, rank_reveal, tridiagonal_pivot_scan};
use polyeig::scalar::solve_scalar;
use polyeig::{pellet_bounds, solve_dense, CMatrix, Eigenvalue, MatrixPolynomial, PelletBounds, ScalarPolynomial, SolveOptions, Structure};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn hermitian(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let b = rand_matrix(r, n, Structure::General);
    b.add(&b.adjoint()).scaled(c(0.5, 0.0))
}

fn positive_definite(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let b = rand_matrix(r, n, Structure::General);
    b.matmul(&b.adjoint()).add(&CMatrix::identity(n).scaled(c(0.1, 0.0)))
}

fn hermitian_poly(seed: u64, n: usize, d: usize) -> MatrixPolynomial {
    let mut r = rng(seed);
    let mut coeffs: Vec<CMatrix> = (0..d).map(|_| hermitian(&mut r, n)).collect();
    coeffs.push(positive_definite(&mut r, n));
    MatrixPolynomial::new(coeffs, Structure::General).unwrap()
}

/// `U V^*` with `U, V` random `n x rank`.
fn low_rank(r: &mut ChaCha8Rng, n: usize, rank: usize) -> CMatrix {
    let u = CMatrix::from_fn(n, rank, |_, _| rand_c(r));
    let v = CMatrix::from_fn(n, rank, |_, _| rand_c(r));
    u.matmul(&v.adjoint())
}

fn check_null_bases(a: &CMatrix, right: &CMatrix, left: &CMatrix) {
    let bound = 1e-12 * a.frobenius_norm();
    for j in 0..right.cols() {
        let x = right.column(j);
        let y = left.column(j);
        assert!((norm(&x) - 1.0).abs() < 1e-12 && (norm(&y) - 1.0).abs() < 1e-12);
        assert!(norm(&matvec(a, &x)) <= bound, "right residual");
        assert!(norm(&matvec(&a.adjoint(), &y)) <= bound, "left residual");
    }
}

#[test]
fn scalar_pellet_examples() {
    let b = pellet_bounds(&[2.0, 1.0], 2.0, 1.0).unwrap();
    assert!((b.upper - 2.0).abs() < 1e-12 && (b.lower - 2.0).abs() < 1e-12);
    let b = pellet_bounds(&[1.0, 0.0, 1.0], 1.0, 1.0).unwrap();
    assert!((b.upper - 1.0).abs() < 1e-12 && (b.lower - 1.0).abs() < 1e-12);
    assert!(pellet_bounds(&[0.0, 0.0], 0.0, 0.0).is_err());
}

#[test]
fn singular_ends_give_trivial_bounds() {
    let b = pellet_bounds(&[1.0, 1.0, 1.0], 0.0, 0.0).unwrap();
    assert_eq!(b.lower, 0.0);
    assert_eq!(b.upper, f64::INFINITY);
}

#[test]
fn sigma_min_matches_svd_oracle() {
    let mut r = rng(21);
    for n in 1..8 {
        let a = rand_matrix(&mut r, n, Structure::General);
        let s = singular_values(&a)[0];
        assert!((sigma_min(&a) - s).abs() <= 1e-10 * s.max(1e-300), "n {n}");
    }
}

#[test]
fn pellet_contains_dense_spectrum() {
    for seed in 30..40u64 {
        let p = rand_poly(seed, 3, 3, Structure::General);
        let b = PelletBounds::for_polynomial(&p).unwrap();
        assert!(b.lower <= b.upper);
        let out = solve_dense(&p, &SolveOptions::default()).unwrap();
        for res in &out.results {
            if let Eigenvalue::Finite(z) = res.eigenvalue {
                assert!(b.contains(z.norm(), 1e-8), "seed {seed}: {} not in [{}, {}]", z.norm(), b.lower, b.upper);
            }
        }
    }
}

#[test]
fn quadratic_form_roots_below_upper_bound() {
    for seed in 0..20u64 {
        let p = hermitian_poly(seed, 4, 3);
        let upper = PelletBounds::for_polynomial(&p).unwrap().upper;
        let mut r = rng(seed + 1000);
        for _ in 0..50 {
            let x = rand_unit(&mut r, 4);
            let w = ScalarPolynomial::new(&p.quadratic_form_coeffs(&x)).unwrap();
            for z in solve_scalar(&w, 60).unwrap().roots {
                assert!(z.norm() <= upper * (1.0 + 1e-8), "seed {seed}");
            }
        }
    }
}

#[test]
fn hermitian_estimates_below_upper_bound() {
    for seed in 50..70u64 {
        let p = hermitian_poly(seed, 4, 3);
        let upper = PelletBounds::for_polynomial(&p).unwrap().upper;
        let est = initial_estimates(&p, None).unwrap();
        assert_eq!(est.finite_estimates.len(), 12);
        for z in &est.finite_estimates {
            assert!(z.norm() <= upper * (1.0 + 1e-8));
        }
    }
}

#[test]
fn rank_one_outer_product() {
    let mut r = rng(22);
    let a = low_rank(&mut r, 4, 1);
    let rr = rank_reveal(&a, default_rank_tol(&a));
    assert_eq!(rr.rank, 1);
    assert_eq!(rr.nullity(), 3);
    check_null_bases(&a, &rr.right_null, &rr.left_null);
}

#[test]
fn null_bases_on_rank_deficient_constructions() {
    let mut r = rng(23);
    for t in 0..100 {
        let n = 2 + t % 7;
        let rank = t % n;
        let a = low_rank(&mut r, n, rank);
        let rr = rank_reveal(&a, default_rank_tol(&a));
        assert_eq!(rr.rank, rank, "case {t}");
        check_null_bases(&a, &rr.right_null, &rr.left_null);
    }
}

#[test]
fn tridiagonal_scan_on_zero_rows() {
    let mut r = rng(24);
    for t in 0..100 {
        let n = 3 + t % 10;
        let mut a = rand_matrix(&mut r, n, Structure::Tridiagonal);
        let zeroed = [t % n, (t * 7 + 3) % n];
        for &i in &zeroed {
            for j in 0..n {
                a[(i, j)] = c(0.0, 0.0);
            }
        }
        let expected = n - if zeroed[0] == zeroed[1] { 1 } else { 2 };
        let rr = tridiagonal_pivot_scan(&a, default_rank_tol(&a));
        assert_eq!(rr.rank, expected, "case {t}");
        check_null_bases(&a, &rr.right_null, &rr.left_null);
    }
}

#[test]
fn full_rank_tridiagonal() {
    let mut r = rng(25);
    for n in 2..=6 {
        let a = rand_matrix(&mut r, n, Structure::Tridiagonal);
        assert!(lu_det(&a).norm() > 1e-12);
        let rr = tridiagonal_pivot_scan(&a, default_rank_tol(&a));
        assert_eq!(rr.rank, n);
        assert_eq!(rr.nullity(), 0);
    }
}

#[test]
fn one_zero_one_infinite() {
    let a0 = CMatrix::from_diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
    let a1 = CMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 0.0)]);
    let p = MatrixPolynomial::new(vec![a0, a1], Structure::General).unwrap();
    let est = initial_estimates(&p, None).unwrap();
    assert_eq!(est.zero_multiplicity, 1);
    assert_eq!(est.infinite_multiplicity, 1);
    assert!(est.finite_estimates.is_empty());
}

#[test]
fn diagonal_estimates_are_exact() {
    let diag = [c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 3.0)];
    let a0 = CMatrix::from_diag(&diag.iter().map(|z| -z).collect::<Vec<_>>());
    let p = MatrixPolynomial::new(vec![a0, CMatrix::identity(3)], Structure::General).unwrap();
    let est = initial_estimates(&p, None).unwrap();
    assert!(greedy_match(&est.finite_estimates, &diag) <= 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn pellet_solver_handles_wide_ratios(e in -15i32..=15, d in 1usize..8, e0 in -15i32..=15) {
        let mut w = vec![1.0; d + 1];
        w[0] = 10f64.powi(e0);
        w[d] = 10f64.powi(e);
        let b = pellet_bounds(&w, w[0], w[d]).unwrap();
        prop_assert!(b.lower > 0.0 && b.upper.is_finite() && b.lower <= b.upper);
        // both outer equations are satisfied at the returned roots
        let mu = b.upper;
        let rhs: f64 = (0..d).map(|i| w[i] * mu.powi(i as i32 - d as i32)).sum();
        prop_assert!((rhs - w[d]).abs() <= 1e-10 * w[d]);
        let mu = b.lower;
        let rhs: f64 = (1..=d).map(|i| w[i] * mu.powi(i as i32)).sum();
        prop_assert!((rhs - w[0]).abs() <= 1e-10 * w[0]);
    }

    #[test]
    fn count_conservation(seed in 0u64..100_000, n in 1usize..6, d in 1usize..5, k in 0usize..3) {
        let mut r = rng(seed);
        // a pencil with rank(A_0) + rank(A_1) < n is singular
        let k = if d == 1 { k.min(n / 2) } else { k.min(n - 1) };
        let mut coeffs: Vec<CMatrix> = (0..=d).map(|_| rand_matrix(&mut r, n, Structure::General)).collect();
        coeffs[0] = low_rank(&mut r, n, n - k);
        coeffs[d] = low_rank(&mut r, n, n - k);
        let p = MatrixPolynomial::new(coeffs, Structure::General).unwrap();
        let est = initial_estimates(&p, None).unwrap();
        prop_assert_eq!(est.zero_multiplicity, k);
        prop_assert_eq!(est.infinite_multiplicity, k);
        prop_assert_eq!(est.zero_multiplicity + est.infinite_multiplicity + est.finite_estimates.len(), n * d);
        prop_assert!(est.finite_estimates.iter().all(|z: &C64| z.is_finite() && z.norm() > 0.0));
    }
}
