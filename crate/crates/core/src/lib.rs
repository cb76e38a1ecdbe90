//! Eigenvalues and eigenvectors of matrix polynomials by Laguerre iteration.
//!
//! A regular `n x n` matrix polynomial `P(λ) = Σ λ^i A_i` of degree `d` has
//! exactly `nd` eigenvalues on the extended complex plane. This crate computes
//! all of them one at a time with Laguerre's method, using the trace identities
//! `p'/p = tr(P⁻¹P')` and `-(p'/p)' = tr((P⁻¹P')² - P⁻¹P'')` instead of the
//! determinant itself. Zero and infinite eigenvalues are found up front by a
//! rank-revealing factorization of `A_0` and `A_d`, and starting points for the
//! finite ones come from roots of quadratic forms `q* P(λ) q`.
//!
//! Upper Hessenberg and tridiagonal problems take a structured path based on
//! Hyman's method; scalar polynomials (`n = 1`) have their own root finder.
//!
//! ```
//! use num_complex::Complex64 as C64;
//! use polyeig::{solve, CMatrix, MatrixPolynomial, SolveOptions, Structure};
//!
//! // λ² I - I, eigenvalues ±1 (each twice).
//! let a0 = CMatrix::identity(2).scaled(C64::new(-1.0, 0.0));
//! let a1 = CMatrix::zeros(2, 2);
//! let a2 = CMatrix::identity(2);
//! let p = MatrixPolynomial::new(vec![a0, a1, a2], Structure::General).unwrap();
//! let out = solve(&p, &SolveOptions::default()).unwrap();
//! assert_eq!(out.results.len(), 4);
//! ```

pub mod bounds;
pub mod dense;
mod driver;
pub mod error;
pub mod hyman;
pub mod laguerre;
pub mod matrix;
pub mod metrics;
pub mod poly;
pub mod prep;
pub mod qr;
pub mod scalar;

pub use num_complex::Complex64 as C64;

pub use bounds::{pellet_bounds, PelletBounds};
pub use dense::solve_dense;
pub use driver::{
    EigenKind, EigenResult, Eigenvalue, IterationState, SolveOptions, SolveOutcome, SolveStats,
    StopStatus,
};
pub use error::PolyError;
pub use hyman::solve_structured;
pub use matrix::CMatrix;
pub use metrics::{Condition, ErrorReport};
pub use poly::{MatrixPolynomial, Structure, Weights};
pub use scalar::ScalarPolynomial;

/// Unit roundoff of IEEE double precision, `2^-53`.
pub const EPS: f64 = f64::EPSILON / 2.0;

/// Solve the eigenproblem of `p`, picking the engine from its structure tag.
///
/// General problems go through the dense engine, Hessenberg and tridiagonal
/// ones through the Hyman engine, and scalar ones through the scalar root
/// finder. Every path returns exactly `nd` results.
pub fn solve(p: &MatrixPolynomial, opts: &SolveOptions) -> Result<SolveOutcome, PolyError> {
    match p.structure() {
        Structure::General => solve_dense(p, opts),
        Structure::Hessenberg | Structure::Tridiagonal => solve_structured(p, opts),
        Structure::Scalar => driver::solve_scalar_problem(p, opts),
    }
}
