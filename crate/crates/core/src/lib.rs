//! Multiple-precision polynomial root finding.
//!
//! Roots are seeded from the eigenvalues of a balanced companion matrix at a
//! low precision (or from Aberth's circle) and refined by simultaneous
//! Durand–Kerner iterations at a high precision.

use gmp_mpfr_sys as _;

pub mod dk;
pub mod eigen;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod poly;
pub mod scalar;

pub use dk::{
    aberth_init, aberth_radius, check_converged, dk2_step, dk3_step, solve, Order, RootVector, SolveConfig,
    SolveResult, Start, UpdateMode,
};
pub use eigen::{
    balance, companion_matrix, eigen_roots, hessenberg_qr_eigenvalues, CompanionMatrix, GuessSource, InitialGuessSet,
};
pub use error::{Error, Result};
pub use io::{load_polynomial, load_roots, save_polynomial, store_result, RootsFile};
pub use pipeline::{
    match_and_errors, mixed_precision_solve, reference_roots, run_benchmark, run_method, BenchConfig, BenchReport,
    BenchRow, ErrorReport, Family, Method, ProblemSpec,
};
pub use poly::{
    chebyshev_poly, limit_curve_residual, wilkinson, MonicPolynomial, PolyKind, Polynomial, Provenance, ReferenceRoots,
};
pub use scalar::{MpComplex, MpReal, Precision};
