//! Dense small-matrix kernel: matrices, factorizations, exp/log, SVD.

mod expm;
mod factor;
mod mat;
mod scalar;
mod svd;

pub use expm::{log_upper_triangular, mat_exp, mat_log_triangular_positive, sqrt_upper_triangular};
pub use factor::{
    cholesky_hermitian, cholesky_hermitian_with_cutoff, det, householder_qr, inverse, lu, lu_with_cutoff, rq_factor,
    rq_factor_with_cutoff, solve_linear, solve_upper_triangular, LeastSquares, Lu, Qr, SINGULAR_CUTOFF,
};
pub use mat::{format_complex, rows_serde, rows_vec_serde, Mat, Tolerance};
pub use scalar::{real, Real, Scalar};
pub use svd::{column_space, null_space, rank, singular_values, svd, symmetric_eigen, Svd};
