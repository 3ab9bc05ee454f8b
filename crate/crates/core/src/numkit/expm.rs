//! Matrix exponential and the logarithm of triangular matrices.

use num_traits::{Float, One, ToPrimitive, Zero};

use super::factor::{solve_linear, solve_upper_triangular};
use super::mat::Mat;
use super::scalar::{real, Scalar};
use crate::error::{Error, Result};

const PADE6: [f64; 7] = [
    1.0,
    0.5,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

/// `exp(a)` by [6/6] Padé approximation with scaling and squaring.
pub fn mat_exp<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    assert!(a.is_square(), "mat_exp needs a square matrix");
    let n = a.rows();
    let norm = a.norm_fro();
    let mut s = 0i32;
    let half: S::Real = real(0.5);
    if norm > half {
        s = (norm / half).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let scaled = a.scale_real(real::<S::Real>(2f64.powi(-s)));

    let mut powers = vec![Mat::<S>::identity(n), scaled.clone()];
    for k in 2..=6 {
        let next = &powers[k - 1] * &scaled;
        powers.push(next);
    }
    let mut num = Mat::<S>::zeros(n, n);
    let mut den = Mat::<S>::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        let c = p.scale_real(real(PADE6[k]));
        num += &c;
        if k % 2 == 0 {
            den += &c;
        } else {
            den -= &c;
        }
    }
    // den is within 0.5 of the identity in norm, hence invertible.
    let mut r = solve_linear(&den, &num).expect("Padé denominator is invertible");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Principal square root of an upper-triangular matrix whose diagonal has
/// no entries on the closed negative real axis.
pub fn sqrt_upper_triangular<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    let n = a.rows();
    let mut r = Mat::<S>::zeros(n, n);
    for i in 0..n {
        r[(i, i)] = a[(i, i)].principal_sqrt();
    }
    for d in 1..n {
        for i in 0..(n - d) {
            let j = i + d;
            let mut acc = a[(i, j)];
            for k in (i + 1)..j {
                acc -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = acc / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

/// Principal logarithm of an upper-triangular matrix with diagonal entries
/// off the closed negative real axis, by inverse scaling and squaring.
pub fn log_upper_triangular<S: Scalar>(a: &Mat<S>) -> Result<Mat<S>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("log needs a square matrix, got {:?}", a.shape())));
    }
    let tol: S::Real = real(1e-12);
    if !a.is_upper_triangular(tol * a.max_abs().max(S::Real::one())) {
        return Err(Error::DomainError("matrix is not upper triangular".into()));
    }
    for i in 0..n {
        let d = a[(i, i)];
        if d.modulus() == S::Real::zero() || (d.im() == S::Real::zero() && d.re() < S::Real::zero()) {
            return Err(Error::DomainError("diagonal entry on the closed negative real axis".into()));
        }
    }
    let mut t = Mat::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { S::zero() });
    let id = Mat::<S>::identity(n);
    let mut k = 0u32;
    let quarter: S::Real = real(0.25);
    while (&t - &id).max_abs() > quarter {
        if k > 60 {
            return Err(Error::DomainError("square root iteration did not converge".into()));
        }
        t = sqrt_upper_triangular(&t);
        k += 1;
    }
    // log(T) = 2 atanh(Z), Z = (T - I)(T + I)^{-1}; T + I is triangular with
    // diagonal near 2 and commutes with T - I.
    let tm = &t - &id;
    let tp = &t + &id;
    let z = solve_upper_triangular(&tp, &tm);
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = z.clone();
    let eps = S::Real::epsilon();
    for m in 1..200 {
        term = &term * &z2;
        let contrib = term.scale_real(real::<S::Real>(1.0 / (2 * m + 1) as f64));
        sum += &contrib;
        if contrib.max_abs() <= eps * sum.max_abs().max(eps) {
            break;
        }
    }
    Ok(sum.scale_real(real::<S::Real>(2f64.powi(k as i32 + 1))))
}

/// Logarithm of an upper-triangular matrix with positive real diagonal.
pub fn mat_log_triangular_positive<S: Scalar>(a: &Mat<S>) -> Result<Mat<S>> {
    for (i, d) in a.diagonal().into_iter().enumerate() {
        if d.im() != S::Real::zero() || d.re() <= S::Real::zero() {
            return Err(Error::DomainError(format!("diagonal entry {i} is not positive real")));
        }
    }
    log_upper_triangular(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn exp_of_nilpotent_matches_finite_series() {
        let n = Mat::from_rows(&[[0.0, 2.0, -1.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]]).unwrap();
        let series = &(&Mat::identity(3) + &n) + &(&n * &n).scale(0.5);
        assert!(mat_exp(&n).max_abs_diff(&series) < 1e-14);
    }

    #[test]
    fn exp_of_rotation_generator() {
        let theta = 2.5f64;
        let x = Mat::from_rows(&[[0.0, -theta], [theta, 0.0]]).unwrap();
        let e = mat_exp(&x);
        let expect = Mat::from_rows(&[[theta.cos(), -theta.sin()], [theta.sin(), theta.cos()]]).unwrap();
        assert!(e.max_abs_diff(&expect) < 1e-13);
    }

    #[test]
    fn exp_of_large_diagonal() {
        let d = Mat::diag(&[Complex64::new(5.0, 1.0), Complex64::new(-3.0, 0.0)]);
        let e = mat_exp(&d);
        assert!((e[(0, 0)] - Complex64::new(5.0, 1.0).exp()).norm() < 1e-10);
        assert!((e[(1, 1)] - (-3.0f64).exp()).norm() < 1e-14);
    }

    #[test]
    fn log_inverts_exp_on_triangular() {
        let x = Mat::from_rows(&[[1.3, 0.7, -2.0], [0.0, -0.4, 1.1], [0.0, 0.0, 0.2]]).unwrap();
        let l = log_upper_triangular(&mat_exp(&x)).unwrap();
        assert!(l.max_abs_diff(&x) < 1e-12);
    }

    #[test]
    fn log_rejects_negative_diagonal() {
        let a = Mat::diag(&[1.0, -2.0]);
        assert!(matches!(log_upper_triangular(&a), Err(Error::DomainError(_))));
    }

    #[test]
    fn log_of_diagonal_exponential() {
        let e = mat_exp(&Mat::diag(&[1.0, -1.0]));
        assert!((e[(0, 0)] - std::f64::consts::E).abs() < 1e-14);
        let l = mat_log_triangular_positive(&e).unwrap();
        assert!(l.max_abs_diff(&Mat::diag(&[1.0, -1.0])) < 1e-14);
    }

    #[test]
    fn log_of_unipotent_matches_finite_series() {
        let n = Mat::from_rows(&[
            [0.0, 0.3, -1.2, 0.5],
            [0.0, 0.0, 2.0, 0.7],
            [0.0, 0.0, 0.0, -0.4],
            [0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let id = Mat::identity(4);
        let n2 = &n * &n;
        let n3 = &n2 * &n;
        let exp_series = &(&(&id + &n) + &n2.scale(0.5)) + &n3.scale(1.0 / 6.0);
        assert!(mat_exp(&n).max_abs_diff(&exp_series) < 1e-13);
        let l = mat_log_triangular_positive(&exp_series).unwrap();
        assert!(l.max_abs_diff(&n) < 1e-12);
    }

    #[test]
    fn log_rejects_complex_diagonal() {
        let a = Mat::diag(&[Complex64::new(1.0, 0.5)]);
        assert!(mat_log_triangular_positive(&a).is_err());
        assert!(log_upper_triangular(&a).is_ok());
    }

    #[test]
    fn sqrt_squares_back() {
        let a = Mat::from_rows(&[[4.0, 1.0], [0.0, 9.0]]).unwrap();
        let r = sqrt_upper_triangular(&a);
        assert!((&r * &r).max_abs_diff(&a) < 1e-14);
    }
}
