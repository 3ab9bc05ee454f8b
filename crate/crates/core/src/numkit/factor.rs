//! Direct factorizations for small dense matrices.

use num_traits::{Float, One, Zero};

use super::mat::Mat;
use super::scalar::{real, Scalar};
use super::svd::singular_values;
use crate::error::{Error, Result};

/// Relative cutoff below which pivots / singular values count as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-13;

/// Householder QR `a = q * r` of an `m x n` matrix with `m >= n`.
///
/// `q` is the full `m x m` unitary factor and `r` is `m x n` upper
/// triangular with a real non-negative diagonal.
#[derive(Debug, Clone)]
pub struct Qr<S: Scalar> {
    pub q: Mat<S>,
    pub r: Mat<S>,
}

pub fn householder_qr<S: Scalar>(a: &Mat<S>) -> Qr<S> {
    let (m, n) = a.shape();
    assert!(m >= n, "householder_qr needs rows >= cols");
    let mut r = a.clone();
    let mut q = Mat::<S>::identity(m);
    let two = S::Real::one() + S::Real::one();

    for k in 0..n {
        let norm_x = (k..m).map(|i| r[(i, k)].modulus_sqr()).sum::<S::Real>().sqrt();
        if norm_x == S::Real::zero() {
            continue;
        }
        let alpha = -r[(k, k)].phase().mul_real(norm_x);
        let mut v: Vec<S> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|x| x.modulus_sqr()).sum::<S::Real>();
        if vnorm2 == S::Real::zero() {
            continue;
        }
        let beta = two / vnorm2;
        // r <- (I - beta v v^*) r
        for j in 0..n {
            let s: S = (k..m).map(|i| v[i - k].conj() * r[(i, j)]).sum();
            let s = s.mul_real(beta);
            for i in k..m {
                r[(i, j)] -= v[i - k] * s;
            }
        }
        // q <- q (I - beta v v^*)
        for i in 0..m {
            let s: S = (k..m).map(|l| q[(i, l)] * v[l - k]).sum();
            let s = s.mul_real(beta);
            for l in k..m {
                q[(i, l)] -= s * v[l - k].conj();
            }
        }
    }
    for i in 0..m {
        for j in 0..i.min(n) {
            r[(i, j)] = S::zero();
        }
    }
    // Make diag(r) real non-negative: r <- D^* r, q <- q D.
    for k in 0..n.min(m) {
        let ph = r[(k, k)].phase();
        if ph == S::one() {
            continue;
        }
        for j in 0..n {
            r[(k, j)] = ph.conj() * r[(k, j)];
        }
        r[(k, k)] = S::from_real(r[(k, k)].re());
        for i in 0..m {
            q[(i, k)] *= ph;
        }
    }
    Qr { q, r }
}

fn check_square<S: Scalar>(a: &Mat<S>, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{what} needs a square matrix, got {:?}", a.shape())));
    }
    Ok(())
}

/// Row-reversal of a matrix (multiplication by the anti-identity from the left).
fn flip_rows<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    let n = a.rows();
    Mat::from_fn(n, a.cols(), |i, j| a[(n - 1 - i, j)])
}

/// RQ factorization `g = r * q` with `r` upper triangular with positive real
/// diagonal and `q` orthogonal / unitary.
///
/// Computed from the QR factorization of `(P g)^*`, `P` the anti-identity.
pub fn rq_factor<S: Scalar>(g: &Mat<S>) -> Result<(Mat<S>, Mat<S>)> {
    rq_factor_with_cutoff(g, real(SINGULAR_CUTOFF))
}

pub fn rq_factor_with_cutoff<S: Scalar>(g: &Mat<S>, cutoff: S::Real) -> Result<(Mat<S>, Mat<S>)> {
    check_square(g, "rq_factor")?;
    let n = g.rows();
    let sv = singular_values(g);
    let smax = sv.first().copied().unwrap_or_else(S::Real::zero);
    let smin = sv.last().copied().unwrap_or_else(S::Real::zero);
    if n == 0 || !(smin > cutoff * smax) {
        return Err(Error::SingularInput(format!("smallest singular value {smin:e} vs largest {smax:e}")));
    }
    // g^* P = Q1 R1  =>  g = (P R1^* P) (P Q1^*)
    let b = flip_rows(g).adjoint();
    let Qr { q: q1, r: r1 } = householder_qr(&b);
    let r1h = r1.adjoint();
    let r = Mat::from_fn(n, n, |i, j| r1h[(n - 1 - i, n - 1 - j)]);
    let q = flip_rows(&q1.adjoint());
    Ok((r, q))
}

/// Upper-triangular Cholesky factor: `p = b * b^*` with `b` upper triangular
/// and positive real diagonal.
pub fn cholesky_hermitian<S: Scalar>(p: &Mat<S>) -> Result<Mat<S>> {
    cholesky_hermitian_with_cutoff(p, real(SINGULAR_CUTOFF))
}

pub fn cholesky_hermitian_with_cutoff<S: Scalar>(p: &Mat<S>, cutoff: S::Real) -> Result<Mat<S>> {
    check_square(p, "cholesky_hermitian")?;
    let n = p.rows();
    let scale = p.max_abs();
    let herm_dev = p.max_abs_diff(&p.adjoint());
    if herm_dev > real::<S::Real>(1e-10) * scale.max(S::Real::one()) {
        return Err(Error::NotPositiveDefinite(format!("input is not Hermitian (deviation {herm_dev:e})")));
    }
    let mut b = Mat::<S>::zeros(n, n);
    for j in (0..n).rev() {
        let mut d = p[(j, j)].re();
        for k in (j + 1)..n {
            d -= b[(j, k)].modulus_sqr();
        }
        if !(d > cutoff * scale) {
            return Err(Error::NotPositiveDefinite(format!("pivot {d:e} at index {j}")));
        }
        let djj = d.sqrt();
        b[(j, j)] = S::from_real(djj);
        for i in 0..j {
            let mut s = p[(i, j)];
            for k in (j + 1)..n {
                s -= b[(i, k)] * b[(j, k)].conj();
            }
            b[(i, j)] = s.mul_real(djj.recip());
        }
    }
    Ok(b)
}

/// LU factorization with partial pivoting, `P a = L U`, stored compactly.
pub struct Lu<S: Scalar> {
    lu: Mat<S>,
    perm: Vec<usize>,
    sign_flips: usize,
}

pub fn lu<S: Scalar>(a: &Mat<S>) -> Result<Lu<S>> {
    lu_with_cutoff(a, real(SINGULAR_CUTOFF))
}

pub fn lu_with_cutoff<S: Scalar>(a: &Mat<S>, cutoff: S::Real) -> Result<Lu<S>> {
    check_square(a, "lu")?;
    let n = a.rows();
    let scale = a.max_abs();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign_flips = 0;
    for k in 0..n {
        let (piv, pval) = (k..n)
            .map(|i| (i, lu[(i, k)].modulus()))
            .fold((k, S::Real::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pval > cutoff * scale) {
            return Err(Error::SingularInput(format!("pivot {pval:e} at column {k}")));
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            perm.swap(k, piv);
            sign_flips += 1;
        }
        let inv = S::one() / lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] * inv;
            lu[(i, k)] = f;
            if f != S::zero() {
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
    }
    Ok(Lu { lu, perm, sign_flips })
}

impl<S: Scalar> Lu<S> {
    pub fn solve(&self, rhs: &Mat<S>) -> Result<Mat<S>> {
        let n = self.lu.rows();
        if rhs.rows() != n {
            return Err(Error::DimensionMismatch(format!("rhs has {} rows, expected {n}", rhs.rows())));
        }
        let m = rhs.cols();
        let mut x = Mat::from_fn(n, m, |i, j| rhs[(self.perm[i], j)]);
        for c in 0..m {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn det(&self) -> S {
        let d: S = (0..self.lu.rows()).fold(S::one(), |acc, i| acc * self.lu[(i, i)]);
        if self.sign_flips % 2 == 1 {
            -d
        } else {
            d
        }
    }
}

/// Solves `a x = rhs` for square invertible `a`.
pub fn solve_linear<S: Scalar>(a: &Mat<S>, rhs: &Mat<S>) -> Result<Mat<S>> {
    lu(a)?.solve(rhs)
}

pub fn inverse<S: Scalar>(a: &Mat<S>) -> Result<Mat<S>> {
    lu(a)?.solve(&Mat::identity(a.rows()))
}

/// Determinant; zero for numerically singular input.
pub fn det<S: Scalar>(a: &Mat<S>) -> Result<S> {
    check_square(a, "det")?;
    match lu_with_cutoff(a, S::Real::zero()) {
        Ok(f) => Ok(f.det()),
        Err(Error::SingularInput(_)) => Ok(S::zero()),
        Err(e) => Err(e),
    }
}

/// Solves `b = a x` for `x` for an upper-triangular `a` with non-zero diagonal.
pub fn solve_upper_triangular<S: Scalar>(a: &Mat<S>, rhs: &Mat<S>) -> Mat<S> {
    let n = a.rows();
    let m = rhs.cols();
    let mut x = rhs.clone();
    for c in 0..m {
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in (i + 1)..n {
                s -= a[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / a[(i, i)];
        }
    }
    x
}

/// Least-squares solution of an overdetermined system with full column rank.
#[derive(Debug, Clone)]
pub struct LeastSquares<S: Scalar> {
    qr: Qr<S>,
    cols: usize,
}

impl<S: Scalar> LeastSquares<S> {
    pub fn new(a: &Mat<S>) -> Result<Self> {
        let (m, n) = a.shape();
        if m < n {
            return Err(Error::DimensionMismatch(format!("least squares needs rows >= cols, got {m}x{n}")));
        }
        let qr = householder_qr(a);
        let scale = (0..n).map(|i| qr.r[(i, i)].modulus()).fold(S::Real::zero(), S::Real::max);
        for i in 0..n {
            if !(qr.r[(i, i)].modulus() > real::<S::Real>(SINGULAR_CUTOFF) * scale) {
                return Err(Error::SingularInput(format!("column {i} is linearly dependent")));
            }
        }
        Ok(Self { qr, cols: n })
    }

    /// Returns the minimizer and the Euclidean residual norm.
    pub fn solve(&self, b: &[S]) -> (Vec<S>, S::Real) {
        let qtb = self.qr.q.adjoint().mul_vec(b);
        let n = self.cols;
        let mut x = vec![S::zero(); n];
        for i in (0..n).rev() {
            let mut s = qtb[i];
            for k in (i + 1)..n {
                s -= self.qr.r[(i, k)] * x[k];
            }
            x[i] = s / self.qr.r[(i, i)];
        }
        let resid = qtb[n..].iter().map(|v| v.modulus_sqr()).sum::<S::Real>().sqrt();
        (x, resid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Tolerance;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gauss(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
        Mat::from_fn(n, m, |_, _| rng.sample(StandardNormal))
    }

    fn cgauss(n: usize, rng: &mut ChaCha8Rng) -> Mat<Complex64> {
        Mat::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    }

    #[test]
    fn rq_identity_and_diagonal() {
        let (r, q) = rq_factor(&Mat::<f64>::identity(3)).unwrap();
        assert!(r.approx_eq(&Mat::identity(3), Tolerance::default()));
        assert!(q.approx_eq(&Mat::identity(3), Tolerance::default()));
        let g = Mat::diag(&[2.0, 0.5]);
        let (r, q) = rq_factor(&g).unwrap();
        assert!(r.approx_eq(&g, Tolerance::default()));
        assert!(q.approx_eq(&Mat::identity(2), Tolerance::default()));
    }

    #[test]
    fn rq_random_roundtrip_real_and_complex() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = gauss(4, 4, &mut rng);
            let (r, q) = rq_factor(&g).unwrap();
            assert!(r.is_upper_triangular(0.0));
            assert!(r.diagonal().iter().all(|&d| d > 0.0));
            assert!((&r * &q - g.clone()).norm_fro() <= 1e-12 * g.norm_fro());
            assert!((&q * &q.transpose() - Mat::identity(4)).norm_fro() <= 1e-12);

            let gc = cgauss(5, &mut rng);
            let (r, q) = rq_factor(&gc).unwrap();
            assert!(r.diagonal().iter().all(|d| d.im == 0.0 && d.re > 0.0));
            assert!((&r * &q - gc.clone()).norm_fro() <= 1e-12 * gc.norm_fro());
            assert!((&q * &q.adjoint() - Mat::identity(5)).norm_fro() <= 1e-12);
        }
    }

    #[test]
    fn rq_rejects_singular() {
        let g = Mat::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(rq_factor(&g), Err(Error::SingularInput(_))));
        assert!(matches!(rq_factor(&Mat::<f64>::zeros(2, 3)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn cholesky_cases() {
        let b = cholesky_hermitian(&Mat::<f64>::identity(3)).unwrap();
        assert!(b.approx_eq(&Mat::identity(3), Tolerance::default()));
        let b = cholesky_hermitian(&Mat::diag(&[4.0, 9.0])).unwrap();
        assert!(b.approx_eq(&Mat::diag(&[2.0, 3.0]), Tolerance::default()));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = cgauss(4, &mut rng);
        let p = &g * &g.adjoint();
        let b = cholesky_hermitian(&p).unwrap();
        assert!(b.is_upper_triangular(0.0));
        assert!((&b * &b.adjoint()).approx_eq(&p, Tolerance::default()));
        // uniqueness: refactor b b^*
        let b2 = cholesky_hermitian(&(&b * &b.adjoint())).unwrap();
        assert!(b2.max_abs_diff(&b) <= 1e-10);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let p = Mat::diag(&[1.0, -1.0]);
        assert!(matches!(cholesky_hermitian(&p), Err(Error::NotPositiveDefinite(_))));
        let p = Mat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(cholesky_hermitian(&p), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn solve_cases() {
        let rhs = Mat::from_rows(&[[3.0], [-1.0]]).unwrap();
        assert_eq!(solve_linear(&Mat::identity(2), &rhs).unwrap(), rhs);
        let x = solve_linear(&Mat::diag(&[2.0, 4.0]), &Mat::from_rows(&[[2.0], [4.0]]).unwrap()).unwrap();
        assert!(x.approx_eq(&Mat::from_rows(&[[1.0], [1.0]]).unwrap(), Tolerance::default()));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = &gauss(6, 6, &mut rng) + 6.0;
        let b = gauss(6, 2, &mut rng);
        let x = solve_linear(&a, &b).unwrap();
        assert!((&a * &x - b.clone()).max_abs() <= 1e-12 * b.max_abs().max(1.0));
        assert!(matches!(solve_linear(&Mat::<f64>::zeros(2, 2), &rhs), Err(Error::SingularInput(_))));
    }

    #[test]
    fn det_matches_product_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = cgauss(4, &mut rng);
        let b = cgauss(4, &mut rng);
        let lhs = det(&(&a * &b)).unwrap();
        let rhs = det(&a).unwrap() * det(&b).unwrap();
        assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
        assert_eq!(det(&Mat::<f64>::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn least_squares_recovers_consistent_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = gauss(10, 4, &mut rng);
        let x0 = vec![1.0, -2.0, 0.5, 3.0];
        let b = a.mul_vec(&x0);
        let ls = LeastSquares::new(&a).unwrap();
        let (x, res) = ls.solve(&b);
        assert!(res < 1e-12);
        for (u, v) in x.iter().zip(&x0) {
            assert!((u - v).abs() < 1e-12);
        }
        let dep = Mat::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
        assert!(LeastSquares::new(&dep).is_err());
    }
}
