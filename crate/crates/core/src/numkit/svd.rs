//! One-sided Jacobi SVD and cyclic Jacobi symmetric eigensolver.
//!
//! Both are slow in general but accurate on the small (n <= 20) matrices
//! used throughout the crate.

use num_traits::{Float, One, Zero};

use super::mat::Mat;
use super::scalar::{real, Real, Scalar};

/// `a = u * diag(s) * v^*` with singular values sorted in decreasing order.
/// For an `m x n` input, `u` is `m x k`, `v` is `n x k`, `k = min(m, n)`.
pub struct Svd<S: Scalar> {
    pub u: Mat<S>,
    pub s: Vec<S::Real>,
    pub v: Mat<S>,
}

const MAX_SWEEPS: usize = 80;

pub fn svd<S: Scalar>(a: &Mat<S>) -> Svd<S> {
    if a.rows() < a.cols() {
        let Svd { u, s, v } = svd(&a.adjoint());
        return Svd { u: v, s, v: u };
    }
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = Mat::<S>::identity(n);
    let eps = S::Real::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = S::Real::zero();
                let mut beta = S::Real::zero();
                let mut gamma = S::zero();
                for i in 0..m {
                    alpha += w[(i, p)].modulus_sqr();
                    beta += w[(i, q)].modulus_sqr();
                    gamma += w[(i, p)].conj() * w[(i, q)];
                }
                let g = gamma.modulus();
                if g == S::Real::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Remove the phase of gamma from column q, then rotate by a real angle.
                let ph = gamma.phase().conj();
                let two = S::Real::one() + S::Real::one();
                let zeta = (beta - alpha) / (two * g);
                let t = zeta.signum() / (zeta.abs() + (S::Real::one() + zeta * zeta).sqrt());
                let c = (S::Real::one() + t * t).sqrt().recip();
                let s = c * t;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)] * ph;
                    w[(i, p)] = wp.mul_real(c) - wq.mul_real(s);
                    w[(i, q)] = wp.mul_real(s) + wq.mul_real(c);
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * ph;
                    v[(i, p)] = vp.mul_real(c) - vq.mul_real(s);
                    v[(i, q)] = vp.mul_real(s) + vq.mul_real(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, S::Real)> =
        (0..n).map(|j| (j, (0..m).map(|i| w[(i, j)].modulus_sqr()).sum::<S::Real>().sqrt())).collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));

    let mut u = Mat::<S>::zeros(m, n);
    let mut vs = Mat::<S>::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        for i in 0..n {
            vs[(i, k)] = v[(i, j)];
        }
        if sigma > S::Real::zero() {
            for i in 0..m {
                u[(i, k)] = w[(i, j)].mul_real(sigma.recip());
            }
        }
    }
    Svd { u, s, v: vs }
}

pub fn singular_values<S: Scalar>(a: &Mat<S>) -> Vec<S::Real> {
    svd(a).s
}

/// Numerical rank: number of singular values above `rel_tol * s_max`
/// (and above `rel_tol` in absolute terms when `s_max < 1`).
pub fn rank<S: Scalar>(a: &Mat<S>, rel_tol: S::Real) -> usize {
    let s = singular_values(a);
    let cut = rel_tol * s.first().copied().unwrap_or_else(S::Real::zero).max(S::Real::one());
    s.iter().filter(|&&x| x > cut).count()
}

/// Orthonormal basis (as columns) of the kernel of `a`.
pub fn null_space<S: Scalar>(a: &Mat<S>, rel_tol: S::Real) -> Mat<S> {
    let n = a.cols();
    // Pad to a square matrix so that v spans the whole domain.
    let padded = if a.rows() < n {
        Mat::from_fn(n, n, |i, j| if i < a.rows() { a[(i, j)] } else { S::zero() })
    } else {
        a.clone()
    };
    let Svd { s, v, .. } = svd(&padded);
    let cut = rel_tol * s.first().copied().unwrap_or_else(S::Real::zero).max(S::Real::one());
    let keep: Vec<usize> = (0..n).filter(|&k| s[k] <= cut).collect();
    Mat::from_fn(n, keep.len(), |i, j| v[(i, keep[j])])
}

/// Orthonormal basis (as columns) of the column space of `a`.
pub fn column_space<S: Scalar>(a: &Mat<S>, rel_tol: S::Real) -> Mat<S> {
    if a.cols() == 0 {
        return Mat::zeros(a.rows(), 0);
    }
    let Svd { u, s, .. } = svd(a);
    let cut = rel_tol * s.first().copied().unwrap_or_else(S::Real::zero).max(S::Real::one());
    let keep: Vec<usize> = (0..s.len()).filter(|&k| s[k] > cut).collect();
    Mat::from_fn(a.rows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Eigen-decomposition of a real symmetric matrix, `a = q diag(w) q^T`,
/// eigenvalues in increasing order.
pub fn symmetric_eigen<R: Real>(a: &Mat<R>) -> (Vec<R>, Mat<R>) {
    assert!(a.is_square(), "symmetric_eigen needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut q = Mat::<R>::identity(n);
    let half: R = real(0.5);
    for _ in 0..MAX_SWEEPS {
        let off: R = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[(i, j)] * m[(i, j)]).sum();
        let diag: R = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= R::epsilon() * R::epsilon() * diag.max(R::min_positive_value()) {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = m[(p, r)];
                if apr == R::zero() {
                    continue;
                }
                let theta = (m[(r, r)] - m[(p, p)]) * half / apr;
                let t = theta.signum() / (theta.abs() + (R::one() + theta * theta).sqrt());
                let c = (R::one() + t * t).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkr = m[(k, r)];
                    m[(k, p)] = c * mkp - s * mkr;
                    m[(k, r)] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mrk = m[(r, k)];
                    m[(p, k)] = c * mpk - s * mrk;
                    m[(r, k)] = s * mpk + c * mrk;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let w = idx.iter().map(|&i| m[(i, i)]).collect();
    let qs = Mat::from_fn(n, n, |i, j| q[(i, idx[j])]);
    (w, qs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn svd_reconstructs_complex_rectangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (m, n) in [(5, 3), (3, 5), (4, 4)] {
            let a = Mat::from_fn(m, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
            let Svd { u, s, v } = svd(&a);
            let k = m.min(n);
            let sig = Mat::diag(&s.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()[..k]);
            let rec = &(&u.select_columns(0..k) * &sig) * &v.select_columns(0..k).adjoint();
            assert!(rec.max_abs_diff(&a) < 1e-12, "{m}x{n}");
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_and_kernels() {
        let a = Mat::from_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]]).unwrap();
        assert_eq!(rank(&a, 1e-10), 1);
        let k = null_space(&a, 1e-10);
        assert_eq!(k.cols(), 2);
        assert!((&a * &k).max_abs() < 1e-12);
        let c = column_space(&a, 1e-10);
        assert_eq!(c.cols(), 1);
        assert_eq!(null_space(&Mat::<f64>::identity(3), 1e-10).cols(), 0);
    }

    #[test]
    fn symmetric_eigen_diagonalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = Mat::from_fn(6, 6, |_, _| rng.sample::<f64, _>(StandardNormal));
        let a = &g + &g.transpose();
        let (w, q) = symmetric_eigen(&a);
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        let rec = &(&q * &Mat::diag(&w)) * &q.transpose();
        assert!(rec.max_abs_diff(&a) < 1e-12);
        assert!((&q.transpose() * &q).max_abs_diff(&Mat::identity(6)) < 1e-12);
    }
}
