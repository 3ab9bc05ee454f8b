//! Haar sampling on the compact factors and random group elements.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::liecore::{FamilyId, GroupFamily};
use crate::numkit::{det, householder_qr, mat_exp};
use crate::CMat;

/// Generator for sample `index` of a run seeded with `seed`; independent of
/// how samples are spread over threads.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(n: usize, complex: bool, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
        Complex64::new(re, im)
    })
}

/// Haar-distributed element of `SO(n)`, as a complex matrix with zero
/// imaginary part.
pub fn haar_special_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    // r has a nonnegative diagonal, which makes q Haar on O(n)
    let mut q = householder_qr(&gaussian(n, false, rng)).q;
    if det(&q).map(|d| d.re < 0.0).unwrap_or(false) {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Haar-distributed element of `SU(n)`.
pub fn haar_special_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let q = householder_qr(&gaussian(n, true, rng)).q;
    let d = det(&q).unwrap_or(Complex64::new(1.0, 0.0));
    q.scale(d.powf(-1.0 / n as f64))
}

/// Haar sample of `K` (real families) or `U` (complexified families).
pub fn compact_element(fam: &GroupFamily, rng: &mut ChaCha8Rng) -> CMat {
    match fam.id {
        FamilyId::SlR(n) => haar_special_orthogonal(n, rng),
        FamilyId::SlC(n) => haar_special_unitary(n, rng),
        FamilyId::So1n(n) => {
            let r = haar_special_orthogonal(n, rng);
            let mut k = CMat::identity(n + 1);
            for i in 0..n {
                for j in 0..n {
                    k[(i + 1, j + 1)] = r[(i, j)];
                }
            }
            k
        }
        FamilyId::So5C => {
            // U = D SO(5) D⁻¹ with D = diag(i, 1, 1, 1, 1)
            let mut k = haar_special_orthogonal(5, rng);
            let i = Complex64::new(0.0, 1.0);
            for j in 1..5 {
                k[(0, j)] *= i;
                k[(j, 0)] *= -i;
            }
            k
        }
    }
}

/// `exp(X)` for `X` uniform in direction over the algebra's real basis with
/// `‖X‖_F ≤ max_norm`.
pub fn group_element(fam: &GroupFamily, max_norm: f64, rng: &mut ChaCha8Rng) -> CMat {
    let basis = fam.algebra_basis();
    let x = random_combination(&basis, fam.rep_dim, rng);
    let nrm = x.norm_fro();
    let r = max_norm * rng.random::<f64>();
    mat_exp(&x.scale_real(r / nrm.max(f64::MIN_POSITIVE)))
}

/// `exp(Z)` for a random `Z` in the nilpotent factor with coefficients in `[-1, 1]`.
pub fn nilpotent_element(fam: &GroupFamily, rng: &mut ChaCha8Rng) -> CMat {
    mat_exp(&random_combination(fam.nilpotent_basis(), fam.rep_dim, rng))
}

/// Random element of the compact algebra with coefficients in `[-1, 1]`.
pub fn compact_algebra_element(fam: &GroupFamily, rng: &mut ChaCha8Rng) -> CMat {
    random_combination(fam.compact_basis(), fam.rep_dim, rng)
}

fn random_combination(basis: &[CMat], n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut x = CMat::zeros(n, n);
    for b in basis {
        x += &b.scale_real(rng.random_range(-1.0..1.0));
    }
    x
}
