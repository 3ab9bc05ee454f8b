//! Group-level Iwasawa factorization `g = n a t k` and the projection
//! `log ã(g)`.
//!
//! In the adapted basis the group `N A` (resp. `N₁ A exp(i𝔱₁)`) consists of
//! upper triangular matrices with positive diagonal, so the factor `b = n a t`
//! is the upper Cholesky factor of `g g^*` and `k = b⁻¹ g`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liecore::{trace_form, GroupFamily};
use crate::numkit::{cholesky_hermitian, inverse, mat_exp};
use crate::CMat;

/// Inputs with Frobenius norm above this are rejected before squaring.
pub const MAX_INPUT_NORM: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaFactors {
    /// Unipotent factor in `N` (resp. `N₁`).
    pub n: CMat,
    /// `exp(H)` with `H ∈ 𝔞`.
    pub a: CMat,
    /// `exp(iT)` with `T ∈ 𝔱₁`; the identity for real families.
    pub t: CMat,
    /// Factor in `K` (resp. `U`).
    pub k: CMat,
    /// `H` in `basis_a` coordinates.
    pub log_a: Vec<f64>,
    /// `T` in `basis_t1` coordinates; empty for real families.
    pub t1_part: Vec<f64>,
}

impl IwasawaFactors {
    /// `n a t`.
    pub fn b(&self) -> CMat {
        &(&self.n * &self.a) * &self.t
    }

    pub fn product(&self) -> CMat {
        &self.b() * &self.k
    }
}

pub fn iwasawa_factor(fam: &GroupFamily, g: &CMat) -> Result<IwasawaFactors> {
    let norm = g.norm_fro();
    if norm > MAX_INPUT_NORM {
        return Err(Error::NormTooLarge(norm));
    }
    fam.check_in_group(g)?;
    let c = &fam.adapted_change;
    let ci = c.adjoint();
    let gp = &(&ci * g) * c;
    let b = cholesky_hermitian(&(&gp * &gp.adjoint()))?;
    let n = fam.rep_dim;

    let log_diag = CMat::diag(&b.diagonal().iter().map(|d| Complex64::new(d.re.ln(), 0.0)).collect::<Vec<_>>());
    let h1 = &(c * &log_diag) * &ci;
    let log_a: Vec<f64> = fam.basis_a.iter().map(|h| trace_form(h, &h1)).collect();
    let t1_part: Vec<f64> = fam.basis_t1.iter().map(|t| trace_form(&t.scale(Complex64::new(0.0, 1.0)), &h1)).collect();
    let ha = fam.a_from_coords(&log_a);
    let mut ht = CMat::zeros(n, n);
    for (t, &x) in fam.basis_t1.iter().zip(&t1_part) {
        ht += &t.scale(Complex64::new(0.0, x));
    }
    let dev = (&ha + &ht).max_abs_diff(&h1);
    if dev > 1e-8 * (1.0 + h1.max_abs()) {
        return Err(Error::NotInGroup(format!("diagonal part leaves the abelian factor by {dev:e}")));
    }

    let inv_d = CMat::diag(&b.diagonal().iter().map(|d| Complex64::new(1.0 / d.re, 0.0)).collect::<Vec<_>>());
    let np = &b * &inv_d;
    let kp = &inverse(&b)? * &gp;
    Ok(IwasawaFactors {
        n: &(c * &np) * &ci,
        a: mat_exp(&ha),
        t: mat_exp(&ht),
        k: &(c * &kp) * &ci,
        log_a,
        t1_part,
    })
}

/// `log ã(g)` in `basis_a` coordinates. For complexified families the
/// `𝔱₁` component is dropped.
pub fn log_a_projection(fam: &GroupFamily, g: &CMat) -> Result<Vec<f64>> {
    Ok(iwasawa_factor(fam, g)?.log_a)
}
