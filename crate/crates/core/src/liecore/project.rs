use super::{combine, GroupFamily};
use crate::error::{Error, Result};
use crate::CMat;

const ALGEBRA_TOL: f64 = 1e-10;

/// `Z = n1 + a1 + u` along `𝔤_C = 𝔫₁ ⊕ 𝔞₁ ⊕ 𝔲`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraProjection {
    pub n1: CMat,
    pub a1: CMat,
    pub u: CMat,
}

impl AlgebraProjection {
    /// The `𝔟₁ = 𝔞₁ ⊕ 𝔫₁` part.
    pub fn b1(&self) -> CMat {
        &self.n1 + &self.a1
    }
}

/// Splits `z ∈ 𝔤_C` by one least-squares solve in the concatenated real
/// basis of `𝔫₁`, `𝔞₁` and `𝔲`.
pub fn iwasawa_project_algebra(fam: &GroupFamily, z: &CMat) -> Result<AlgebraProjection> {
    let Some(ls) = fam.projector() else {
        return Err(Error::UnsupportedFamily(format!("{} is not complexified", fam.id)));
    };
    let n = fam.rep_dim;
    if z.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("expected {n}x{n}, got {:?}", z.shape())));
    }
    let (coef, resid) = ls.solve(&z.realify());
    if resid > ALGEBRA_TOL * z.max_abs().max(1.0) {
        return Err(Error::NotInAlgebra(resid));
    }
    let nil = fam.nilpotent_basis();
    let a1 = fam.basis_a1();
    let (cn, rest) = coef.split_at(nil.len());
    let (ca, cu) = rest.split_at(a1.len());
    Ok(AlgebraProjection { n1: combine(nil, cn, n), a1: combine(&a1, ca, n), u: combine(fam.compact_basis(), cu, n) })
}
