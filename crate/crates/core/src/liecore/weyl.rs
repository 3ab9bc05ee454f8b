use serde::{Deserialize, Serialize};

use super::{make_family, restricted_roots, GroupFamily};
use crate::error::Result;
use crate::numkit::Mat;
use crate::CMat;

/// The Weyl group of the real form acting on `𝔞` coordinates. For
/// complexified families this is the group of the underlying real form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylGroup {
    #[serde(with = "crate::numkit::rows_vec_serde")]
    pub elements: Vec<Mat<f64>>,
    #[serde(skip)]
    pub representatives: Vec<CMat>,
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn act(&self, w: usize, y: &[f64]) -> Vec<f64> {
        self.elements[w].mul_vec(y)
    }

    /// Index of an element equal to `m` within `tol`.
    pub fn position(&self, m: &Mat<f64>, tol: f64) -> Option<usize> {
        self.elements.iter().position(|e| e.max_abs_diff(m) <= tol)
    }

    pub fn is_closed(&self, tol: f64) -> bool {
        self.elements.iter().all(|a| {
            self.position(&a.transpose(), tol).is_some()
                && self.elements.iter().all(|b| self.position(&(a * b), tol).is_some())
        })
    }
}

/// Builds the group from the stored representatives, keeping one
/// representative per distinct action.
pub fn weyl_group(fam: &GroupFamily) -> WeylGroup {
    let mut g = WeylGroup { elements: Vec::new(), representatives: Vec::new() };
    for k in &fam.weyl_reps {
        let w = fam.weyl_matrix(k);
        if g.position(&w, 1e-10).is_none() {
            g.elements.push(w);
            g.representatives.push(k.clone());
        }
    }
    g
}

/// Whether every element maps the real form's restricted roots onto
/// themselves.
pub fn validate_weyl_group(fam: &GroupFamily, w: &WeylGroup) -> Result<bool> {
    let real = if fam.is_complexified() { make_family(fam.id.real_form())? } else { fam.clone() };
    let roots = restricted_roots(&real)?;
    // roots are covectors; in orthonormal coordinates w acts on them by w itself
    Ok(w.elements.iter().all(|e| {
        let orth = (&e.transpose() * e).max_abs_diff(&Mat::identity(e.rows())) <= 1e-10;
        orth && roots.roots.iter().all(|r| roots.index_of(&e.mul_vec(r), 1e-8).is_some())
    }))
}
