use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{expand_real, real_span_basis, GroupFamily};
use crate::error::{Error, Result};
use crate::numkit::{symmetric_eigen, Mat};
use crate::CMat;

const GENERIC_SEED: u64 = 0x5eed_0f_a11;
const MAX_RETRIES: usize = 10;
const CLUSTER_TOL: f64 = 1e-7;

/// Restricted roots with respect to the maximal abelian subalgebra of the
/// group's noncompact part: `𝔞` for real families, `𝔞₁ = 𝔞 + i𝔱₁` for
/// complexified ones. Roots are coordinate vectors in `basis_a` (resp.
/// `basis_a1()`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootDatum {
    pub rank: usize,
    pub roots: Vec<Vec<f64>>,
    pub multiplicities: Vec<usize>,
    /// Indices into `roots`.
    pub positive: Vec<usize>,
    /// Indices into `roots`.
    pub simple: Vec<usize>,
    /// Dimension of the centralizer of the abelian subalgebra in the
    /// compact algebra.
    pub dim_m: usize,
    pub dim_g: usize,
}

impl RootDatum {
    pub fn index_of(&self, alpha: &[f64], tol: f64) -> Option<usize> {
        self.roots.iter().position(|r| r.iter().zip(alpha).all(|(a, b)| (a - b).abs() <= tol))
    }

    pub fn bookkeeping_holds(&self) -> bool {
        self.dim_g == self.rank + self.dim_m + self.multiplicities.iter().sum::<usize>()
    }
}

/// `ad(H)` on an orthonormal real basis of the algebra (for `Re tr(X^*Y)`),
/// which is symmetric because `H` is Hermitian.
fn ad_matrix(h: &CMat, basis: &[CMat]) -> Mat<f64> {
    let imgs: Vec<CMat> = basis.iter().map(|x| h.commutator(x)).collect();
    Mat::from_fn(basis.len(), basis.len(), |i, j| basis[i].real_inner(&imgs[j]))
}

fn cluster(values: &[f64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (values[*g.last().unwrap()] - v).abs() <= CLUSTER_TOL * (1.0 + v.abs()) => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

pub fn restricted_roots(fam: &GroupFamily) -> Result<RootDatum> {
    let abelian = fam.basis_a1();
    let r = abelian.len();
    let basis = real_span_basis(&fam.algebra_basis());
    let dim_g = basis.len();
    let ads: Vec<Mat<f64>> = abelian.iter().map(|h| ad_matrix(h, &basis)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(GENERIC_SEED);

    'retry: for _ in 0..MAX_RETRIES {
        let coef: Vec<f64> = (0..r).map(|_| rng.random_range(1..=97) as f64).collect();
        let mut ad_h = Mat::zeros(dim_g, dim_g);
        for (a, &c) in ads.iter().zip(&coef) {
            ad_h += &a.scale(c);
        }
        let (vals, vecs) = symmetric_eigen(&ad_h);
        let mut roots = Vec::new();
        let mut mults = Vec::new();
        let mut spaces: Vec<Vec<CMat>> = Vec::new();
        let mut dim_zero = 0;
        for g in cluster(&vals) {
            let cols: Vec<Vec<f64>> = g.iter().map(|&i| vecs.column(i)).collect();
            // every ad(h_k) must act by one scalar on a generic eigenspace
            let mut alpha = Vec::with_capacity(r);
            for a in &ads {
                let v0 = &cols[0];
                let av0 = a.mul_vec(v0);
                let lam: f64 = v0.iter().zip(&av0).map(|(x, y)| x * y).sum();
                for v in &cols {
                    let av = a.mul_vec(v);
                    let dev = av.iter().zip(v).map(|(x, y)| (x - lam * y).abs()).fold(0.0, f64::max);
                    if dev > 1e-8 * (1.0 + lam.abs()) {
                        continue 'retry;
                    }
                }
                alpha.push(lam);
            }
            if alpha.iter().all(|x| x.abs() < 1e-9) {
                dim_zero += g.len();
                continue;
            }
            let elems = cols
                .iter()
                .map(|c| {
                    let mut m = CMat::zeros(fam.rep_dim, fam.rep_dim);
                    for (b, &x) in basis.iter().zip(c) {
                        m += &b.scale_real(x);
                    }
                    m
                })
                .collect();
            roots.push(alpha);
            mults.push(g.len());
            spaces.push(elems);
        }
        let dim_m = dim_zero - r;
        let nil = fam.nilpotent_basis();
        let mut positive = Vec::new();
        for (i, sp) in spaces.iter().enumerate() {
            let inside = sp.iter().all(|x| expand_real(nil, x).map(|(_, res)| res < 1e-9).unwrap_or(false));
            if inside {
                positive.push(i);
            }
        }
        let simple = positive
            .iter()
            .copied()
            .filter(|&i| {
                !positive.iter().any(|&j| {
                    positive.iter().any(|&k| {
                        roots[j].iter().zip(&roots[k]).zip(&roots[i]).all(|((a, b), c)| (a + b - c).abs() < 1e-8)
                    })
                })
            })
            .collect();
        return Ok(RootDatum { rank: r, roots, multiplicities: mults, positive, simple, dim_m, dim_g });
    }
    Err(Error::GenericityFailure(MAX_RETRIES))
}

#[cfg(test)]
mod tests {
    use super::super::{make_family, FamilyId};
    use super::*;

    fn datum(id: FamilyId) -> RootDatum {
        restricted_roots(&make_family(id).unwrap()).unwrap()
    }

    #[test]
    fn sl2r_has_two_roots() {
        let d = datum(FamilyId::SlR(2));
        assert_eq!(d.roots.len(), 2);
        assert_eq!(d.multiplicities, vec![1, 1]);
        // α(diag(1,-1)) = 2
        let mut vals: Vec<f64> = d.roots.iter().map(|r| r[0]).collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] + 2.0).abs() < 1e-10 && (vals[1] - 2.0).abs() < 1e-10);
        assert_eq!(d.positive.len(), 1);
        assert!(d.roots[d.positive[0]][0] > 0.0);
    }

    #[test]
    fn so14_has_multiplicity_three() {
        let d = datum(FamilyId::So1n(4));
        assert_eq!(d.dim_g, 10);
        assert_eq!(d.multiplicities, vec![3, 3]);
        assert_eq!(d.dim_m, 3);
        assert!(d.bookkeeping_holds());
    }

    #[test]
    fn sl3r_is_a2() {
        let d = datum(FamilyId::SlR(3));
        assert_eq!(d.roots.len(), 6);
        assert!(d.multiplicities.iter().all(|&m| m == 1));
        assert_eq!(d.positive.len(), 3);
        assert_eq!(d.simple.len(), 2);
        // all roots have the same length in an orthonormal basis of 𝔞
        for r in &d.roots {
            assert!((r[0].hypot(r[1]) - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn all_families_satisfy_root_axioms() {
        for id in FamilyId::ALL {
            let d = datum(id);
            assert!(d.bookkeeping_holds(), "{id}");
            for r in &d.roots {
                let neg: Vec<f64> = r.iter().map(|x| -x).collect();
                assert!(d.index_of(&neg, 1e-8).is_some(), "{id}");
            }
            assert_eq!(2 * d.positive.len(), d.roots.len(), "{id}");
            for &i in &d.positive {
                let neg: Vec<f64> = d.roots[i].iter().map(|x| -x).collect();
                let j = d.index_of(&neg, 1e-8).unwrap();
                assert!(!d.positive.contains(&j), "{id}");
            }
            assert_eq!(d.simple.len(), d.rank, "{id}");
        }
    }

    #[test]
    fn so5c_roots_form_b2() {
        let d = datum(FamilyId::So5C);
        assert_eq!(d.dim_g, 20);
        assert_eq!(d.rank, 2);
        assert_eq!(d.roots.len(), 8);
        assert!(d.multiplicities.iter().all(|&m| m == 2));
        // restricted to 𝔞, positive roots stay nonnegative
        for &i in &d.positive {
            assert!(d.roots[i][0] >= -1e-10);
        }
    }
}
