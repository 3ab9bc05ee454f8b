//! Matrix realizations of the supported semisimple groups: Cartan
//! decomposition, Iwasawa subalgebras, restricted roots and Weyl groups.
//!
//! All algebra elements are complex matrices in the defining representation;
//! real families simply carry zero imaginary parts. `𝔞` is normalized so
//! that `basis_a` is orthonormal for `<X, Y> = ½ Re tr(XY)`.

mod project;
mod roots;
mod weyl;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{det, null_space, LeastSquares, Mat};
use crate::CMat;

pub use project::{iwasawa_project_algebra, AlgebraProjection};
pub use roots::{restricted_roots, RootDatum};
pub use weyl::{validate_weyl_group, weyl_group, WeylGroup};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    /// `SL(n, R)`, n in 2..=4.
    SlR(usize),
    /// `SO_e(1, n)`, n in 2..=4, preserving `diag(-1, 1, ..., 1)`.
    So1n(usize),
    /// `SL(n, C)` as the complexification of `SL(n, R)`, n in 2..=3.
    SlC(usize),
    /// `SO(5, C)`, the complexification of `SO_e(1, 4)`.
    So5C,
}

impl FamilyId {
    pub const ALL: [FamilyId; 9] = [
        FamilyId::SlR(2),
        FamilyId::SlR(3),
        FamilyId::SlR(4),
        FamilyId::So1n(2),
        FamilyId::So1n(3),
        FamilyId::So1n(4),
        FamilyId::SlC(2),
        FamilyId::SlC(3),
        FamilyId::So5C,
    ];

    pub fn is_complexified(self) -> bool {
        matches!(self, FamilyId::SlC(_) | FamilyId::So5C)
    }

    /// The real form a complexified family is built over.
    pub fn real_form(self) -> FamilyId {
        match self {
            FamilyId::SlC(n) => FamilyId::SlR(n),
            FamilyId::So5C => FamilyId::So1n(4),
            other => other,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::SlR(n) => write!(f, "sl{n}r"),
            FamilyId::So1n(n) => write!(f, "so1{n}"),
            FamilyId::SlC(n) => write!(f, "sl{n}c"),
            FamilyId::So5C => write!(f, "so5c"),
        }
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .iter()
            .copied()
            .find(|id| id.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::UnsupportedFamily(s.to_string()))
    }
}

/// `E_ij` in dimension `n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = Complex64::new(1.0, 0.0);
    m
}

/// `½ Re tr(XY)`.
pub fn trace_form(x: &CMat, y: &CMat) -> f64 {
    0.5 * (x * y).trace().re
}

/// `Ad(g) X = g X g⁻¹`.
pub fn ad_group(g: &CMat, g_inv: &CMat, x: &CMat) -> CMat {
    &(g * x) * g_inv
}

fn rotations(n: usize, range: std::ops::Range<usize>) -> Vec<CMat> {
    let idx: Vec<usize> = range.collect();
    let mut out = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            out.push(&unit(n, i, j) - &unit(n, j, i));
        }
    }
    out
}

fn scale_c(m: &CMat, s: Complex64) -> CMat {
    m.scale(s)
}

/// Gram–Schmidt under `½ Re tr(XY)`.
fn orthonormalize(elems: Vec<CMat>) -> Vec<CMat> {
    let mut out: Vec<CMat> = Vec::new();
    for mut x in elems {
        for q in &out {
            let c = trace_form(q, &x);
            x -= &q.scale_real(c);
        }
        let nrm = trace_form(&x, &x).sqrt();
        out.push(x.scale_real(1.0 / nrm));
    }
    out
}

/// Basis of the span of `elems` as a real vector space, orthonormal for
/// `Re tr(X^* Y)`.
pub fn real_span_basis(elems: &[CMat]) -> Vec<CMat> {
    if elems.is_empty() {
        return Vec::new();
    }
    let (r, c) = elems[0].shape();
    let cols: Vec<Vec<f64>> = elems.iter().map(|e| e.realify()).collect();
    let m = Mat::from_columns(2 * r * c, &cols).expect("uniform shape");
    crate::numkit::column_space(&m, 1e-10).columns().iter().map(|v| unrealify(v, r, c)).collect()
}

fn unrealify(v: &[f64], r: usize, c: usize) -> CMat {
    let n = r * c;
    CMat::from_fn(r, c, |i, j| Complex64::new(v[i * c + j], v[n + i * c + j]))
}

/// Structural data of one supported family.
#[derive(Debug, Clone)]
pub struct GroupFamily {
    pub id: FamilyId,
    pub rep_dim: usize,
    /// `𝔨` of the real form.
    pub basis_k: Vec<CMat>,
    /// `𝔭` of the real form.
    pub basis_p: Vec<CMat>,
    /// `𝔞 ⊆ 𝔭`, orthonormal for `½ Re tr(XY)`.
    pub basis_a: Vec<CMat>,
    /// `𝔫` of the real form.
    pub basis_n: Vec<CMat>,
    /// `𝔪 = 𝔷_𝔨(𝔞)`, computed as a kernel.
    pub basis_m: Vec<CMat>,
    /// Maximal torus of `𝔪` (complexified families only).
    pub basis_t1: Vec<CMat>,
    /// `𝔫₊`: root spaces of `𝔞₁` vanishing on `𝔞` (real basis).
    pub basis_nplus: Vec<CMat>,
    /// `𝔫₁ = 𝔫_C ⊕ 𝔫₊` (real basis; complexified families only).
    pub basis_n1: Vec<CMat>,
    /// `𝔲 = 𝔨 + i𝔭` (complexified families only).
    pub basis_u: Vec<CMat>,
    /// Unitary change of basis to an ordered basis where `𝔞` (resp. `𝔞₁`)
    /// is diagonal and `𝔫` (resp. `𝔫₁`) is strictly upper triangular.
    pub adapted_change: CMat,
    /// Bilinear form preserved by the group (`gᵀ J g = J`), if any.
    pub form: Option<CMat>,
    /// Representatives `k_w ∈ K` of the Weyl group elements.
    pub weyl_reps: Vec<CMat>,
    projector: Option<LeastSquares<f64>>,
}

impl GroupFamily {
    pub fn rank(&self) -> usize {
        self.basis_a.len()
    }

    pub fn is_complexified(&self) -> bool {
        self.id.is_complexified()
    }

    /// `𝔞₁ = 𝔞 + i𝔱₁` for complexified families, `𝔞` otherwise. The first
    /// `rank()` elements are `basis_a`.
    pub fn basis_a1(&self) -> Vec<CMat> {
        let mut v = self.basis_a.clone();
        v.extend(self.basis_t1.iter().map(|t| scale_c(t, I)));
        v
    }

    /// Lie algebra of the compact factor: `𝔲` or `𝔨`.
    pub fn compact_basis(&self) -> &[CMat] {
        if self.is_complexified() {
            &self.basis_u
        } else {
            &self.basis_k
        }
    }

    /// Nilpotent factor of the Iwasawa decomposition: `𝔫₁` or `𝔫`.
    pub fn nilpotent_basis(&self) -> &[CMat] {
        if self.is_complexified() {
            &self.basis_n1
        } else {
            &self.basis_n
        }
    }

    /// Real basis of the Lie algebra of the group: `𝔤` for real families,
    /// `𝔤_C = 𝔲 + i𝔲` viewed as a real space for complexified ones.
    pub fn algebra_basis(&self) -> Vec<CMat> {
        if self.is_complexified() {
            let mut v = self.basis_u.clone();
            v.extend(self.basis_u.iter().map(|x| scale_c(x, I)));
            v
        } else {
            let mut v = self.basis_k.clone();
            v.extend(self.basis_p.iter().cloned());
            v
        }
    }

    /// Coordinates of `H ∈ 𝔞` in `basis_a`.
    pub fn a_coords(&self, h: &CMat) -> Vec<f64> {
        self.basis_a.iter().map(|b| trace_form(b, h)).collect()
    }

    pub fn a_from_coords(&self, c: &[f64]) -> CMat {
        let mut h = CMat::zeros(self.rep_dim, self.rep_dim);
        for (b, &x) in self.basis_a.iter().zip(c) {
            h += &b.scale_real(x);
        }
        h
    }

    /// Orthogonal matrix of `Ad(k_w)` on `𝔞` in `basis_a` coordinates.
    pub fn weyl_matrix(&self, k_w: &CMat) -> Mat<f64> {
        let r = self.rank();
        let kinv = k_w.adjoint();
        let imgs: Vec<CMat> = self.basis_a.iter().map(|h| ad_group(k_w, &kinv, h)).collect();
        Mat::from_fn(r, r, |i, j| trace_form(&self.basis_a[i], &imgs[j]))
    }

    /// Checks the defining relations of the group.
    pub fn check_in_group(&self, g: &CMat) -> Result<()> {
        let n = self.rep_dim;
        if g.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("expected {n}x{n}, got {:?}", g.shape())));
        }
        let scale = g.max_abs().max(1.0);
        if !self.is_complexified() && g.im_part().max_abs() > 1e-12 * scale {
            return Err(Error::NotInGroup("real family needs a real matrix".into()));
        }
        let d = det(g)?;
        if (d - 1.0).norm() > 1e-10 * scale.powi(n as i32) {
            return Err(Error::NotInGroup(format!("determinant {d}")));
        }
        if let Some(j) = &self.form {
            let dev = (&(&g.transpose() * j) * g).max_abs_diff(j);
            if dev > 1e-10 * scale * scale {
                return Err(Error::NotInGroup(format!("form not preserved, deviation {dev:e}")));
            }
            if !self.is_complexified() && g[(0, 0)].re < 1.0 - 1e-10 * scale {
                return Err(Error::NotInGroup("not in the identity component".into()));
            }
        }
        Ok(())
    }

    /// Checks membership in the compact factor `K` (resp. `U`).
    pub fn check_compact(&self, k: &CMat, tol: f64) -> Result<()> {
        let dev = (k * &k.adjoint()).max_abs_diff(&CMat::identity(self.rep_dim));
        if dev > tol {
            return Err(Error::NotCompact(dev));
        }
        self.check_in_group(k).map_err(|_| Error::NotCompact(dev))
    }

    /// Checks that `x` lies in the compact algebra `𝔨` (resp. `𝔲`).
    pub fn check_compact_algebra(&self, x: &CMat, tol: f64) -> Result<()> {
        let basis = self.compact_basis();
        let (_, resid) = expand_real(basis, x)?;
        if resid > tol * x.max_abs().max(1.0) {
            return Err(Error::NotInCompactAlgebra(resid));
        }
        Ok(())
    }

    pub(crate) fn projector(&self) -> Option<&LeastSquares<f64>> {
        self.projector.as_ref()
    }
}

/// Real coefficients of `x` in the real span of `basis`, with the residual.
pub fn expand_real(basis: &[CMat], x: &CMat) -> Result<(Vec<f64>, f64)> {
    if basis.is_empty() {
        return Ok((Vec::new(), x.norm_fro()));
    }
    let (r, c) = basis[0].shape();
    let cols: Vec<Vec<f64>> = basis.iter().map(|b| b.realify()).collect();
    let m = Mat::from_columns(2 * r * c, &cols)?;
    let (coef, resid) = LeastSquares::new(&m)?.solve(&x.realify());
    Ok((coef, resid))
}

fn combine(basis: &[CMat], coef: &[f64], n: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    for (b, &c) in basis.iter().zip(coef) {
        if c != 0.0 {
            out += &b.scale_real(c);
        }
    }
    out
}

/// Kernel of `ad(𝔞)` inside the real span of `space`.
fn centralizer(space: &[CMat], abelian: &[CMat]) -> Vec<CMat> {
    if space.is_empty() {
        return Vec::new();
    }
    let n = space[0].rows();
    let rows_per = 2 * n * n;
    let big = Mat::from_fn(rows_per * abelian.len(), space.len(), |i, j| {
        let h = &abelian[i / rows_per];
        h.commutator(&space[j]).realify()[i % rows_per]
    });
    let ker = null_space(&big, 1e-10);
    let elems: Vec<CMat> = ker.columns().iter().map(|c| combine(space, c, n)).collect();
    real_span_basis(&elems)
}

fn sl_real_parts(n: usize) -> (Vec<CMat>, Vec<CMat>, Vec<CMat>, Vec<CMat>) {
    let k = rotations(n, 0..n);
    let mut p = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            p.push(&unit(n, i, j) + &unit(n, j, i));
        }
    }
    let diag: Vec<CMat> = (0..n - 1).map(|i| &unit(n, i, i) - &unit(n, i + 1, i + 1)).collect();
    p.extend(diag.iter().cloned());
    let a = orthonormalize(diag);
    let mut nil = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            nil.push(unit(n, i, j));
        }
    }
    (k, p, a, nil)
}

/// Permutation matrices with one column negated when needed so that they
/// lie in `SO(n)`.
fn signed_permutations(n: usize, offset: usize, size: usize) -> Vec<CMat> {
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &perms {
            for x in (0..n).filter(|x| !p.contains(x)) {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        perms = next;
    }
    perms
        .into_iter()
        .map(|p| {
            let mut m = CMat::identity(size);
            for j in 0..n {
                for i in 0..n {
                    m[(offset + i, offset + j)] = Complex64::new(if p[j] == i { 1.0 } else { 0.0 }, 0.0);
                }
            }
            if det(&m).unwrap().re < 0.0 {
                for i in 0..size {
                    m[(i, offset)] = -m[(i, offset)];
                }
            }
            m
        })
        .collect()
}

fn make_sl(n: usize, complexified: bool) -> GroupFamily {
    let (k, p, a, nil) = sl_real_parts(n);
    let weyl_reps = signed_permutations(n, 0, n);
    let mut fam = GroupFamily {
        id: if complexified { FamilyId::SlC(n) } else { FamilyId::SlR(n) },
        rep_dim: n,
        basis_m: centralizer(&k, &a),
        basis_k: k,
        basis_p: p,
        basis_a: a,
        basis_n: nil,
        basis_t1: Vec::new(),
        basis_nplus: Vec::new(),
        basis_n1: Vec::new(),
        basis_u: Vec::new(),
        adapted_change: CMat::identity(n),
        form: None,
        weyl_reps,
        projector: None,
    };
    if complexified {
        fam.basis_u = fam.basis_k.iter().cloned().chain(fam.basis_p.iter().map(|x| scale_c(x, I))).collect();
        fam.basis_n1 = fam.basis_n.iter().flat_map(|x| [x.clone(), scale_c(x, I)]).collect();
    }
    fam
}

/// `N_k = E_0k + E_k0 − E_kn + E_nk`, spanning `𝔫` of `so(1, n)`.
fn so1n_nilpotent(n: usize) -> Vec<CMat> {
    let d = n + 1;
    (1..n)
        .map(|k| {
            let mut m = &unit(d, 0, k) + &unit(d, k, 0);
            m -= &unit(d, k, n);
            m += &unit(d, n, k);
            m
        })
        .collect()
}

fn make_so1n(n: usize, complexified: bool) -> GroupFamily {
    let d = n + 1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let k = rotations(d, 1..d);
    let p: Vec<CMat> = (1..d).map(|j| &unit(d, 0, j) + &unit(d, j, 0)).collect();
    let a = vec![&unit(d, 0, n) + &unit(d, n, 0)];
    let nil = so1n_nilpotent(n);
    let mut j = CMat::identity(d);
    j[(0, 0)] = Complex64::new(-1.0, 0.0);

    // rotation by π in the plane of the last two coordinates of R^n
    let mut flip = CMat::identity(d);
    flip[(n - 1, n - 1)] = Complex64::new(-1.0, 0.0);
    flip[(n, n)] = Complex64::new(-1.0, 0.0);
    let weyl_reps = vec![CMat::identity(d), flip];

    let mut change = CMat::zeros(d, d);
    change[(0, 0)] = Complex64::new(s, 0.0);
    change[(n, 0)] = Complex64::new(s, 0.0);
    for i in 1..n {
        change[(i, i)] = Complex64::new(1.0, 0.0);
    }
    change[(0, n)] = Complex64::new(s, 0.0);
    change[(n, n)] = Complex64::new(-s, 0.0);

    let mut fam = GroupFamily {
        id: if complexified { FamilyId::So5C } else { FamilyId::So1n(n) },
        rep_dim: d,
        basis_m: centralizer(&k, &a),
        basis_k: k,
        basis_p: p,
        basis_a: a,
        basis_n: nil,
        basis_t1: Vec::new(),
        basis_nplus: Vec::new(),
        basis_n1: Vec::new(),
        basis_u: Vec::new(),
        adapted_change: change,
        form: Some(j),
        weyl_reps,
        projector: None,
    };
    if complexified {
        // 𝔱₁ = R(E_12 − E_21), diagonalized by w± = (e1 ∓ i e2)/√2.
        fam.basis_t1 = vec![&unit(d, 1, 2) - &unit(d, 2, 1)];
        let mut nplus = scale_c(&unit(d, 1, 3), I);
        nplus += &unit(d, 2, 3);
        nplus -= &scale_c(&unit(d, 3, 1), I);
        nplus -= &unit(d, 3, 2);
        fam.basis_nplus = vec![nplus.clone(), scale_c(&nplus, I)];
        fam.basis_n1 = fam.basis_n.iter().flat_map(|x| [x.clone(), scale_c(x, I)]).collect();
        fam.basis_n1.extend(fam.basis_nplus.iter().cloned());
        fam.basis_u = fam.basis_k.iter().cloned().chain(fam.basis_p.iter().map(|x| scale_c(x, I))).collect();

        let mut c = CMat::zeros(d, d);
        let cols: [Vec<Complex64>; 5] = [
            vec![s.into(), 0.0.into(), 0.0.into(), 0.0.into(), s.into()],
            vec![0.0.into(), s.into(), -I * s, 0.0.into(), 0.0.into()],
            vec![0.0.into(), 0.0.into(), 0.0.into(), 1.0.into(), 0.0.into()],
            vec![0.0.into(), s.into(), I * s, 0.0.into(), 0.0.into()],
            vec![s.into(), 0.0.into(), 0.0.into(), 0.0.into(), (-s).into()],
        ];
        for (jj, col) in cols.iter().enumerate() {
            c.set_column(jj, col);
        }
        fam.adapted_change = c;
    }
    fam
}

pub fn make_family(id: FamilyId) -> Result<GroupFamily> {
    let mut fam = match id {
        FamilyId::SlR(n) if (2..=4).contains(&n) => make_sl(n, false),
        FamilyId::SlC(n) if (2..=3).contains(&n) => make_sl(n, true),
        FamilyId::So1n(n) if (2..=4).contains(&n) => make_so1n(n, false),
        FamilyId::So5C => make_so1n(4, true),
        other => return Err(Error::UnsupportedFamily(other.to_string())),
    };
    if fam.is_complexified() {
        let mut all: Vec<CMat> = fam.basis_n1.clone();
        all.extend(fam.basis_a1());
        all.extend(fam.basis_u.iter().cloned());
        let n = fam.rep_dim;
        let cols: Vec<Vec<f64>> = all.iter().map(|b| b.realify()).collect();
        fam.projector = Some(LeastSquares::new(&Mat::from_columns(2 * n * n, &cols)?)?);
    }
    Ok(fam)
}

pub fn make_family_by_name(name: &str) -> Result<GroupFamily> {
    make_family(name.parse()?)
}
