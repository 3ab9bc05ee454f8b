//! Linear symplectic algebra: Lagrangian subspaces, involutions and the
//! four equivalent characterizations of anti-symplectic involutions.

mod suite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{column_space, det, inverse, null_space, rank, real, rows_serde, rows_vec_serde, Mat, Real};

pub use suite::{random_instance, run_equivalence_suite, InstanceKind, SuiteReport, SymplecticInstance};

/// Default tolerance for subspace and identity checks.
pub const SYMPLIN_TOL: f64 = 1e-10;

/// `(V, Ω)` with `Ω(u, v) = uᵀ·omega·v`.
#[derive(Debug, Clone)]
pub struct SympSpace<R: Real> {
    omega: Mat<R>,
}

impl<R: Real> SympSpace<R> {
    pub fn new(omega: Mat<R>) -> Result<Self> {
        let (r, c) = omega.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::DimensionMismatch(format!("symplectic form must be even square, got {r}x{c}")));
        }
        let tol = real::<R>(SYMPLIN_TOL) * omega.max_abs().max(R::one());
        if (&omega + &omega.transpose()).max_abs() > tol {
            return Err(Error::InvalidInput("form is not antisymmetric".into()));
        }
        if det(&omega)?.abs() <= real(1e-12) {
            return Err(Error::InvalidInput("form is degenerate".into()));
        }
        Ok(Self { omega })
    }

    /// The standard form `[[0, I], [-I, 0]]` on `R^{2n}`.
    pub fn standard(n: usize) -> Self {
        let omega = Mat::from_fn(2 * n, 2 * n, |i, j| {
            if j == i + n {
                R::one()
            } else if i == j + n {
                -R::one()
            } else {
                R::zero()
            }
        });
        Self { omega }
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn omega(&self) -> &Mat<R> {
        &self.omega
    }

    pub fn pairing(&self, u: &[R], v: &[R]) -> R {
        let ov = self.omega.mul_vec(v);
        u.iter().zip(&ov).map(|(&a, &b)| a * b).sum()
    }

    /// Gram matrix `Aᵀ·Ω·B` of two families of column vectors.
    pub fn gram(&self, a: &Mat<R>, b: &Mat<R>) -> Mat<R> {
        &(&a.transpose() * &self.omega) * b
    }

    fn check_square(&self, m: &Mat<R>) -> Result<()> {
        if m.shape() != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch(format!("expected {0}x{0}, got {1:?}", self.dim(), m.shape())));
        }
        Ok(())
    }
}

/// A linear subspace given by a basis (stored orthonormalized).
#[derive(Debug, Clone)]
pub struct Subspace<R: Real> {
    basis: Mat<R>,
}

impl<R: Real> Subspace<R> {
    pub fn new(basis: Mat<R>) -> Result<Self> {
        if rank(&basis, real(SYMPLIN_TOL)) != basis.cols() {
            return Err(Error::InvalidInput("basis columns are linearly dependent".into()));
        }
        Ok(Self::from_spanning(&basis))
    }

    /// Subspace spanned by the columns, dependent columns allowed.
    pub fn from_spanning(columns: &Mat<R>) -> Self {
        Self { basis: column_space(columns, real(SYMPLIN_TOL)) }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self { basis: Mat::zeros(ambient_dim, 0) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Orthonormal basis as columns.
    pub fn basis(&self) -> &Mat<R> {
        &self.basis
    }

    pub fn contains(&self, v: &[R], tol: R) -> bool {
        let proj = self.basis.mul_vec(&self.basis.transpose().mul_vec(v));
        let err = v.iter().zip(&proj).map(|(&a, &b)| (a - b).abs()).fold(R::zero(), R::max);
        let scale = v.iter().fold(R::one(), |m, x| m.max(x.abs()));
        err <= tol * scale
    }

    pub fn contains_subspace(&self, other: &Subspace<R>, tol: R) -> bool {
        other.basis.columns().iter().all(|c| self.contains(c, tol))
    }

    pub fn approx_eq(&self, other: &Subspace<R>, tol: R) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other, tol) && other.contains_subspace(self, tol)
    }

    /// Image under a linear map.
    pub fn image(&self, m: &Mat<R>) -> Subspace<R> {
        Subspace::from_spanning(&(m * &self.basis))
    }
}

/// A linear map with `tau² = I`.
#[derive(Debug, Clone)]
pub struct LinInvolution<R: Real> {
    tau: Mat<R>,
}

impl<R: Real> LinInvolution<R> {
    pub fn new(tau: Mat<R>) -> Result<Self> {
        if !tau.is_square() {
            return Err(Error::DimensionMismatch(format!("involution must be square, got {:?}", tau.shape())));
        }
        let dev = (&tau * &tau).max_abs_diff(&Mat::identity(tau.rows()));
        let scale = tau.max_abs().max(R::one());
        if dev > real::<R>(SYMPLIN_TOL) * scale * scale {
            return Err(Error::NotInvolution(dev.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { tau })
    }

    pub fn matrix(&self) -> &Mat<R> {
        &self.tau
    }
}

/// Infinitesimal generators of a linear torus action.
#[derive(Debug, Clone)]
pub struct LinTorusAction<R: Real> {
    generators: Vec<Mat<R>>,
}

impl<R: Real> LinTorusAction<R> {
    /// Checks that the generators commute and are infinitesimally symplectic.
    pub fn new(space: &SympSpace<R>, generators: Vec<Mat<R>>) -> Result<Self> {
        let tol = real::<R>(SYMPLIN_TOL);
        for x in &generators {
            space.check_square(x)?;
            let scale = x.max_abs().max(R::one()) * space.omega.max_abs().max(R::one());
            let lhs = &(&x.transpose() * &space.omega) + &(&space.omega * x);
            if lhs.max_abs() > tol * scale {
                return Err(Error::InvalidInput("generator is not infinitesimally symplectic".into()));
            }
        }
        for (i, x) in generators.iter().enumerate() {
            for y in &generators[i + 1..] {
                let scale = x.max_abs().max(R::one()) * y.max_abs().max(R::one());
                if x.commutator(y).max_abs() > tol * scale {
                    return Err(Error::InvalidInput("generators do not commute".into()));
                }
            }
        }
        Ok(Self { generators })
    }

    pub fn generators(&self) -> &[Mat<R>] {
        &self.generators
    }

    /// `V_fix = {v : X·v = 0 for all generators X}`.
    pub fn fixed_subspace(&self, dim: usize) -> Subspace<R> {
        if self.generators.is_empty() {
            return Subspace { basis: Mat::identity(dim) };
        }
        let stacked = Mat::from_fn(dim * self.generators.len(), dim, |i, j| self.generators[i / dim][(i % dim, j)]);
        Subspace { basis: null_space(&stacked, real(SYMPLIN_TOL)) }
    }

    /// `V_eff`: the span of all `X·v`.
    pub fn effective_subspace(&self, dim: usize) -> Subspace<R> {
        if self.generators.is_empty() {
            return Subspace::zero(dim);
        }
        let mut cols = self.generators[0].clone();
        for x in &self.generators[1..] {
            cols = cols.hstack(x).expect("generators share a shape");
        }
        Subspace::from_spanning(&cols)
    }

    /// Whether `τ∘X = −X∘τ` for every generator.
    pub fn anticommutes_with(&self, inv: &LinInvolution<R>, tol: R) -> bool {
        self.generators.iter().all(|x| {
            let s = &(&inv.tau * x) + &(x * &inv.tau);
            s.max_abs() <= tol * x.max_abs().max(R::one()) * inv.tau.max_abs().max(R::one())
        })
    }
}

fn check_sub<R: Real>(space: &SympSpace<R>, sub: &Subspace<R>) -> Result<()> {
    if sub.ambient_dim() != space.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspace lives in dimension {}, space has dimension {}",
            sub.ambient_dim(),
            space.dim()
        )));
    }
    Ok(())
}

pub fn is_isotropic<R: Real>(space: &SympSpace<R>, sub: &Subspace<R>) -> Result<bool> {
    check_sub(space, sub)?;
    let g = space.gram(&sub.basis, &sub.basis);
    Ok(g.max_abs() <= real::<R>(SYMPLIN_TOL) * space.omega.max_abs().max(R::one()))
}

pub fn is_lagrangian<R: Real>(space: &SympSpace<R>, sub: &Subspace<R>) -> Result<bool> {
    Ok(2 * sub.dim() == space.dim() && is_isotropic(space, sub)?)
}

/// `tauᵀ·omega·tau = −omega`.
pub fn is_antisymplectic<R: Real>(space: &SympSpace<R>, inv: &LinInvolution<R>) -> Result<bool> {
    space.check_square(&inv.tau)?;
    let pulled = &(&inv.tau.transpose() * &space.omega) * &inv.tau;
    let scale = space.omega.max_abs().max(R::one()) * inv.tau.max_abs().max(R::one()).powi(2);
    Ok((&pulled + &space.omega).max_abs() <= real::<R>(SYMPLIN_TOL) * scale)
}

/// The `+1` and `−1` eigenspaces of an involution.
pub fn eigensplit<R: Real>(inv: &LinInvolution<R>) -> Result<(Subspace<R>, Subspace<R>)> {
    let n = inv.tau.rows();
    let id = Mat::<R>::identity(n);
    let plus = Subspace { basis: null_space(&(&inv.tau - &id), real(1e-9)) };
    let minus = Subspace { basis: null_space(&(&inv.tau + &id), real(1e-9)) };
    if plus.dim() + minus.dim() != n {
        return Err(Error::NotInvolution(f64::NAN));
    }
    Ok((plus, minus))
}

/// `φ` with `φ(e_i) = f_i`, `φ(f_i) = −e_i`, where `{e_i}` spans `v_plus` and
/// `{f_j}` is the basis of `v_minus` dual to it under `Ω(e_i, f_j) = δ_ij`.
pub fn build_swap_symplectomorphism<R: Real>(
    space: &SympSpace<R>,
    v_plus: &Subspace<R>,
    v_minus: &Subspace<R>,
) -> Result<Mat<R>> {
    check_sub(space, v_plus)?;
    check_sub(space, v_minus)?;
    if !is_lagrangian(space, v_plus)? || !is_lagrangian(space, v_minus)? {
        return Err(Error::NotLagrangian);
    }
    if rank(&v_plus.basis.hstack(&v_minus.basis)?, real(SYMPLIN_TOL)) != space.dim() {
        return Err(Error::NotComplementary);
    }
    swap_map(space, v_plus, v_minus)
}

fn swap_map<R: Real>(space: &SympSpace<R>, v_plus: &Subspace<R>, v_minus: &Subspace<R>) -> Result<Mat<R>> {
    let e = &v_plus.basis;
    let pairing = space.gram(e, &v_minus.basis);
    let f = &v_minus.basis * &inverse(&pairing).map_err(|_| Error::NotComplementary)?;
    let frame = e.hstack(&f)?;
    let swapped = f.hstack(&-e)?;
    Ok(&swapped * &inverse(&frame).map_err(|_| Error::NotComplementary)?)
}

/// Outcome of evaluating the four characterizations on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// τ is anti-symplectic.
    pub s1: bool,
    /// Both eigenspaces are Lagrangian.
    pub s2: bool,
    /// `V₁` is Lagrangian and the canonical swap map is a symplectic swap.
    pub s3: bool,
    /// `V₁` is Lagrangian and the supplied action witnesses the torus
    /// condition. `None` when no action was supplied or the supplied one is
    /// not a witness: existence over all actions cannot be refuted.
    pub s4: Option<bool>,
    pub consistent: bool,
    /// The canonical construction failed although both eigenspaces are
    /// Lagrangian; some other swap map might still exist.
    pub s3_construction_failed: bool,
    pub notes: Vec<String>,
}

pub fn check_lemma_2_1_2<R: Real>(
    space: &SympSpace<R>,
    inv: &LinInvolution<R>,
    action: Option<&LinTorusAction<R>>,
) -> Result<EquivalenceReport> {
    let tol = real::<R>(SYMPLIN_TOL);
    let mut notes = Vec::new();
    let s1 = is_antisymplectic(space, inv)?;
    let (v1, vm1) = eigensplit(inv)?;
    let v1_lag = is_lagrangian(space, &v1)?;
    let s2 = v1_lag && is_lagrangian(space, &vm1)?;

    let mut s3 = false;
    if v1_lag && vm1.dim() == v1.dim() {
        match swap_map(space, &v1, &vm1) {
            Ok(phi) => {
                let sympl = (&(&phi.transpose() * &space.omega) * &phi).max_abs_diff(&space.omega)
                    <= tol * space.omega.max_abs().max(R::one()) * phi.max_abs().max(R::one()).powi(2);
                // images carry rounding error proportional to the size of phi
                let tol_img = tol * phi.max_abs().max(R::one());
                let swaps = vm1.approx_eq(&v1.image(&phi), tol_img) && v1.approx_eq(&vm1.image(&phi), tol_img);
                s3 = sympl && swaps;
                if !s3 {
                    notes.push(format!("canonical swap map: symplectic={sympl}, swaps eigenspaces={swaps}"));
                }
            }
            Err(e) => notes.push(format!("canonical swap map not constructible: {e}")),
        }
    } else if !v1_lag {
        notes.push("V1 is not Lagrangian".into());
    }
    let s3_construction_failed = s2 && !s3;

    let s4 = match action {
        None => None,
        Some(act) => {
            let anti = act.anticommutes_with(inv, tol);
            let no_fix = act.fixed_subspace(space.dim()).dim() == 0;
            if v1_lag && anti && no_fix {
                Some(true)
            } else {
                notes.push(format!(
                    "supplied action is not a witness: V1 Lagrangian={v1_lag}, anticommutes={anti}, V_fix trivial={no_fix}"
                ));
                None
            }
        }
    };

    let consistent = s1 == s2 && s2 == s3 && s4.is_none_or(|s| s == s1);
    Ok(EquivalenceReport { s1, s2, s3, s4, consistent, s3_construction_failed, notes })
}

/// JSON form of an instance: `{omega, tau, generators}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    #[serde(with = "rows_serde")]
    pub omega: Mat<f64>,
    #[serde(with = "rows_serde")]
    pub tau: Mat<f64>,
    #[serde(default, with = "rows_vec_serde")]
    pub generators: Vec<Mat<f64>>,
}

impl InstanceJson {
    pub fn evaluate(&self) -> Result<EquivalenceReport> {
        let space = SympSpace::new(self.omega.clone())?;
        let inv = LinInvolution::new(self.tau.clone())?;
        let action =
            if self.generators.is_empty() { None } else { Some(LinTorusAction::new(&space, self.generators.clone())?) };
        check_lemma_2_1_2(&space, &inv, action.as_ref())
    }
}
