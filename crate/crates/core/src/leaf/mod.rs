//! Symplectic leaves `M_a = b̃(U a)` of the dual Poisson–Lie group, with
//! the torus action, the symplectic form, the momentum map `log ã` and the
//! involution induced by complex conjugation.

mod example;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iwasawa::iwasawa_factor;
use crate::liecore::{iwasawa_project_algebra, make_family, FamilyId, GroupFamily};
use crate::numkit::{inverse, mat_exp};
use crate::sampling::{compact_element, stream_rng};
use crate::CMat;

pub use example::{example_n, example_so14, example_so14_with, example_x, example_y, perturbed_example_n, ExampleReport, EXAMPLE_TOL};

/// Tolerance for the residuals reported by [`check_leaf`].
pub const LEAF_TOL: f64 = 1e-8;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Leaf {
    pub fam_c: GroupFamily,
    pub fam_real: GroupFamily,
    /// Base point `a = exp(H)`, `H ∈ 𝔞`.
    pub a: CMat,
    /// `H` in `basis_a` coordinates.
    pub log_a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafPoint {
    /// `b̃(u a)`.
    pub b: CMat,
    /// A representative in `U`.
    pub u: CMat,
    /// `log ã(u a)`.
    pub phi: Vec<f64>,
}

/// `Im tr(pr_𝔲(Ad(b)⁻¹X) · Ad(b)⁻¹Y)`.
pub fn symplectic_form_at(fam_c: &GroupFamily, b: &CMat, x: &CMat, y: &CMat) -> Result<f64> {
    let binv = inverse(b)?;
    let ax = &(&binv * x) * b;
    let ay = &(&binv * y) * b;
    let p = iwasawa_project_algebra(fam_c, &ax)?;
    Ok((&p.u * &ay).trace().im)
}

impl Leaf {
    /// Leaf through `a = exp(H)` for `H` given in `basis_a` coordinates.
    pub fn new(id: FamilyId, log_a: &[f64]) -> Result<Self> {
        if !id.is_complexified() {
            return Err(Error::UnsupportedFamily(format!("{id} is not a complexified family")));
        }
        let fam_c = make_family(id)?;
        let fam_real = make_family(id.real_form())?;
        if log_a.len() != fam_c.rank() {
            return Err(Error::DimensionMismatch(format!("expected {} coordinates, got {}", fam_c.rank(), log_a.len())));
        }
        let a = mat_exp(&fam_c.a_from_coords(log_a));
        Ok(Self { fam_c, fam_real, a, log_a: log_a.to_vec() })
    }

    /// Leaf through a given `a`, which must be `exp` of an element of `𝔞`.
    pub fn from_base_point(id: FamilyId, a: &CMat) -> Result<Self> {
        let fam = make_family(id)?;
        let f = iwasawa_factor(&fam, a)?;
        let leaf = Self::new(id, &f.log_a)?;
        let dev = leaf.a.max_abs_diff(a);
        if dev > 1e-10 * a.max_abs() {
            return Err(Error::InvalidInput(format!("base point is not in A (deviation {dev:e})")));
        }
        Ok(leaf)
    }

    pub fn rank(&self) -> usize {
        self.fam_c.rank()
    }

    pub fn leaf_point(&self, u: &CMat) -> Result<LeafPoint> {
        self.fam_c.check_compact(u, UNITARY_TOL)?;
        let f = iwasawa_factor(&self.fam_c, &(u * &self.a))?;
        Ok(LeafPoint { b: f.b(), u: u.clone(), phi: f.log_a })
    }

    /// `t.b̃(ua) = b̃(tua)` for `t ∈ T = exp(i𝔞)`.
    pub fn torus_act(&self, t: &CMat, pt: &LeafPoint) -> Result<LeafPoint> {
        self.check_torus(t)?;
        self.leaf_point(&(t * &pt.u))
    }

    /// `exp(iH)` for `H ∈ 𝔞` in `basis_a` coordinates.
    pub fn torus_element(&self, coords: &[f64]) -> CMat {
        mat_exp(&self.fam_c.a_from_coords(coords).scale(Complex64::new(0.0, 1.0)))
    }

    fn check_torus(&self, t: &CMat) -> Result<()> {
        let n = self.fam_c.rep_dim;
        let dev = (t * &t.adjoint()).max_abs_diff(&CMat::identity(n));
        if dev > UNITARY_TOL {
            return Err(Error::NotInTorus(format!("not unitary, deviation {dev:e}")));
        }
        let c = &self.fam_c.adapted_change;
        let d = &(&c.adjoint() * t) * c;
        if !d.is_diagonal(UNITARY_TOL) {
            return Err(Error::NotInTorus("not diagonal in the adapted basis".into()));
        }
        // phases must lie in i·𝔞
        let phases = CMat::diag(&d.diagonal().iter().map(|z| Complex64::new(z.arg(), 0.0)).collect::<Vec<_>>());
        let h = &(c * &phases) * &c.adjoint();
        let coords = self.fam_c.a_coords(&h);
        let back = self.torus_element(&coords);
        let dev = back.max_abs_diff(t);
        if dev > 1e-9 {
            return Err(Error::NotInTorus(format!("phases leave i𝔞, deviation {dev:e}")));
        }
        Ok(())
    }

    /// `X̃_b = b · pr_𝔟₁(Ad(b)⁻¹X)`.
    pub fn vector_field(&self, x: &CMat, pt: &LeafPoint) -> Result<CMat> {
        self.fam_c.check_compact_algebra(x, 1e-10)?;
        let binv = inverse(&pt.b)?;
        let z = &(&binv * x) * &pt.b;
        Ok(&pt.b * &iwasawa_project_algebra(&self.fam_c, &z)?.b1())
    }

    /// Central difference of `s ↦ b̃(exp(sX) b)`.
    pub fn vector_field_fd(&self, x: &CMat, pt: &LeafPoint, h: f64) -> Result<CMat> {
        let plus = iwasawa_factor(&self.fam_c, &(&mat_exp(&x.scale_real(h)) * &pt.b))?.b();
        let minus = iwasawa_factor(&self.fam_c, &(&mat_exp(&x.scale_real(-h)) * &pt.b))?.b();
        Ok((&plus - &minus).scale_real(0.5 / h))
    }

    pub fn symplectic_form(&self, pt: &LeafPoint, x: &CMat, y: &CMat) -> Result<f64> {
        self.fam_c.check_compact_algebra(x, 1e-10)?;
        self.fam_c.check_compact_algebra(y, 1e-10)?;
        symplectic_form_at(&self.fam_c, &pt.b, x, y)
    }

    pub fn momentum(&self, pt: &LeafPoint) -> Vec<f64> {
        pt.phi.clone()
    }

    /// `τ_a(b̃(ua)) = b̃(ū a)`.
    pub fn involution_tau(&self, pt: &LeafPoint) -> Result<LeafPoint> {
        self.leaf_point(&pt.u.conj())
    }

    /// Point of `Q_a = b̃(K a)` for the real form's `K`.
    pub fn sample_q(&self, seed: u64, index: u64) -> Result<LeafPoint> {
        self.leaf_point(&compact_element(&self.fam_real, &mut stream_rng(seed, index)))
    }

    /// Haar-random point of `M_a`.
    pub fn sample_m(&self, seed: u64, index: u64) -> Result<LeafPoint> {
        self.leaf_point(&compact_element(&self.fam_c, &mut stream_rng(seed, index)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafReport {
    pub family: String,
    pub log_a: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    /// `max |ω(X̃, Ỹ)|` over `Q_a` samples and pairs from a `𝔨` basis.
    pub lagrangian_residual: f64,
    /// `max ‖τ_a(t.m) − t⁻¹.τ_a(m)‖`.
    pub equivariance_residual: f64,
    /// `max ‖Φ(τ_a(m)) − Φ(m)‖`.
    pub momentum_invariance_residual: f64,
    /// `max |ω(dτ X̃, dτ Ỹ) + ω(X̃, Ỹ)|` over `M_a` samples and pairs from
    /// an `i𝔭` basis; zero iff `τ_a` is anti-symplectic on these vectors.
    pub antisymplectic_probe: f64,
    pub pass: bool,
}

#[derive(Default, Clone, Copy)]
struct Residuals {
    lag: f64,
    equi: f64,
    mom: f64,
    anti: f64,
}

impl Residuals {
    fn max(self, o: Self) -> Self {
        Self { lag: self.lag.max(o.lag), equi: self.equi.max(o.equi), mom: self.mom.max(o.mom), anti: self.anti.max(o.anti) }
    }
}

/// Numerical check of the Lagrangian property of `Q_a`, the equivariance
/// `τ_a(t.m) = t⁻¹.τ_a(m)` and the invariance `Φ ∘ τ_a = Φ`.
pub fn check_leaf(leaf: &Leaf, n_samples: usize, seed: u64) -> Result<LeafReport> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    let k_basis = &leaf.fam_real.basis_k;
    let ip_basis: Vec<CMat> = leaf.fam_real.basis_p.iter().map(|p| p.scale(Complex64::new(0.0, 1.0))).collect();
    let r = leaf.rank();

    let per_sample = |i: usize| -> Result<Residuals> {
        let i = i as u64;
        let mut res = Residuals::default();
        let q = leaf.sample_q(seed, 4 * i)?;
        for (a, x) in k_basis.iter().enumerate() {
            for y in &k_basis[a + 1..] {
                res.lag = res.lag.max(leaf.symplectic_form(&q, x, y)?.abs());
            }
        }
        let m = leaf.sample_m(seed, 4 * i + 1)?;
        let mut rng = stream_rng(seed, 4 * i + 2);
        let coords: Vec<f64> = (0..r).map(|_| rand::Rng::random_range(&mut rng, -3.0..3.0)).collect();
        let t = leaf.torus_element(&coords);
        let t_inv = t.adjoint();
        let lhs = leaf.involution_tau(&leaf.torus_act(&t, &m)?)?;
        let rhs = leaf.torus_act(&t_inv, &leaf.involution_tau(&m)?)?;
        res.equi = lhs.b.max_abs_diff(&rhs.b);
        let tm = leaf.involution_tau(&m)?;
        res.mom = m.phi.iter().zip(&tm.phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        for (a, x) in ip_basis.iter().enumerate() {
            for y in &ip_basis[a + 1..] {
                let w = leaf.symplectic_form(&m, x, y)?;
                let w_tau = leaf.symplectic_form(&tm, &x.conj(), &y.conj())?;
                res.anti = res.anti.max((w + w_tau).abs());
            }
        }
        Ok(res)
    };
    let all: Vec<Residuals> = (0..n_samples).into_par_iter().map(per_sample).collect::<Result<_>>()?;
    let tot = all.into_iter().fold(Residuals::default(), Residuals::max);
    Ok(LeafReport {
        family: leaf.fam_c.id.to_string(),
        log_a: leaf.log_a.clone(),
        n_samples,
        seed,
        lagrangian_residual: tot.lag,
        equivariance_residual: tot.equi,
        momentum_invariance_residual: tot.mom,
        antisymplectic_probe: tot.anti,
        pass: tot.lag <= LEAF_TOL && tot.equi <= LEAF_TOL && tot.mom <= LEAF_TOL,
    })
}
