//! Quadratic local normal form of a momentum map near a point `m`:
//!
//! `Φ(x, q, p) = Φ(m) + (x, ½ Σ_j λ_j (q_j² + p_j²))`
//!
//! restricted to the fixed-point set `Q = {p = ψ(x, q)}`, where `ψ` has
//! vanishing 1-jet at the origin.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geomcone::Cone;
use crate::numkit::{solve_linear, Mat};

pub const SIGN_TOL: f64 = 1e-12;
pub const MAX_PSI_DEGREE: u32 = 4;

/// A monomial `coeff · Π z_i^{e_i}` in the chart variables `z = (x, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

/// Polynomial with every term of total degree in `2..=4`, so that
/// `ψ(0) = 0` and `dψ(0) = 0` hold by construction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Term>", into = "Vec<Term>")]
pub struct Polynomial {
    terms: Vec<Term>,
}

impl TryFrom<Vec<Term>> for Polynomial {
    type Error = Error;

    fn try_from(terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            let deg: u32 = t.exponents.iter().sum();
            if !(2..=MAX_PSI_DEGREE).contains(&deg) {
                return Err(Error::InvalidInput(format!("term of degree {deg}; allowed degrees are 2..=4")));
            }
        }
        Ok(Self { terms })
    }
}

impl From<Polynomial> for Vec<Term> {
    fn from(p: Polynomial) -> Self {
        p.terms
    }
}

impl Polynomial {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        terms.try_into()
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.exponents.iter().zip(z).map(|(&e, &v)| v.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn partial(&self, z: &[f64], var: usize) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.exponents.get(var).is_some_and(|&e| e > 0))
            .map(|t| {
                let mut p = t.coeff * t.exponents[var] as f64;
                for (i, (&e, &v)) in t.exponents.iter().zip(z).enumerate() {
                    let e = if i == var { e - 1 } else { e };
                    p *= v.powi(e as i32);
                }
                p
            })
            .sum()
    }

    fn max_var(&self) -> usize {
        self.terms.iter().map(|t| t.exponents.len()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalModel {
    /// Dimension of the `x` block.
    pub k: usize,
    /// Number of nonzero weights.
    pub l: usize,
    /// Number of `(q, p)` pairs.
    #[serde(rename = "N")]
    pub n_pairs: usize,
    /// Weights `λ_1..λ_l` as covectors on the torus algebra.
    pub lambdas: Vec<Vec<f64>>,
    /// `Φ(m)` in `R^{k + dim 𝔱}`.
    pub phi_m: Vec<f64>,
    /// `ψ_1..ψ_l` in the variables `(x, q)`.
    #[serde(rename = "psi_coefficients")]
    pub psi: Vec<Polynomial>,
    /// Chart radius.
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criticality {
    LocalMax,
    NotLocalMax,
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!("{what}: expected length {want}, got {got}")));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LocalModel {
    pub fn new(k: usize, n_pairs: usize, lambdas: Vec<Vec<f64>>, phi_m: Vec<f64>, psi: Vec<Polynomial>, r: f64) -> Result<Self> {
        let l = lambdas.len();
        if l > n_pairs {
            return Err(Error::InvalidInput(format!("{l} weights but only {n_pairs} pairs")));
        }
        let t = lambdas.first().map_or(phi_m.len().saturating_sub(k), Vec::len);
        for lam in &lambdas {
            check_len("weight", lam.len(), t)?;
            if lam.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidInput("weights must be nonzero".into()));
            }
        }
        check_len("phi_m", phi_m.len(), k + t)?;
        check_len("psi", psi.len(), l)?;
        if let Some(p) = psi.iter().find(|p| p.max_var() > k + n_pairs) {
            return Err(Error::DimensionMismatch(format!("psi uses {} variables, chart has {}", p.max_var(), k + n_pairs)));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidInput(format!("chart radius {r}")));
        }
        Ok(Self { k, l, n_pairs, lambdas, phi_m, psi, r })
    }

    /// Re-runs the constructor checks, e.g. after deserialization.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.k, self.n_pairs, self.lambdas, self.phi_m, self.psi, self.r)
    }

    pub fn torus_dim(&self) -> usize {
        self.phi_m.len() - self.k
    }

    /// `Φ(m) + (x, ½ Σ λ_j (q_j² + p_j²))`.
    pub fn model_momentum(&self, x: &[f64], q: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        check_len("x", x.len(), self.k)?;
        check_len("q", q.len(), self.n_pairs)?;
        check_len("p", p.len(), self.n_pairs)?;
        let rho: Vec<f64> = (0..self.l).map(|j| 0.5 * (q[j] * q[j] + p[j] * p[j])).collect();
        Ok(self.assemble(x, &rho))
    }

    fn assemble(&self, x: &[f64], rho: &[f64]) -> Vec<f64> {
        let mut out = self.phi_m.clone();
        for (o, &v) in out.iter_mut().zip(x) {
            *o += v;
        }
        for (lam, &s) in self.lambdas.iter().zip(rho) {
            for (o, &c) in out[self.k..].iter_mut().zip(lam) {
                *o += c * s;
            }
        }
        out
    }

    fn chart_point(&self, x: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        check_len("x", x.len(), self.k)?;
        check_len("q", q.len(), self.n_pairs)?;
        let z: Vec<f64> = x.iter().chain(q).copied().collect();
        let norm = dot(&z, &z).sqrt();
        if norm > self.r {
            return Err(Error::OutOfChart { norm, radius: self.r });
        }
        Ok(z)
    }

    /// `Φ|_Q(x, q)`.
    pub fn model_momentum_restricted(&self, x: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        let psi = self.psi_map(x, q)?;
        Ok(self.assemble(x, &psi[self.k..]))
    }

    /// `Ψ(x, q) = (x, ½(q_j² + ψ_j(x, q)²)_j)`.
    pub fn psi_map(&self, x: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        let z = self.chart_point(x, q)?;
        Ok(self.psi_map_unchecked(&z))
    }

    fn psi_map_unchecked(&self, z: &[f64]) -> Vec<f64> {
        let mut out = z[..self.k].to_vec();
        for (j, p) in self.psi.iter().enumerate() {
            let pv = p.eval(z);
            out.push(0.5 * (z[self.k + j].powi(2) + pv * pv));
        }
        out
    }

    /// `Φ_X|_Q − Φ_X(m)` for `X` in the torus algebra.
    fn component_gain(&self, z: &[f64], lam_x: &[f64]) -> f64 {
        let psi = self.psi_map_unchecked(z);
        psi[self.k..].iter().zip(lam_x).map(|(s, l)| s * l).sum()
    }

    /// `m` is a local maximum of `Φ_X|_Q` iff `λ_j(X) ≤ 0` for all `j`.
    pub fn classify_critical(&self, x_dir: &[f64]) -> Criticality {
        if self.lambdas.iter().all(|lam| dot(lam, x_dir) <= SIGN_TOL) {
            Criticality::LocalMax
        } else {
            Criticality::NotLocalMax
        }
    }

    /// `Γ_m = {Σ s_j λ_j : s_j ≥ 0}`.
    pub fn gamma_cone(&self) -> Result<Cone<f64>> {
        Cone::new(self.torus_dim(), self.lambdas.clone())
    }

    /// Grid search for a point of `Q` with `‖(x, q)‖ ≤ radius` where
    /// `Φ_X|_Q` exceeds `Φ_X(m)` by more than `1e-15`. Only the torus
    /// components of `Φ` pair with `X`, so `x` enters through `ψ` alone.
    pub fn grid_search_exceeds(&self, x_dir: &[f64], radius: f64, step: f64) -> bool {
        let lam_x: Vec<f64> = self.lambdas.iter().map(|lam| dot(lam, x_dir)).collect();
        let dim = self.k + self.n_pairs;
        let m = (radius / step).round() as i64;
        let side = (2 * m + 1) as usize;
        let total = side.pow(dim as u32);
        let full = self.k + self.n_pairs;
        (0..total).into_par_iter().any(|mut idx| {
            let mut z = vec![0.0; full];
            let mut r2 = 0.0;
            for c in 0..dim {
                let v = ((idx % side) as i64 - m) as f64 * step;
                idx /= side;
                r2 += v * v;
                z[c] = v;
            }
            r2 <= radius * radius * (1.0 + 1e-12) && self.component_gain(&z, &lam_x) > 1e-15
        })
    }

    /// Damped Newton for `Ψ(x, q_1..q_l, 0..0) = target`, started at
    /// `x = target_x`, `q_j = sqrt(2 target_j)`.
    pub fn solve_psi(&self, target: &[f64], tol: f64, max_iter: usize) -> NewtonOutcome {
        let k = self.k;
        let dim = k + self.l;
        let full = k + self.n_pairs;
        let mut u: Vec<f64> = (0..dim).map(|i| if i < k { target[i] } else { (2.0 * target[i].max(0.0)).sqrt() }).collect();
        let embed = |u: &[f64]| {
            let mut z = vec![0.0; full];
            z[..dim].copy_from_slice(u);
            z
        };
        let resid = |u: &[f64]| -> (Vec<f64>, f64) {
            let f: Vec<f64> = self.psi_map_unchecked(&embed(u)).iter().zip(target).map(|(a, b)| a - b).collect();
            let n = f.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            (f, n)
        };
        let (mut f, mut fn_) = resid(&u);
        let mut iterations = 0;
        while fn_ > tol && iterations < max_iter {
            iterations += 1;
            let z = embed(&u);
            let jac = Mat::from_fn(dim, dim, |i, c| {
                if i < k {
                    return if i == c { 1.0 } else { 0.0 };
                }
                let j = i - k;
                let pv = self.psi[j].eval(&z);
                let own = if c == k + j { z[k + j] } else { 0.0 };
                own + pv * self.psi[j].partial(&z, c)
            });
            let rhs = Mat::from_vec(dim, 1, f.iter().map(|v| -v).collect()).expect("shape");
            let Ok(step) = solve_linear(&jac, &rhs) else {
                break;
            };
            let mut t = 1.0;
            let mut improved = false;
            while t > 1e-6 {
                let cand: Vec<f64> = u.iter().enumerate().map(|(i, v)| v + t * step[(i, 0)]).collect();
                let (cf, cn) = resid(&cand);
                if cn < fn_ {
                    u = cand;
                    f = cf;
                    fn_ = cn;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        let z = embed(&u);
        let in_chart = dot(&z, &z).sqrt() <= self.r;
        NewtonOutcome { converged: fn_ <= tol && in_chart, residual: fn_, iterations, solution: z }
    }

    /// Probes that `Ψ` covers a ball around `s0·v`. `v ∈ R^l` must satisfy
    /// `Σ v_j λ_j = 0` with `v_j > 0`.
    pub fn inner_point_probe(&self, v: &[f64], s0: f64) -> Result<ProbeReport> {
        check_len("v", v.len(), self.l)?;
        if v.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidInput("v must be strictly positive".into()));
        }
        let t = self.torus_dim();
        let bal: Vec<f64> = (0..t).map(|i| self.lambdas.iter().zip(v).map(|(lam, w)| lam[i] * w).sum()).collect();
        let bal_n = dot(&bal, &bal).sqrt();
        if bal_n > 1e-9 * v.iter().fold(1.0f64, |a, &b| a.max(b)) {
            return Err(Error::InvalidInput(format!("Σ v_j λ_j has norm {bal_n:e}")));
        }
        if !(s0 > 0.0) {
            return Err(Error::InvalidInput(format!("s0 = {s0}")));
        }
        if !crate::geomcone::cone_is_full(&self.gamma_cone()?)? {
            return Err(Error::InvalidInput("weight cone is not full".into()));
        }
        let dim = self.k + self.l;
        let c = v.iter().copied().fold(f64::INFINITY, f64::min);
        let radius = 0.5 * s0 * c;
        let mut center = vec![0.0; self.k];
        center.extend(v.iter().map(|x| s0 * x));
        let mut targets = vec![center.clone()];
        for i in 0..dim {
            for s in [-1.0, 1.0] {
                let mut p = center.clone();
                p[i] += s * 0.5 * radius;
                targets.push(p);
            }
        }
        for s in [-1.0, 1.0] {
            let off = s * 0.5 * radius / (dim as f64).sqrt();
            targets.push(center.iter().map(|x| x + off).collect());
        }
        // iterate well past the acceptance threshold; Newton converges quadratically here
        let outcomes: Vec<NewtonOutcome> = targets.par_iter().map(|tg| self.solve_psi(tg, 1e-14, 100)).collect();
        let failures: Vec<usize> = outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| o.residual > PROBE_RESIDUAL || dot(&o.solution, &o.solution).sqrt() > self.r)
            .map(|(i, _)| i)
            .collect();
        let max_residual = outcomes.iter().map(|o| o.residual).fold(0.0, f64::max);
        Ok(ProbeReport { targets: targets.len(), radius, max_residual, success: failures.is_empty(), failures })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub converged: bool,
    pub residual: f64,
    pub iterations: usize,
    /// Chart point `(x, q)` reached.
    pub solution: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub targets: usize,
    pub radius: f64,
    pub max_residual: f64,
    /// Indices of targets where Newton did not converge inside the chart.
    pub failures: Vec<usize>,
    pub success: bool,
}

fn random_monomial(vars: usize, degree: u32, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut e = vec![0; vars];
    for _ in 0..degree {
        e[rng.random_range(0..vars)] += 1;
    }
    e
}

/// Random `ψ` with two quadratic, one cubic and one quartic term and
/// coefficients uniform in `[-bound, bound]`.
pub fn random_psi(vars: usize, bound: f64, rng: &mut ChaCha8Rng) -> Polynomial {
    let terms = [2, 2, 3, 4]
        .into_iter()
        .map(|d| Term { exponents: random_monomial(vars, d, rng), coeff: rng.random_range(-bound..=bound) })
        .collect();
    Polynomial { terms }
}

fn random_weight(t: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..t).map(|_| rng.sample(StandardNormal)).collect();
        if dot(&w, &w).sqrt() > 0.2 {
            return w;
        }
    }
}

/// Random model with `k ≤ 1`, `dim 𝔱 ≤ 2`, `l ≤ 3`, `N ≤ 4`.
pub fn random_model(rng: &mut ChaCha8Rng) -> LocalModel {
    let k = rng.random_range(0..=1);
    let t = rng.random_range(1..=2);
    let l = rng.random_range(1..=3);
    let n = rng.random_range(l..=4);
    let lambdas = (0..l).map(|_| random_weight(t, rng)).collect();
    let phi_m = (0..k + t).map(|_| rng.random_range(-1.0..1.0)).collect();
    let psi = (0..l).map(|_| random_psi(k + n, 1.0, rng)).collect();
    LocalModel::new(k, n, lambdas, phi_m, psi, 1.0).expect("consistent sizes")
}

/// Model whose weights admit the planted relation `Σ v_j λ_j = 0`,
/// `v_j > 0`, making `Γ_m` full. Returns the model and `v`.
pub fn planted_full_model(psi_bound: f64, rng: &mut ChaCha8Rng) -> (LocalModel, Vec<f64>) {
    loop {
        let k = rng.random_range(0..=1);
        let t = rng.random_range(1..=2);
        let l = t + 1;
        let n = rng.random_range(l..=4);
        let v: Vec<f64> = (0..l).map(|_| rng.random_range(0.5..1.5)).collect();
        let mut lambdas: Vec<Vec<f64>> = (0..l - 1).map(|_| random_weight(t, rng)).collect();
        let last: Vec<f64> = (0..t).map(|i| -lambdas.iter().zip(&v).map(|(lam, w)| lam[i] * w).sum::<f64>() / v[l - 1]).collect();
        if dot(&last, &last).sqrt() < 0.2 {
            continue;
        }
        lambdas.push(last);
        let phi_m = (0..k + t).map(|_| rng.random_range(-1.0..1.0)).collect();
        let psi = (0..l).map(|_| random_psi(k + n, psi_bound, rng)).collect();
        let model = LocalModel::new(k, n, lambdas, phi_m, psi, 1.0).expect("consistent sizes");
        if crate::geomcone::cone_is_full(&model.gamma_cone().expect("small torus")).unwrap_or(false) {
            return (model, v);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalModelSuiteReport {
    pub models: usize,
    pub planted: usize,
    pub seed: u64,
    pub radius: f64,
    pub step: f64,
    pub s0: f64,
    pub local_max: usize,
    pub not_local_max: usize,
    pub agreements: usize,
    /// Model indices where the grid search contradicts the classification.
    pub disagreements: Vec<usize>,
    pub probe_successes: usize,
    pub probe_max_residual: f64,
    pub probe_failures: Vec<usize>,
    pub pass: bool,
}

pub const GRID_RADIUS: f64 = 0.01;
pub const GRID_STEP: f64 = 1e-3;
pub const PROBE_RESIDUAL: f64 = 1e-6;

/// Cross-checks `classify_critical` against grid search on `models` random
/// models and runs `inner_point_probe` on `planted` full-cone models.
/// Random model `i` uses stream `2i`, planted model `i` stream `2i + 1`.
pub fn run_localmodel_suite(models: usize, planted: usize, seed: u64, s0: f64) -> Result<LocalModelSuiteReport> {
    if models + planted == 0 {
        return Err(Error::InvalidInput("nothing to run".into()));
    }
    if !(s0 > 0.0 && s0 <= 1.0) {
        return Err(Error::InvalidInput(format!("s0 must lie in (0, 1], got {s0}")));
    }
    let mut local_max = 0;
    let mut disagreements = Vec::new();
    for i in 0..models {
        let rng = &mut crate::sampling::stream_rng(seed, 2 * i as u64);
        let m = random_model(rng);
        // every other model gets a direction on which all weights are negative
        let x: Vec<f64> = if i % 2 == 1 {
            let s: Vec<f64> = (0..m.torus_dim()).map(|c| m.lambdas.iter().map(|lam| lam[c]).sum()).collect();
            if dot(&s, &s) > 1e-6 { s.iter().map(|v| -v).collect() } else { (0..m.torus_dim()).map(|_| rng.sample(StandardNormal)).collect() }
        } else {
            (0..m.torus_dim()).map(|_| rng.sample(StandardNormal)).collect()
        };
        let class = m.classify_critical(&x);
        if class == Criticality::LocalMax {
            local_max += 1;
        }
        if m.grid_search_exceeds(&x, GRID_RADIUS, GRID_STEP) != (class == Criticality::NotLocalMax) {
            disagreements.push(i);
        }
    }
    let probes: Vec<ProbeReport> = (0..planted)
        .into_par_iter()
        .map(|i| {
            let (m, v) = planted_full_model(0.1, &mut crate::sampling::stream_rng(seed, 2 * i as u64 + 1));
            m.inner_point_probe(&v, s0)
        })
        .collect::<Result<_>>()?;
    let probe_failures: Vec<usize> =
        probes.iter().enumerate().filter(|(_, p)| !p.success || p.max_residual > PROBE_RESIDUAL).map(|(i, _)| i).collect();
    let report = LocalModelSuiteReport {
        models,
        planted,
        seed,
        radius: GRID_RADIUS,
        step: GRID_STEP,
        s0,
        local_max,
        not_local_max: models - local_max,
        agreements: models - disagreements.len(),
        pass: disagreements.is_empty() && probe_failures.is_empty(),
        disagreements,
        probe_successes: planted - probe_failures.len(),
        probe_max_residual: probes.iter().map(|p| p.max_residual).fold(0.0, f64::max),
        probe_failures,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomcone::cone_is_full;
    use crate::sampling::stream_rng;

    fn simple(lambdas: Vec<Vec<f64>>, psi: Vec<Polynomial>) -> LocalModel {
        let l = lambdas.len();
        let t = lambdas[0].len();
        LocalModel::new(1, l.max(1), lambdas, vec![0.5; 1 + t], psi, 1.0).unwrap()
    }

    #[test]
    fn polynomial_rejects_low_degree() {
        assert!(Polynomial::new(vec![Term { exponents: vec![1, 0], coeff: 1.0 }]).is_err());
        assert!(Polynomial::new(vec![Term { exponents: vec![0, 0], coeff: 1.0 }]).is_err());
        assert!(Polynomial::new(vec![Term { exponents: vec![3, 2], coeff: 1.0 }]).is_err());
        let p = Polynomial::new(vec![Term { exponents: vec![1, 2], coeff: 2.0 }]).unwrap();
        assert_eq!(p.eval(&[3.0, 0.5]), 1.5);
        assert_eq!(p.partial(&[3.0, 0.5], 1), 6.0);
        assert_eq!(p.partial(&[3.0, 0.5], 0), 0.5);
    }

    #[test]
    fn momentum_formula() {
        let m = simple(vec![vec![2.0, -1.0]], vec![Polynomial::zero()]);
        assert_eq!(m.model_momentum(&[0.0], &[0.0], &[0.0]).unwrap(), m.phi_m);
        let v = m.model_momentum(&[0.0], &[1.0], &[1.0]).unwrap();
        assert_eq!(v, vec![0.5, 2.5, -0.5]);
        assert!(m.model_momentum(&[0.0, 1.0], &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn momentum_is_rotation_invariant() {
        let mut rng = stream_rng(1, 0);
        let m = random_model(&mut rng);
        for _ in 0..50 {
            let x: Vec<f64> = (0..m.k).map(|_| rng.random_range(-1.0..1.0)).collect();
            let q: Vec<f64> = (0..m.n_pairs).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p: Vec<f64> = (0..m.n_pairs).map(|_| rng.random_range(-1.0..1.0)).collect();
            let th: f64 = rng.random_range(0.0..6.3);
            let (s, c) = th.sin_cos();
            let q2: Vec<f64> = q.iter().zip(&p).map(|(a, b)| c * a - s * b).collect();
            let p2: Vec<f64> = q.iter().zip(&p).map(|(a, b)| s * a + c * b).collect();
            let a = m.model_momentum(&x, &q, &p).unwrap();
            let b = m.model_momentum(&x, &q2, &p2).unwrap();
            assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-14));
        }
    }

    #[test]
    fn restricted_momentum_examples() {
        let sq = Polynomial::new(vec![Term { exponents: vec![0, 2], coeff: 1.0 }]).unwrap();
        let m = simple(vec![vec![1.0]], vec![sq]);
        let v = m.model_momentum_restricted(&[0.2], &[0.1]).unwrap();
        let expect = [0.5 + 0.2, 0.5 + 0.5 * (0.01 + 0.0001)];
        assert!((v[0] - expect[0]).abs() < 1e-15 && (v[1] - expect[1]).abs() < 1e-15);
        assert_eq!(m.model_momentum_restricted(&[0.0], &[0.0]).unwrap(), m.phi_m);
        assert!(matches!(m.psi_map(&[1.0], &[1.0]), Err(Error::OutOfChart { .. })));
        let z = simple(vec![vec![1.0]], vec![Polynomial::zero()]);
        assert_eq!(z.model_momentum_restricted(&[0.3], &[0.4]).unwrap(), z.model_momentum(&[0.3], &[0.4], &[0.0]).unwrap());
    }

    #[test]
    fn composition_law() {
        let mut rng = stream_rng(2, 0);
        for i in 0..100 {
            let m = random_model(&mut stream_rng(2, i + 1));
            let x: Vec<f64> = (0..m.k).map(|_| rng.random_range(-0.3..0.3)).collect();
            let q: Vec<f64> = (0..m.n_pairs).map(|_| rng.random_range(-0.3..0.3)).collect();
            let psi = m.psi_map(&x, &q).unwrap();
            assert!(psi[m.k..].iter().all(|&v| v >= 0.0));
            let direct = m.model_momentum_restricted(&x, &q).unwrap();
            let mut via = m.phi_m.clone();
            for i in 0..m.k {
                via[i] += psi[i];
            }
            for (lam, s) in m.lambdas.iter().zip(&psi[m.k..]) {
                for (o, c) in via[m.k..].iter_mut().zip(lam) {
                    *o += c * s;
                }
            }
            assert!(direct.iter().zip(&via).all(|(a, b)| (a - b).abs() < 1e-13));
        }
    }

    #[test]
    fn classification_examples() {
        let m = simple(vec![vec![1.0], vec![2.0]], vec![Polynomial::zero(), Polynomial::zero()]);
        assert_eq!(m.classify_critical(&[-1.0]), Criticality::LocalMax);
        assert_eq!(m.classify_critical(&[1.0]), Criticality::NotLocalMax);
        let b = simple(vec![vec![1.0, 0.0]], vec![Polynomial::zero()]);
        assert_eq!(b.classify_critical(&[0.0, 1.0]), Criticality::LocalMax);
    }

    #[test]
    fn gamma_cone_fullness() {
        let full = LocalModel::new(0, 3, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]], vec![0.0; 2], vec![Polynomial::zero(); 3], 1.0).unwrap();
        assert!(cone_is_full(&full.gamma_cone().unwrap()).unwrap());
        let ray = simple(vec![vec![1.0]], vec![Polynomial::zero()]);
        assert!(!cone_is_full(&ray.gamma_cone().unwrap()).unwrap());
        for i in 0..10 {
            let (m, _) = planted_full_model(0.1, &mut stream_rng(3, i));
            assert!(cone_is_full(&m.gamma_cone().unwrap()).unwrap());
        }
    }

    #[test]
    fn grid_search_agrees_with_classification() {
        for i in 0..8 {
            let rng = &mut stream_rng(4, i);
            let m = random_model(rng);
            let x: Vec<f64> = (0..m.torus_dim()).map(|_| rng.sample(StandardNormal)).collect();
            let exceeds = m.grid_search_exceeds(&x, 0.01, 1e-3);
            assert_eq!(exceeds, m.classify_critical(&x) == Criticality::NotLocalMax);
        }
    }

    #[test]
    fn probe_without_psi_always_succeeds() {
        let m = LocalModel::new(0, 2, vec![vec![1.0], vec![-2.0]], vec![0.0], vec![Polynomial::zero(); 2], 1.0).unwrap();
        for s0 in [0.001, 0.01, 0.1] {
            assert!(m.inner_point_probe(&[2.0, 1.0], s0).unwrap().success);
        }
        assert!(m.inner_point_probe(&[1.0, 1.0], 0.01).is_err());
    }

    #[test]
    fn probe_on_planted_models() {
        for i in 0..5 {
            let (m, v) = planted_full_model(0.1, &mut stream_rng(5, i));
            let rep = m.inner_point_probe(&v, 0.01).unwrap();
            assert!(rep.success && rep.max_residual <= 1e-6, "{rep:?}");
        }
    }

    #[test]
    fn small_suite() {
        let rep = run_localmodel_suite(6, 3, 11, 0.01).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.local_max > 0 && rep.not_local_max > 0);
        assert!(run_localmodel_suite(1, 0, 1, 0.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = random_model(&mut stream_rng(6, 0));
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"N\"") && s.contains("psi_coefficients"));
        let back: LocalModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back.validated().unwrap(), m);
        let bad = s.replacen("\"exponents\":[", "\"exponents\":[9,", 1);
        assert!(serde_json::from_str::<LocalModel>(&bad).is_err());
    }
}
