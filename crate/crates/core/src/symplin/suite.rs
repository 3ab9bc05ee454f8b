use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_lemma_2_1_2, EquivalenceReport, InstanceJson, LinInvolution, LinTorusAction, SympSpace};
use crate::error::{Error, Result};
use crate::numkit::{inverse, singular_values, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Both eigenspaces Lagrangian; a witnessing torus action is supplied.
    AntiSymplectic,
    /// `V₁` Lagrangian, `V₋₁` sheared off the Lagrangian locus; the action
    /// supplied is built for the unsheared frame and is no witness.
    SkewedMinus,
    /// Eigenspaces of unequal dimension.
    UnequalDims,
    /// Random complementary eigenspaces of equal dimension.
    RandomSplit,
    /// `τ = ±I`.
    PlusMinusIdentity,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::AntiSymplectic,
        InstanceKind::SkewedMinus,
        InstanceKind::UnequalDims,
        InstanceKind::RandomSplit,
        InstanceKind::PlusMinusIdentity,
    ];

    fn name(self) -> &'static str {
        match self {
            InstanceKind::AntiSymplectic => "anti_symplectic",
            InstanceKind::SkewedMinus => "skewed_minus",
            InstanceKind::UnequalDims => "unequal_dims",
            InstanceKind::RandomSplit => "random_split",
            InstanceKind::PlusMinusIdentity => "plus_minus_identity",
        }
    }
}

pub struct SymplecticInstance {
    pub kind: InstanceKind,
    pub space: SympSpace<f64>,
    pub inv: LinInvolution<f64>,
    pub action: Option<LinTorusAction<f64>>,
    /// Value statement (1) must take by construction, when it is forced.
    pub expected_s1: Option<bool>,
}

impl SymplecticInstance {
    pub fn to_json(&self) -> InstanceJson {
        InstanceJson {
            omega: self.space.omega().clone(),
            tau: self.inv.matrix().clone(),
            generators: self.action.as_ref().map(|a| a.generators().to_vec()).unwrap_or_default(),
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<f64> {
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random matrix with condition number below 1e3.
fn well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> Mat<f64> {
    loop {
        let g = gaussian(rng, n, n);
        let s = singular_values(&g);
        if s[n - 1] > 1e-3 * s[0] {
            return g;
        }
    }
}

/// Symplectic Gram–Schmidt: columns `E`, `F` with `EᵀΩE = FᵀΩF = 0`,
/// `EᵀΩF = I`, built from random vectors.
fn darboux_frame(space: &SympSpace<f64>, rng: &mut ChaCha8Rng) -> (Mat<f64>, Mat<f64>) {
    let dim = space.dim();
    let n = dim / 2;
    let mut pool = well_conditioned(rng, dim).columns();
    let mut es = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    for _ in 0..n {
        let e = pool.remove(0);
        let (best, _) = pool
            .iter()
            .enumerate()
            .map(|(i, w)| (i, space.pairing(&e, w).abs()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let w = pool.remove(best);
        let c = space.pairing(&e, &w);
        let f: Vec<f64> = w.iter().map(|x| x / c).collect();
        for x in pool.iter_mut() {
            let a = space.pairing(x, &f);
            let b = space.pairing(x, &e);
            for k in 0..dim {
                x[k] += -a * e[k] + b * f[k];
            }
        }
        es.push(e);
        fs.push(f);
    }
    (Mat::from_columns(dim, &es).expect("frame shape"), Mat::from_columns(dim, &fs).expect("frame shape"))
}

fn involution_from_split(p: &Mat<f64>, k: usize) -> Result<LinInvolution<f64>> {
    let n = p.rows();
    let d = Mat::diag(&(0..n).map(|i| if i < k { 1.0 } else { -1.0 }).collect::<Vec<_>>());
    LinInvolution::new(&(p * &d) * &inverse(p)?)
}

/// Rotation generators of each Darboux pair `(e_i, f_i)` with random speeds.
fn pair_rotations(e: &Mat<f64>, f: &Mat<f64>, rng: &mut ChaCha8Rng) -> Result<Vec<Mat<f64>>> {
    let n = e.cols();
    let frame = e.hstack(f)?;
    let frame_inv = inverse(&frame)?;
    (0..n)
        .map(|i| {
            let speed = rng.random_range(0.5..2.0);
            let mut r = Mat::<f64>::zeros(2 * n, 2 * n);
            r[(n + i, i)] = speed;
            r[(i, n + i)] = -speed;
            Ok(&(&frame * &r) * &frame_inv)
        })
        .collect()
}

/// Largest spectral norm accepted for a sampled involution. Beyond this the
/// rounding error in the derived maps swamps the structure being tested.
pub const MAX_INVOLUTION_NORM: f64 = 100.0;

/// Draws one instance of the given kind on `R^{2n}`, redrawing until
/// `‖τ‖₂ ≤ MAX_INVOLUTION_NORM`.
pub fn random_instance(kind: InstanceKind, n: usize, rng: &mut ChaCha8Rng) -> Result<SymplecticInstance> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    loop {
        let inst = draw_instance(kind, n, rng)?;
        if singular_values(inst.inv.matrix())[0] <= MAX_INVOLUTION_NORM {
            return Ok(inst);
        }
    }
}

fn draw_instance(kind: InstanceKind, n: usize, rng: &mut ChaCha8Rng) -> Result<SymplecticInstance> {
    let dim = 2 * n;
    let s = well_conditioned(rng, dim);
    let omega = &(&s.transpose() * SympSpace::<f64>::standard(n).omega()) * &s;
    let space = SympSpace::new(omega)?;
    let (e, f) = darboux_frame(&space, rng);

    let sym_shear = |rng: &mut ChaCha8Rng| {
        let g = gaussian(rng, n, n);
        (&g + &g.transpose()).scale(0.25)
    };

    let (inv, action, expected_s1) = match kind {
        InstanceKind::AntiSymplectic => {
            let fp = &f + &(&e * &sym_shear(rng));
            let inv = involution_from_split(&e.hstack(&fp)?, n)?;
            let action = LinTorusAction::new(&space, pair_rotations(&e, &fp, rng)?)?;
            (inv, Some(action), Some(true))
        }
        InstanceKind::SkewedMinus => {
            let mut shear = sym_shear(rng);
            if n >= 2 {
                // antisymmetric part bounded away from zero
                let amp = rng.random_range(0.5..1.5);
                shear[(0, 1)] += amp;
                shear[(1, 0)] -= amp;
            }
            let fp = &f + &(&e * &shear);
            let inv = involution_from_split(&e.hstack(&fp)?, n)?;
            let action = LinTorusAction::new(&space, pair_rotations(&e, &f, rng)?)?;
            (inv, Some(action), (n >= 2).then_some(false))
        }
        InstanceKind::UnequalDims => {
            let mut k = rng.random_range(0..dim);
            if k >= n {
                k += 1;
            }
            (involution_from_split(&well_conditioned(rng, dim), k)?, None, Some(false))
        }
        InstanceKind::RandomSplit => (involution_from_split(&well_conditioned(rng, dim), n)?, None, None),
        InstanceKind::PlusMinusIdentity => {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (LinInvolution::new(Mat::identity(dim).scale(sign))?, None, Some(false))
        }
    };
    Ok(SymplecticInstance { kind, space, inv, action, expected_s1 })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub kind: InstanceKind,
    pub dim: usize,
    pub report: EquivalenceReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub trials: u64,
    pub dim_max: usize,
    pub seed: u64,
    pub inconsistencies: usize,
    /// Instances whose statement (1) disagrees with the value forced by construction.
    pub unexpected: usize,
    pub s4_witnessed: usize,
    pub s4_inconclusive: usize,
    pub s3_construction_failures: usize,
    pub per_kind: BTreeMap<String, usize>,
    pub per_dim: BTreeMap<usize, usize>,
    pub failures: Vec<TrialFailure>,
    pub pass: bool,
}

/// Evaluates the four statements on `trials` random instances of dimension
/// `2..=dim_max`. Trial `i` uses stream `i` of a generator seeded by `seed`.
pub fn run_equivalence_suite(trials: u64, dim_max: usize, seed: u64) -> Result<SuiteReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if dim_max < 2 || dim_max % 2 != 0 || dim_max > 10 {
        return Err(Error::InvalidInput(format!("dim_max must be even in 2..=10, got {dim_max}")));
    }
    let outcomes: Vec<Result<(u64, InstanceKind, usize, EquivalenceReport, Option<bool>)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let kind = InstanceKind::ALL[(t % InstanceKind::ALL.len() as u64) as usize];
            let n = rng.random_range(1..=dim_max / 2);
            let inst = random_instance(kind, n, &mut rng)?;
            let report = check_lemma_2_1_2(&inst.space, &inst.inv, inst.action.as_ref())?;
            Ok((t, kind, 2 * n, report, inst.expected_s1))
        })
        .collect();

    let mut rep = SuiteReport {
        trials,
        dim_max,
        seed,
        inconsistencies: 0,
        unexpected: 0,
        s4_witnessed: 0,
        s4_inconclusive: 0,
        s3_construction_failures: 0,
        per_kind: BTreeMap::new(),
        per_dim: BTreeMap::new(),
        failures: Vec::new(),
        pass: false,
    };
    for o in outcomes {
        let (trial, kind, dim, report, expected) = o?;
        *rep.per_kind.entry(kind.name().to_string()).or_default() += 1;
        *rep.per_dim.entry(dim).or_default() += 1;
        match report.s4 {
            Some(_) => rep.s4_witnessed += 1,
            None if kind == InstanceKind::AntiSymplectic || kind == InstanceKind::SkewedMinus => {
                rep.s4_inconclusive += 1
            }
            None => {}
        }
        if report.s3_construction_failed {
            rep.s3_construction_failures += 1;
        }
        let surprising = expected.is_some_and(|s| s != report.s1);
        if surprising {
            rep.unexpected += 1;
        }
        if !report.consistent {
            rep.inconsistencies += 1;
        }
        if surprising || !report.consistent {
            rep.failures.push(TrialFailure { trial, kind, dim, report });
        }
    }
    rep.pass = rep.inconsistencies == 0 && rep.unexpected == 0;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::{eigensplit, is_lagrangian};

    #[test]
    fn darboux_frame_is_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=5 {
            let s = well_conditioned(&mut rng, 2 * n);
            let space = SympSpace::new(&(&s.transpose() * SympSpace::<f64>::standard(n).omega()) * &s).unwrap();
            let (e, f) = darboux_frame(&space, &mut rng);
            assert!(space.gram(&e, &e).max_abs() < 1e-9);
            assert!(space.gram(&f, &f).max_abs() < 1e-9);
            assert!(space.gram(&e, &f).max_abs_diff(&Mat::identity(n)) < 1e-9);
        }
    }

    #[test]
    fn instance_kinds_have_the_intended_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = random_instance(InstanceKind::AntiSymplectic, 3, &mut rng).unwrap();
        let (p, m) = eigensplit(&inst.inv).unwrap();
        assert!(is_lagrangian(&inst.space, &p).unwrap() && is_lagrangian(&inst.space, &m).unwrap());
        assert_eq!(inst.action.as_ref().unwrap().fixed_subspace(6).dim(), 0);

        let inst = random_instance(InstanceKind::SkewedMinus, 3, &mut rng).unwrap();
        let (p, m) = eigensplit(&inst.inv).unwrap();
        assert!(is_lagrangian(&inst.space, &p).unwrap());
        assert!(!is_lagrangian(&inst.space, &m).unwrap());

        let inst = random_instance(InstanceKind::UnequalDims, 2, &mut rng).unwrap();
        let (p, m) = eigensplit(&inst.inv).unwrap();
        assert_ne!(p.dim(), m.dim());
    }

    #[test]
    fn witnessed_action_gives_true_s4() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inst = random_instance(InstanceKind::AntiSymplectic, 4, &mut rng).unwrap();
        let rep = check_lemma_2_1_2(&inst.space, &inst.inv, inst.action.as_ref()).unwrap();
        assert_eq!(rep.s4, Some(true), "{:?}", rep.notes);
        assert!(rep.consistent);
    }

    #[test]
    fn small_suite_is_consistent_and_deterministic() {
        let a = run_equivalence_suite(40, 10, 11).unwrap();
        assert!(a.pass, "{:?}", a.failures);
        let b = run_equivalence_suite(40, 10, 11).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn suite_rejects_bad_arguments() {
        assert!(run_equivalence_suite(0, 10, 1).is_err());
        assert!(run_equivalence_suite(5, 7, 1).is_err());
        assert!(run_equivalence_suite(5, 12, 1).is_err());
    }

    #[test]
    fn instance_json_evaluates_like_the_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let inst = random_instance(InstanceKind::AntiSymplectic, 2, &mut rng).unwrap();
        let json = serde_json::to_string(&inst.to_json()).unwrap();
        let back: InstanceJson = serde_json::from_str(&json).unwrap();
        let rep = back.evaluate().unwrap();
        assert!(rep.s1 && rep.s2 && rep.s3 && rep.s4 == Some(true));
    }
}
