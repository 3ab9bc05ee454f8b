use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cone_is_full, cone_membership, cones_equal, dual_cone, Cone, MAX_CONE_DIM};
use crate::error::{Error, Result};
use crate::sampling::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeCase {
    Random,
    PlantedFull,
    PlantedHalfSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeFailure {
    pub dim: usize,
    pub index: usize,
    pub case: ConeCase,
    pub generators: Vec<Vec<f64>>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualitySuiteReport {
    pub per_dim: usize,
    pub seed: u64,
    pub cones_checked: usize,
    pub bidual_failures: usize,
    pub fullness_failures: usize,
    pub planted_full: usize,
    pub planted_not_full: usize,
    pub failures: Vec<ConeFailure>,
    pub pass: bool,
}

fn gaussian(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// `l` generators with `Σ v_j g_j = 0` for random `v_j > 0`; with `l > d`
/// they span and the cone is the whole space.
fn planted_full(d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let l = rng.random_range(d + 1..=d + 3);
    let v: Vec<f64> = (0..l).map(|_| rng.random_range(0.5..1.5)).collect();
    let mut gens: Vec<Vec<f64>> = (0..l - 1).map(|_| gaussian(d, rng)).collect();
    let last = (0..d).map(|i| -gens.iter().zip(&v).map(|(g, w)| g[i] * w).sum::<f64>() / v[l - 1]).collect();
    gens.push(last);
    gens
}

/// Generators strictly inside a random open half-space, so `n ∈ C*`.
fn planted_half_space(d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = gaussian(d, rng);
    let nn = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    let l = rng.random_range(1..=2 * d);
    (0..l)
        .map(|_| {
            let mut g = gaussian(d, rng);
            let s = g.iter().zip(&n).map(|(a, b)| a * b).sum::<f64>() / nn;
            let lift = s.abs() + rng.random_range(0.1..1.0);
            for (gi, ni) in g.iter_mut().zip(&n) {
                *gi += (lift - s) * ni / nn;
            }
            g
        })
        .collect()
}

fn check_one(d: usize, index: usize, case: ConeCase, gens: Vec<Vec<f64>>) -> Result<(bool, bool, Option<ConeFailure>)> {
    let c = Cone::new(d, gens.clone())?;
    let bidual = cones_equal(&c, &dual_cone(&dual_cone(&c)?)?)?;
    let full = cone_is_full(&c)?;
    let mut units_inside = true;
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            units_inside &= cone_membership(&e, &c)?;
        }
    }
    let expected = match case {
        ConeCase::Random => units_inside,
        ConeCase::PlantedFull => true,
        ConeCase::PlantedHalfSpace => false,
    };
    let fullness_ok = full == expected && full == units_inside;
    let failure = (!bidual || !fullness_ok).then(|| ConeFailure {
        dim: d,
        index,
        case,
        generators: gens,
        reason: if bidual { format!("cone_is_full = {full}, expected {expected}, unit-vector oracle {units_inside}") } else { "bidual differs".into() },
    });
    Ok((bidual, fullness_ok, failure))
}

/// Biduality and fullness checks on `per_dim` random cones plus `per_dim`
/// planted full and non-full cones in each dimension 2..=4.
pub fn run_duality_suite(per_dim: usize, seed: u64) -> Result<DualitySuiteReport> {
    if per_dim == 0 {
        return Err(Error::InvalidInput("need at least one cone per dimension".into()));
    }
    let cases = [ConeCase::Random, ConeCase::PlantedFull, ConeCase::PlantedHalfSpace];
    let jobs: Vec<(usize, usize, ConeCase)> = (2..=MAX_CONE_DIM)
        .flat_map(|d| cases.iter().flat_map(move |&c| (0..per_dim).map(move |i| (d, i, c))))
        .collect();
    let results: Vec<(bool, bool, Option<ConeFailure>)> = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &(d, i, case))| {
            let rng = &mut stream_rng(seed, j as u64);
            let gens = match case {
                ConeCase::Random => {
                    let l = rng.random_range(1..=6);
                    (0..l).map(|_| gaussian(d, rng)).collect()
                }
                ConeCase::PlantedFull => planted_full(d, rng),
                ConeCase::PlantedHalfSpace => planted_half_space(d, rng),
            };
            check_one(d, i, case, gens)
        })
        .collect::<Result<_>>()?;
    let bidual_failures = results.iter().filter(|r| !r.0).count();
    let fullness_failures = results.iter().filter(|r| !r.1).count();
    Ok(DualitySuiteReport {
        per_dim,
        seed,
        cones_checked: results.len(),
        bidual_failures,
        fullness_failures,
        planted_full: per_dim * (MAX_CONE_DIM - 1),
        planted_not_full: per_dim * (MAX_CONE_DIM - 1),
        failures: results.into_iter().filter_map(|r| r.2).collect(),
        pass: bidual_failures == 0 && fullness_failures == 0,
    })
}
