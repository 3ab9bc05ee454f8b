//! Finitely generated cones, dual cones, convex hulls in dimension <= 3
//! and half-space membership.

mod hull;
mod lp;
mod suite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{null_space, real, Mat, Real};

pub use hull::{convex_hull, polytope_contains, Facet, Polytope};
pub use lp::feasible_nonneg;
pub use suite::{run_duality_suite, ConeCase, ConeFailure, DualitySuiteReport};

pub const MAX_CONE_DIM: usize = 4;
/// Default feasibility tolerance for cone membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Unit generators closer than this are treated as the same ray.
pub const PARALLEL_TOL: f64 = 1e-9;

/// `{Σ s_j g_j : s_j >= 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cone<R> {
    dim: usize,
    generators: Vec<Vec<R>>,
}

fn norm<R: Real>(v: &[R]) -> R {
    v.iter().map(|&x| x * x).fold(R::zero(), |a, x| a + x).sqrt()
}

fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).map(|(&x, &y)| x * y).fold(R::zero(), |s, x| s + x)
}

impl<R: Real> Cone<R> {
    /// Zero generators are dropped.
    pub fn new(dim: usize, generators: Vec<Vec<R>>) -> Result<Self> {
        if dim > MAX_CONE_DIM {
            return Err(Error::DimensionTooLarge(dim, MAX_CONE_DIM));
        }
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch(format!("generator of length {} in dimension {dim}", g.len())));
        }
        let generators = generators.into_iter().filter(|g| g.iter().any(|&x| x != R::zero())).collect();
        Ok(Self { dim, generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<R>] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }
}

fn unit_columns<R: Real>(gens: &[Vec<R>]) -> Vec<Vec<R>> {
    gens.iter()
        .map(|g| {
            let n = norm(g);
            g.iter().map(|&x| x / n).collect()
        })
        .collect()
}

/// Drops unit vectors within `PARALLEL_TOL` of an earlier one; near-duplicates
/// make the simplex bases ill-conditioned without changing the cone.
fn merge_parallel<R: Real>(units: Vec<Vec<R>>) -> Vec<Vec<R>> {
    let mut out: Vec<Vec<R>> = Vec::with_capacity(units.len());
    for u in units {
        let dup = out.iter().any(|v| v.iter().zip(&u).all(|(&a, &b)| (a - b).abs() <= real(PARALLEL_TOL)));
        if !dup {
            out.push(u);
        }
    }
    out
}

/// Whether `point` is a nonnegative combination of the generators.
pub fn cone_membership<R: Real>(point: &[R], c: &Cone<R>) -> Result<bool> {
    if c.dim > MAX_CONE_DIM {
        return Err(Error::DimensionTooLarge(c.dim, MAX_CONE_DIM));
    }
    if point.len() != c.dim {
        return Err(Error::DimensionMismatch(format!("point of length {} in dimension {}", point.len(), c.dim)));
    }
    let pn = norm(point);
    if pn == R::zero() {
        return Ok(true);
    }
    let target: Vec<R> = point.iter().map(|&x| x / pn).collect();
    Ok(feasible_nonneg(&merge_parallel(unit_columns(&c.generators)), &target, real(MEMBERSHIP_TOL)).is_some())
}

/// Drops rays lying in the cone spanned by the remaining ones.
fn prune_redundant<R: Real>(mut rays: Vec<Vec<R>>) -> Vec<Vec<R>> {
    let mut i = 0;
    while i < rays.len() {
        let others: Vec<Vec<R>> = rays.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r.clone()).collect();
        if feasible_nonneg(&others, &rays[i], real(1e-10)).is_some() {
            rays.remove(i);
        } else {
            i += 1;
        }
    }
    rays
}

/// Recomputes an extreme ray from the constraints it is tight on, which
/// removes the drift accumulated by repeated pairwise combination.
fn refine_ray<R: Real>(r: Vec<R>, constraints: &[Vec<R>]) -> Vec<R> {
    let d = r.len();
    let tight: Vec<&Vec<R>> = constraints.iter().filter(|g| dot(g, &r).abs() <= real(1e-7)).collect();
    if tight.len() < d - 1 {
        return r;
    }
    let a = Mat::from_fn(tight.len(), d, |i, j| tight[i][j]);
    let ns = null_space(&a, real(1e-7));
    if ns.cols() != 1 {
        return r;
    }
    let mut v: Vec<R> = (0..d).map(|i| ns[(i, 0)]).collect();
    if dot(&v, &r) < R::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    // refuse a refinement that moves the ray noticeably
    let moved = v.iter().zip(&r).map(|(&a, &b)| (a - b).abs()).fold(R::zero(), R::max);
    if moved > real(1e-6) {
        return r;
    }
    v
}

/// Generators of `C* = {y : <y, x> >= 0 for all x in C}` by double
/// description: start from the whole space and cut by one generator at a time.
pub fn dual_cone<R: Real>(c: &Cone<R>) -> Result<Cone<R>> {
    let d = c.dim;
    if d > MAX_CONE_DIM {
        return Err(Error::DimensionTooLarge(d, MAX_CONE_DIM));
    }
    let mut rays: Vec<Vec<R>> = Vec::with_capacity(2 * d);
    for i in 0..d {
        for s in [R::one(), -R::one()] {
            let mut e = vec![R::zero(); d];
            e[i] = s;
            rays.push(e);
        }
    }
    let eps: R = real(1e-12);
    let units = unit_columns(&c.generators);
    for (gi, g) in units.iter().enumerate() {
        let vals: Vec<R> = rays.iter().map(|r| dot(g, r)).collect();
        let mut next: Vec<Vec<R>> = Vec::new();
        for (r, &v) in rays.iter().zip(&vals) {
            if v >= -eps {
                next.push(r.clone());
            }
        }
        for (p, &vp) in rays.iter().zip(&vals) {
            if vp <= eps {
                continue;
            }
            for (q, &vq) in rays.iter().zip(&vals) {
                if vq >= -eps {
                    continue;
                }
                let comb: Vec<R> = p.iter().zip(q).map(|(&a, &b)| vp * b - vq * a).collect();
                let n = norm(&comb);
                if n > eps {
                    next.push(comb.into_iter().map(|x| x / n).collect());
                }
            }
        }
        let active = &units[..=gi];
        rays = prune_redundant(merge_parallel(next.into_iter().map(|r| refine_ray(r, active)).collect()));
    }
    Cone::new(d, rays)
}

/// `C = R^d`, equivalently `C* = {0}`.
pub fn cone_is_full<R: Real>(c: &Cone<R>) -> Result<bool> {
    Ok(dual_cone(c)?.is_zero())
}

/// Mutual generator-wise containment.
pub fn cones_equal<R: Real>(a: &Cone<R>, b: &Cone<R>) -> Result<bool> {
    for g in a.generators() {
        if !cone_membership(g, b)? {
            return Ok(false);
        }
    }
    for g in b.generators() {
        if !cone_membership(g, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn cone(gens: &[&[f64]]) -> Cone<f64> {
        Cone::new(gens[0].len(), gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    #[test]
    fn quadrant_is_self_dual() {
        let c = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let d = dual_cone(&c).unwrap();
        assert!(cones_equal(&c, &d).unwrap());
        assert_eq!(d.generators().len(), 2);
    }

    #[test]
    fn dual_of_plane_is_zero() {
        let c = cone(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, -1.0]]);
        assert!(dual_cone(&c).unwrap().is_zero());
        assert!(cone_is_full(&c).unwrap());
        assert!(!cone_is_full(&cone(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap());
        assert!(cone_is_full(&cone(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]])).unwrap());
    }

    #[test]
    fn dual_of_ray_is_half_plane() {
        let d = dual_cone(&cone(&[&[1.0, 0.0]])).unwrap();
        // membership oracle over a circle of directions
        for k in 0..360 {
            let t = (k as f64).to_radians();
            let y = [t.cos(), t.sin()];
            let inside = y[0] >= -1e-12;
            assert_eq!(cone_membership(&y, &d).unwrap(), inside, "angle {k}");
        }
        let half = cone(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        assert!(cones_equal(&d, &half).unwrap());
    }

    #[test]
    fn membership_examples() {
        let c = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(cone_membership(&[1.0, 1.0], &c).unwrap());
        assert!(!cone_membership(&[-1.0, 0.0], &c).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let gens: Vec<Vec<f64>> = (0..5).map(|_| (0..3).map(|_| rng.sample(StandardNormal)).collect()).collect();
            let s: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..2.0)).collect();
            let p: Vec<f64> = (0..3).map(|i| gens.iter().zip(&s).map(|(g, w)| g[i] * w).sum()).collect();
            assert!(cone_membership(&p, &Cone::new(3, gens).unwrap()).unwrap());
        }
    }

    #[test]
    fn bidual_on_random_cones() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for d in 2..=4 {
            for _ in 0..10 {
                let l = rng.random_range(1..=6);
                let gens = (0..l).map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).collect();
                let c = Cone::new(d, gens).unwrap();
                let dd = dual_cone(&dual_cone(&c).unwrap()).unwrap();
                assert!(cones_equal(&c, &dd).unwrap());
            }
        }
    }

    #[test]
    fn planted_zero_combination_gives_full_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for d in 2..=4 {
            let l = d + 2;
            let mut gens: Vec<Vec<f64>> = (0..l - 1).map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect()).collect();
            let v: Vec<f64> = (0..l).map(|_| rng.random_range(0.5..1.5)).collect();
            let last = (0..d).map(|i| -gens.iter().zip(&v).map(|(g, w)| g[i] * w).sum::<f64>() / v[l - 1]).collect();
            gens.push(last);
            let c = Cone::new(d, gens).unwrap();
            assert!(cone_is_full(&c).unwrap());
            for i in 0..d {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; d];
                    e[i] = s;
                    assert!(cone_membership(&e, &c).unwrap());
                }
            }
        }
    }

    #[test]
    fn rejects_large_dimension() {
        assert_eq!(Cone::<f64>::new(5, vec![]), Err(Error::DimensionTooLarge(5, 4)));
    }

    #[test]
    fn drops_zero_generators() {
        let c = cone(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(c.generators().len(), 1);
    }
}
