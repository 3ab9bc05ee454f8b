//! Monte-Carlo verification of `log ã(K exp Y) = conv(𝒲.Y)` and of
//! `Φ(Q_a) = Φ(M_a)` on symplectic leaves.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geomcone::{convex_hull, Polytope};
use crate::iwasawa::log_a_projection;
use crate::leaf::Leaf;
use crate::liecore::{weyl_group, FamilyId, GroupFamily};
use crate::numkit::mat_exp;
use crate::sampling::{compact_element, stream_rng};
use crate::CMat;

pub const MAX_RANK: usize = 3;
pub const MIN_SAMPLES: usize = 10;
pub const SHRINK: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KostantTolerances {
    pub tol_in: f64,
    pub tol_v: f64,
    pub gap_max: f64,
}

impl KostantTolerances {
    pub fn for_rank(rank: usize) -> Self {
        Self { tol_in: 1e-9, tol_v: 1e-9, gap_max: if rank <= 1 { 0.05 } else { 0.1 } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KostantReport {
    pub family: String,
    /// `Y` in `basis_a` coordinates.
    pub y: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub tolerances: KostantTolerances,
    pub orbit: Vec<Vec<f64>>,
    pub containment_max_violation: f64,
    /// Sample index attaining the largest violation.
    pub worst_sample: usize,
    pub vertex_errors: BTreeMap<String, f64>,
    pub coverage_max_gap: f64,
    pub coverage_nodes: usize,
    pub pass: bool,
}

/// `n` Haar samples of the compact factor; sample `i` depends only on
/// `(seed, i)`.
pub fn sample_compact(fam: &GroupFamily, n: usize, seed: u64) -> Vec<CMat> {
    (0..n).into_par_iter().map(|i| compact_element(fam, &mut stream_rng(seed, i as u64))).collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// `𝒲.Y` with duplicates merged.
pub fn weyl_orbit(fam: &GroupFamily, y: &[f64]) -> Vec<Vec<f64>> {
    let w = weyl_group(fam);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..w.order() {
        let p = w.act(i, y);
        if !out.iter().any(|q| close(q, &p, 1e-10)) {
            out.push(p);
        }
    }
    out
}

/// Converts user input to `basis_a` coordinates: for `SL` families either
/// the `n` diagonal entries (trace zero) or `rank` coordinates, for `SO`
/// families the single coordinate along the `𝔞` generator.
pub fn y_coordinates(fam: &GroupFamily, values: &[f64]) -> Result<Vec<f64>> {
    let diag_form = matches!(fam.id, FamilyId::SlR(_) | FamilyId::SlC(_)) && values.len() == fam.rep_dim;
    if diag_form {
        let tr: f64 = values.iter().sum();
        if tr.abs() > 1e-12 * values.iter().fold(1.0f64, |a, v| a.max(v.abs())) {
            return Err(Error::InvalidInput(format!("diagonal entries sum to {tr}, not 0")));
        }
        let h = CMat::diag(&values.iter().map(|&v| v.into()).collect::<Vec<_>>());
        return Ok(fam.a_coords(&h));
    }
    if values.len() != fam.rank() {
        return Err(Error::DimensionMismatch(format!(
            "{} expects {} coordinates{}, got {}",
            fam.id,
            fam.rank(),
            if matches!(fam.id, FamilyId::SlR(_) | FamilyId::SlC(_)) { format!(" or {} diagonal entries", fam.rep_dim) } else { String::new() },
            values.len()
        )));
    }
    Ok(values.to_vec())
}

fn shrink(hull: &Polytope<f64>, factor: f64) -> Result<Polytope<f64>> {
    let c = hull.centroid();
    let v: Vec<Vec<f64>> = hull.vertices.iter().map(|p| p.iter().zip(&c).map(|(x, m)| m + factor * (x - m)).collect()).collect();
    convex_hull(&v)
}

/// Spatial hash with cell size `cell` for nearest-sample queries up to `cell`.
struct Buckets<'a> {
    cell: f64,
    map: HashMap<Vec<i64>, Vec<usize>>,
    points: &'a [Vec<f64>],
}

impl<'a> Buckets<'a> {
    fn new(points: &'a [Vec<f64>], cell: f64) -> Self {
        let mut map: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            map.entry(Self::key(p, cell)).or_default().push(i);
        }
        Self { cell, map, points }
    }

    fn key(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|x| (x / cell).floor() as i64).collect()
    }

    /// Exact distance to the nearest point.
    fn nearest(&self, x: &[f64]) -> f64 {
        let k = Self::key(x, self.cell);
        let d = k.len();
        let mut best = f64::INFINITY;
        for code in 0..3usize.pow(d as u32) {
            let mut c = code;
            let key: Vec<i64> = k
                .iter()
                .map(|&v| {
                    let off = (c % 3) as i64 - 1;
                    c /= 3;
                    v + off
                })
                .collect();
            if let Some(ids) = self.map.get(&key) {
                for &i in ids {
                    best = best.min(dist(&self.points[i], x));
                }
            }
        }
        // anything nearer than one cell lies in the 3^d block
        if best <= self.cell {
            best
        } else {
            self.points.iter().map(|p| dist(p, x)).fold(f64::INFINITY, f64::min)
        }
    }
}

/// Grid nodes with the given spacing inside `region`, plus its centroid.
fn grid_nodes(region: &Polytope<f64>, spacing: f64) -> Vec<Vec<f64>> {
    let d = region.dim;
    let lo: Vec<f64> = (0..d).map(|i| region.vertices.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..d).map(|i| region.vertices.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let counts: Vec<usize> = (0..d).map(|i| ((hi[i] - lo[i]) / spacing).floor() as usize + 1).collect();
    let total: usize = counts.iter().product();
    let scale = hi.iter().chain(&lo).fold(1.0f64, |a, v| a.max(v.abs()));
    let mut nodes = vec![region.centroid()];
    for mut idx in 0..total {
        let p: Vec<f64> = (0..d)
            .map(|i| {
                let v = lo[i] + (idx % counts[i]) as f64 * spacing;
                idx /= counts[i];
                v
            })
            .collect();
        if region.violation(&p) <= 1e-12 * scale {
            nodes.push(p);
        }
    }
    nodes
}

/// Largest distance from a grid node of `region` to its nearest sample.
pub fn coverage_gap(points: &[Vec<f64>], region: &Polytope<f64>, spacing: f64, cell: f64) -> (f64, usize) {
    let nodes = grid_nodes(region, spacing);
    let buckets = Buckets::new(points, cell);
    let gap = nodes.par_iter().map(|n| buckets.nearest(n)).reduce(|| 0.0, f64::max);
    (gap, nodes.len())
}

/// `log ã(k exp Y)` for each `k`.
pub fn momentum_image(fam: &GroupFamily, y: &[f64], ks: &[CMat]) -> Result<Vec<Vec<f64>>> {
    let ey = mat_exp(&fam.a_from_coords(y));
    ks.par_iter().map(|k| log_a_projection(fam, &(k * &ey))).collect()
}

pub fn verify_kostant(
    fam: &GroupFamily,
    y: &[f64],
    n_samples: usize,
    seed: u64,
    tol: KostantTolerances,
) -> Result<(KostantReport, Vec<Vec<f64>>)> {
    let r = fam.rank();
    if r > MAX_RANK {
        return Err(Error::RankTooLarge(r));
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!("need at least {MIN_SAMPLES} samples, got {n_samples}")));
    }
    if y.len() != r {
        return Err(Error::DimensionMismatch(format!("Y has {} coordinates, rank is {r}", y.len())));
    }
    let orbit = weyl_orbit(fam, y);
    let hull = convex_hull(&orbit)?;
    let ks = sample_compact(fam, n_samples, seed);
    let points = momentum_image(fam, y, &ks)?;

    let (worst_sample, containment) = points
        .iter()
        .map(|p| hull.violation(p).max(0.0))
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });

    let w = weyl_group(fam);
    let ey = mat_exp(&fam.a_from_coords(y));
    let mut vertex_errors = BTreeMap::new();
    for (i, kw) in w.representatives.iter().enumerate() {
        let got = log_a_projection(fam, &(kw * &ey))?;
        let want = w.act(i, y);
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        vertex_errors.insert(format!("w{i}"), err);
    }

    let (gap, nodes) = coverage_gap(&points, &shrink(&hull, SHRINK)?, tol.gap_max / 4.0, tol.gap_max);
    let pass = containment <= tol.tol_in && vertex_errors.values().all(|&e| e <= tol.tol_v) && gap <= tol.gap_max;
    let report = KostantReport {
        family: fam.id.to_string(),
        y: y.to_vec(),
        n_samples,
        seed,
        tolerances: tol,
        orbit,
        containment_max_violation: containment,
        worst_sample,
        vertex_errors,
        coverage_max_gap: gap,
        coverage_nodes: nodes,
        pass,
    };
    Ok((report, points))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafEqualityReport {
    pub family: String,
    pub log_a: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub hausdorff: f64,
    pub q_violation: f64,
    pub m_violation: f64,
    pub gap_max: f64,
    pub tol_in: f64,
    pub pass: bool,
}

fn point_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 == 0.0 { 0.0 } else { (p.iter().zip(a).zip(&ab).map(|((pi, ai), d)| (pi - ai) * d).sum::<f64>() / len2).clamp(0.0, 1.0) };
    let proj: Vec<f64> = a.iter().zip(&ab).map(|(x, d)| x + t * d).collect();
    dist(p, &proj)
}

/// Distance from `p` to a polytope of dimension at most 2.
fn point_polytope(p: &[f64], hull: &Polytope<f64>) -> f64 {
    if hull.violation(p) <= 1e-12 {
        return 0.0;
    }
    let v = &hull.vertices;
    let mut best = v.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.min(point_segment(p, &v[i], &v[j]));
        }
    }
    best
}

/// Hausdorff distance between two polytopes of dimension at most 2; for
/// convex sets it is attained at vertices.
pub fn hausdorff(a: &Polytope<f64>, b: &Polytope<f64>) -> f64 {
    let one = a.vertices.iter().map(|p| point_polytope(p, b)).fold(0.0, f64::max);
    let two = b.vertices.iter().map(|p| point_polytope(p, a)).fold(0.0, f64::max);
    one.max(two)
}

/// Compares the sampled hulls of `Φ(Q_a)` and `Φ(M_a)`.
pub fn verify_leaf_equality(leaf: &Leaf, n_samples: usize, seed: u64, gap_max: f64, tol_in: f64) -> Result<LeafEqualityReport> {
    let r = leaf.rank();
    if r > 2 {
        return Err(Error::RankTooLarge(r));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    let q: Vec<Vec<f64>> =
        (0..n_samples as u64).into_par_iter().map(|i| leaf.sample_q(seed, 2 * i).map(|p| p.phi)).collect::<Result<_>>()?;
    let m: Vec<Vec<f64>> =
        (0..n_samples as u64).into_par_iter().map(|i| leaf.sample_m(seed, 2 * i + 1).map(|p| p.phi)).collect::<Result<_>>()?;
    let target = convex_hull(&weyl_orbit(&leaf.fam_c, &leaf.log_a))?;
    let viol = |pts: &[Vec<f64>]| pts.iter().map(|p| target.violation(p).max(0.0)).fold(0.0, f64::max);
    let hq = convex_hull(&q)?;
    let hm = convex_hull(&m)?;
    let h = hausdorff(&hq, &hm);
    let (qv, mv) = (viol(&q), viol(&m));
    Ok(LeafEqualityReport {
        family: leaf.fam_c.id.to_string(),
        log_a: leaf.log_a.clone(),
        n_samples,
        seed,
        hausdorff: h,
        q_violation: qv,
        m_violation: mv,
        gap_max,
        tol_in,
        pass: h <= gap_max && qv <= tol_in && mv <= tol_in,
    })
}

/// Writes points as CSV with header `x1[,x2[,x3]]`.
pub fn write_points_csv<W: Write>(out: W, points: &[Vec<f64>]) -> Result<()> {
    let dim = points.first().map_or(1, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record((1..=dim).map(|i| format!("x{i}"))).map_err(io)?;
    for p in points {
        w.write_record(p.iter().map(|v| format!("{v:.17e}"))).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecore::make_family;

    #[test]
    fn compact_samples_are_deterministic_and_unitary() {
        let fam = make_family(FamilyId::SlR(3)).unwrap();
        let a = sample_compact(&fam, 5, 7);
        assert_eq!(a, sample_compact(&fam, 5, 7));
        for k in &a {
            fam.check_compact(k, 1e-12).unwrap();
        }
        let one = sample_compact(&fam, 1, 123);
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn haar_mean_is_small() {
        let fam = make_family(FamilyId::SlR(3)).unwrap();
        let ks = sample_compact(&fam, 10_000, 1);
        let mean: f64 = ks.iter().map(|k| k[(0, 0)].re).sum::<f64>() / ks.len() as f64;
        assert!(mean.abs() <= 0.05);
    }

    #[test]
    fn orbits() {
        let sl2 = make_family(FamilyId::SlR(2)).unwrap();
        let mut o: Vec<f64> = weyl_orbit(&sl2, &[1.0]).into_iter().map(|v| v[0]).collect();
        o.sort_by(f64::total_cmp);
        assert_eq!(o, vec![-1.0, 1.0]);
        let sl3 = make_family(FamilyId::SlR(3)).unwrap();
        assert_eq!(weyl_orbit(&sl3, &y_coordinates(&sl3, &[1.0, 0.0, -1.0]).unwrap()).len(), 6);
        assert_eq!(weyl_orbit(&sl3, &y_coordinates(&sl3, &[1.0, 1.0, -2.0]).unwrap()).len(), 3);
        assert!(y_coordinates(&sl3, &[1.0, 1.0, 1.0]).is_err());
        assert!(y_coordinates(&sl3, &[1.0]).is_err());
    }

    #[test]
    fn sl2r_rank_one() {
        let fam = make_family(FamilyId::SlR(2)).unwrap();
        let (rep, pts) = verify_kostant(&fam, &[1.0], 10_000, 7, KostantTolerances::for_rank(1)).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(pts.iter().all(|p| p[0].abs() <= 1.0 + 1e-9));
        assert_eq!(rep.vertex_errors.len(), 2);
    }

    #[test]
    fn so14_rank_one() {
        let fam = make_family(FamilyId::So1n(4)).unwrap();
        let (rep, pts) = verify_kostant(&fam, &[0.8], 10_000, 3, KostantTolerances::for_rank(1)).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(pts.iter().all(|p| p[0].abs() <= 0.8 + 1e-9));
    }

    #[test]
    fn image_is_weyl_invariant() {
        let fam = make_family(FamilyId::SlR(3)).unwrap();
        let y = y_coordinates(&fam, &[1.0, 0.0, -1.0]).unwrap();
        let ks = sample_compact(&fam, 4000, 9);
        let base = convex_hull(&momentum_image(&fam, &y, &ks).unwrap()).unwrap();
        let w = weyl_group(&fam);
        for kw in &w.representatives {
            let moved: Vec<CMat> = ks.iter().map(|k| kw * k).collect();
            let h = convex_hull(&momentum_image(&fam, &y, &moved).unwrap()).unwrap();
            assert!(hausdorff(&base, &h) <= 0.1);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let fam = make_family(FamilyId::SlR(2)).unwrap();
        assert!(verify_kostant(&fam, &[1.0], 5, 1, KostantTolerances::for_rank(1)).is_err());
        assert!(verify_kostant(&fam, &[1.0, 2.0], 50, 1, KostantTolerances::for_rank(1)).is_err());
    }

    #[test]
    fn hausdorff_of_intervals_and_squares() {
        let a = convex_hull(&[vec![-1.0], vec![1.0]]).unwrap();
        let b = convex_hull(&[vec![-0.9], vec![1.0]]).unwrap();
        assert!((hausdorff(&a, &b) - 0.1).abs() < 1e-12);
        let s = convex_hull(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let t = convex_hull(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        // farthest vertex (2,0) is at distance 1 from the square
        assert!((hausdorff(&s, &t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leaf_equality_rank_one() {
        let leaf = Leaf::new(FamilyId::SlC(2), &[1.0]).unwrap();
        let rep = verify_leaf_equality(&leaf, 2000, 5, 0.05, 1e-9).unwrap();
        assert!(rep.pass, "{rep:?}");
        let flat = Leaf::new(FamilyId::SlC(2), &[0.0]).unwrap();
        let rep = verify_leaf_equality(&flat, 50, 5, 0.05, 1e-9).unwrap();
        assert!(rep.hausdorff < 1e-12 && rep.pass);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &[vec![1.0, -0.5], vec![0.25, 0.0]]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("x1,x2"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, vec![1.0, -0.5]);
    }
}
