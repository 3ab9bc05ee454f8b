use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{column_space, null_space, real, Mat, Real};

/// Half-space `{x : <normal, x> <= offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet<R> {
    pub normal: Vec<R>,
    pub offset: R,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope<R> {
    pub dim: usize,
    pub vertices: Vec<Vec<R>>,
    pub facets: Vec<Facet<R>>,
    /// Dimension of the affine span of the input.
    pub affine_dim: usize,
}

impl<R: Real> Polytope<R> {
    pub fn is_degenerate(&self) -> bool {
        self.affine_dim < self.dim
    }

    pub fn centroid(&self) -> Vec<R> {
        let k: R = real(self.vertices.len() as f64);
        (0..self.dim).map(|i| self.vertices.iter().map(|v| v[i]).fold(R::zero(), |a, x| a + x) / k).collect()
    }

    /// `max_f (<n_f, x> - c_f)`: nonpositive inside.
    pub fn violation(&self, x: &[R]) -> R {
        self.facets.iter().map(|f| dot(&f.normal, x) - f.offset).fold(R::neg_infinity(), R::max)
    }
}

fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).map(|(&x, &y)| x * y).fold(R::zero(), |s, x| s + x)
}

fn cross2<R: Real>(o: &[R], a: &[R], b: &[R]) -> R {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Membership with the signed violation, `contains iff violation <= tol`.
pub fn polytope_contains<R: Real>(p: &Polytope<R>, x: &[R], tol: R) -> Result<(bool, R)> {
    if x.len() != p.dim {
        return Err(Error::DimensionMismatch(format!("point of length {} for a polytope in dimension {}", x.len(), p.dim)));
    }
    let v = p.violation(x);
    Ok((v <= tol, v))
}

fn hull_1d<R: Real>(pts: &[Vec<R>]) -> (Vec<Vec<R>>, Vec<Facet<R>>) {
    let lo = pts.iter().map(|p| p[0]).fold(R::infinity(), R::min);
    let hi = pts.iter().map(|p| p[0]).fold(R::neg_infinity(), R::max);
    let facets = vec![Facet { normal: vec![R::one()], offset: hi }, Facet { normal: vec![-R::one()], offset: -lo }];
    let vertices = if lo == hi { vec![vec![lo]] } else { vec![vec![lo], vec![hi]] };
    (vertices, facets)
}

/// Andrew's monotone chain, counter-clockwise, collinear points dropped.
fn hull_2d<R: Real>(pts: &[Vec<R>], tol: R) -> (Vec<Vec<R>>, Vec<Facet<R>>) {
    let mut p: Vec<Vec<R>> = pts.to_vec();
    p.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    p.dedup_by(|a, b| (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol);
    if p.len() < 3 {
        return (p, Vec::new());
    }
    let mut lower: Vec<Vec<R>> = Vec::new();
    for q in &p {
        while lower.len() >= 2 && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= tol {
            lower.pop();
        }
        lower.push(q.clone());
    }
    let mut upper: Vec<Vec<R>> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2 && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= tol {
            upper.pop();
        }
        upper.push(q.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let verts = lower;
    let facets = (0..verts.len())
        .map(|i| {
            let a = &verts[i];
            let b = &verts[(i + 1) % verts.len()];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = (dx * dx + dy * dy).sqrt();
            let normal = vec![dy / len, -dx / len];
            let offset = dot(&normal, a);
            Facet { normal, offset }
        })
        .collect();
    (verts, facets)
}

/// Full-dimensional hull in R^3 by testing every plane through three input
/// points; vertices are the points where incident facet normals span R^3.
fn hull_3d<R: Real>(pts: &[Vec<R>], tol: R) -> (Vec<Vec<R>>, Vec<Facet<R>>) {
    let mut p: Vec<Vec<R>> = pts.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| (*x - *y).abs() <= tol));
    let n = p.len();
    let mut facets: Vec<Facet<R>> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let u: Vec<R> = (0..3).map(|c| p[j][c] - p[i][c]).collect();
                let v: Vec<R> = (0..3).map(|c| p[k][c] - p[i][c]).collect();
                let nrm = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
                let len = dot(&nrm, &nrm).sqrt();
                if len <= tol {
                    continue;
                }
                let nrm: Vec<R> = nrm.iter().map(|&x| x / len).collect();
                let c = dot(&nrm, &p[i]);
                let vals: Vec<R> = p.iter().map(|q| dot(&nrm, q) - c).collect();
                let normal = if vals.iter().all(|&x| x <= tol) {
                    nrm
                } else if vals.iter().all(|&x| x >= -tol) {
                    nrm.iter().map(|&x| -x).collect()
                } else {
                    continue;
                };
                let offset = dot(&normal, &p[i]);
                let dup = facets.iter().any(|f| {
                    (f.offset - offset).abs() <= tol && f.normal.iter().zip(&normal).all(|(a, b)| (*a - *b).abs() <= tol)
                });
                if !dup {
                    facets.push(Facet { normal, offset });
                }
            }
        }
    }
    let vertices = p
        .into_iter()
        .filter(|q| {
            let incident: Vec<R> = facets
                .iter()
                .filter(|f| (dot(&f.normal, q) - f.offset).abs() <= tol)
                .flat_map(|f| f.normal.iter().copied())
                .collect();
            let m = incident.len() / 3;
            m >= 3 && crate::numkit::rank(&Mat::from_vec(m, 3, incident).unwrap(), real(1e-8)) == 3
        })
        .collect();
    (vertices, facets)
}

/// Convex hull of points in `R^r`, `r <= 3`. Input spanning a lower
/// dimensional affine subspace is hulled inside that subspace; the facet
/// list then also contains the pairs of half-spaces cutting out the span.
pub fn convex_hull<R: Real>(points: &[Vec<R>]) -> Result<Polytope<R>> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let r = first.len();
    if r == 0 || r > 3 {
        return Err(Error::DimensionTooLarge(r, 3));
    }
    if points.iter().any(|p| p.len() != r) {
        return Err(Error::DimensionMismatch("points of differing dimension".into()));
    }
    let m = points.len();
    let k: R = real(m as f64);
    let center: Vec<R> = (0..r).map(|i| points.iter().map(|p| p[i]).fold(R::zero(), |a, x| a + x) / k).collect();
    let scale = points.iter().flat_map(|p| p.iter()).fold(R::one(), |a, x| a.max(x.abs()));
    let tol = real::<R>(1e-10) * scale;

    let centered = Mat::from_fn(r, m, |i, j| points[j][i] - center[i]).scale_real(scale.recip());
    let span = column_space(&centered, real(1e-10));
    let complement = null_space(&centered.transpose(), real(1e-10));
    let affine_dim = span.cols();

    if affine_dim == r {
        let (vertices, facets) = match r {
            1 => hull_1d(points),
            2 => hull_2d(points, tol),
            _ => hull_3d(points, tol),
        };
        return Ok(Polytope { dim: r, vertices, facets, affine_dim });
    }

    // Work in orthonormal coordinates of the affine span.
    let local: Vec<Vec<R>> = (0..m)
        .map(|j| {
            let d: Vec<R> = (0..r).map(|i| points[j][i] - center[i]).collect();
            span.transpose().mul_vec(&d)
        })
        .collect();
    let (lv, lf) = match affine_dim {
        0 => (vec![Vec::new()], Vec::new()),
        1 => hull_1d(&local),
        _ => hull_2d(&local, tol),
    };
    let lift = |y: &[R]| -> Vec<R> {
        let mut x = center.clone();
        for (a, &c) in y.iter().enumerate() {
            for i in 0..r {
                x[i] = x[i] + span[(i, a)] * c;
            }
        }
        x
    };
    let vertices = lv.iter().map(|v| lift(v)).collect();
    let mut facets: Vec<Facet<R>> = lf
        .iter()
        .map(|f| {
            let normal: Vec<R> = span.mul_vec(&f.normal);
            let offset = f.offset + dot(&normal, &center);
            Facet { normal, offset }
        })
        .collect();
    for u in complement.columns() {
        let c = dot(&u, &center);
        facets.push(Facet { normal: u.iter().map(|&x| -x).collect(), offset: -c });
        facets.push(Facet { normal: u, offset: c });
    }
    Ok(Polytope { dim: r, vertices, facets, affine_dim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn interval() {
        let p = convex_hull(&[vec![1.0], vec![-1.0], vec![0.3]]).unwrap();
        assert_eq!(sorted(p.vertices.clone()), vec![vec![-1.0], vec![1.0]]);
        assert!(polytope_contains(&p, &[0.0], 1e-9).unwrap().0);
        let (inside, v) = polytope_contains(&p, &[1.5], 1e-9).unwrap();
        assert!(!inside && (v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hexagon_from_permutations() {
        let pts: Vec<Vec<f64>> = [[1.0, 0.0, -1.0], [1.0, -1.0, 0.0], [0.0, 1.0, -1.0], [0.0, -1.0, 1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]]
            .iter()
            .map(|p| p.to_vec())
            .collect();
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.affine_dim, 2);
        assert_eq!(p.vertices.len(), 6);
        assert!(p.is_degenerate());
        assert!(polytope_contains(&p, &[0.0, 0.0, 0.0], 1e-9).unwrap().0);
        assert!(!polytope_contains(&p, &[0.1, 0.0, 0.0], 1e-9).unwrap().0);
    }

    #[test]
    fn square_with_interior_points_matches_halfplane_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut pts: Vec<Vec<f64>> = (0..100).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
        pts.extend([vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]);
        let p = convex_hull(&pts).unwrap();
        assert_eq!(sorted(p.vertices.clone()), vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        assert_eq!(sorted(p.vertices), sorted(brute_force_2d(&pts)));
    }

    /// A point is a hull vertex iff some line through it and another point
    /// has all points weakly on one side and it is an endpoint of the
    /// extreme segment.
    fn brute_force_2d(pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for (i, a) in pts.iter().enumerate() {
            let mut is_vertex = false;
            for (j, b) in pts.iter().enumerate() {
                if i == j || a == b {
                    continue;
                }
                let side: Vec<f64> = pts.iter().map(|q| cross2(a, b, q)).collect();
                let left = side.iter().all(|&s| s >= -1e-12);
                if !left {
                    continue;
                }
                // a must not lie strictly inside the extreme segment
                let d = [b[0] - a[0], b[1] - a[1]];
                let inner = pts.iter().zip(&side).any(|(q, &s)| {
                    s.abs() <= 1e-12 && (q[0] - a[0]) * d[0] + (q[1] - a[1]) * d[1] < -1e-12
                });
                if !inner {
                    is_vertex = true;
                }
            }
            if is_vertex && !out.contains(a) {
                out.push(a.clone());
            }
        }
        out
    }

    #[test]
    fn random_clouds_agree_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.random_range(3..=12);
            let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
            let p = convex_hull(&pts).unwrap();
            assert_eq!(sorted(p.vertices.clone()), sorted(brute_force_2d(&pts)));
            let again = convex_hull(&p.vertices).unwrap();
            assert_eq!(sorted(again.vertices), sorted(p.vertices.clone()));
            for q in &pts {
                assert!(p.violation(q) <= 1e-12);
            }
        }
    }

    #[test]
    fn cube_in_three_dimensions() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        pts.push(vec![0.5, 0.5, 0.5]);
        pts.push(vec![0.5, 0.5, 1.0]);
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices.len(), 8);
        assert_eq!(p.facets.len(), 6);
        for f in &p.facets {
            let tight = p.vertices.iter().filter(|v| (dot(&f.normal, v) - f.offset).abs() < 1e-12).count();
            assert!(tight >= 3);
            assert!((dot(&f.normal, &f.normal) - 1.0).abs() < 1e-12);
        }
        let c = p.centroid();
        assert!(polytope_contains(&p, &c, 1e-9).unwrap().0);
    }

    #[test]
    fn outward_push_violation() {
        let pts: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]];
        let p = convex_hull(&pts).unwrap();
        for f in &p.facets {
            let v = p.vertices.iter().find(|v| (dot(&f.normal, v) - f.offset).abs() < 1e-12).unwrap();
            let x: Vec<f64> = v.iter().zip(&f.normal).map(|(a, n)| a + 0.1 * n).collect();
            let (inside, viol) = polytope_contains(&p, &x, 1e-9).unwrap();
            assert!(!inside);
            assert!((viol - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point_and_errors() {
        let p = convex_hull(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(p.affine_dim, 0);
        assert_eq!(p.vertices, vec![vec![1.0, 2.0]]);
        assert!(polytope_contains(&p, &[1.0, 2.0], 1e-9).unwrap().0);
        assert!(!polytope_contains(&p, &[1.0, 2.1], 1e-9).unwrap().0);
        assert_eq!(convex_hull::<f64>(&[]), Err(Error::EmptyInput));
        assert!(polytope_contains(&p, &[1.0], 1e-9).is_err());
    }
}
