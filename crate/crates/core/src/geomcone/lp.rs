//! Phase-I simplex for `A s = b, s >= 0` with Bland's rule.

use crate::numkit::{real, solve_linear, Mat, Real};

/// A nonnegative `s` with `A s = b` when one exists. `a` is given as
/// columns of length `b.len()`. The returned solution satisfies
/// `|A s - b|_inf <= tol * max(1, |b|_inf)`.
pub fn feasible_nonneg<R: Real>(columns: &[Vec<R>], b: &[R], tol: R) -> Option<Vec<R>> {
    let m = b.len();
    let n = columns.len();
    let width = n + m + 1;
    // Tableau rows 0..m are constraints, row m is the phase-I objective.
    let mut t = vec![R::zero(); (m + 1) * width];
    let at = |i: usize, j: usize| i * width + j;
    for i in 0..m {
        let sign = if b[i] < R::zero() { -R::one() } else { R::one() };
        for (j, col) in columns.iter().enumerate() {
            t[at(i, j)] = sign * col[i];
        }
        t[at(i, n + i)] = R::one();
        t[at(i, width - 1)] = sign * b[i];
    }
    for j in 0..width {
        if j >= n && j < n + m {
            continue;
        }
        let s: R = (0..m).map(|i| t[at(i, j)]).fold(R::zero(), |a, x| a + x);
        t[at(m, j)] = -s;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let piv_tol: R = real(1e-12);

    for _ in 0..(50 * (n + m) + 100) {
        // Bland: the lowest-index column with negative reduced cost enters.
        let Some(enter) = (0..n + m).find(|&j| t[at(m, j)] < -piv_tol) else {
            break;
        };
        let mut leave: Option<(usize, R)> = None;
        for i in 0..m {
            let a = t[at(i, enter)];
            if a > piv_tol {
                let ratio = t[at(i, width - 1)] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        let tie = (ratio - lr).abs() <= piv_tol * lr.abs().max(R::one());
                        if ratio < lr && !tie || tie && basis[i] < basis[li] {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            break;
        };
        let p = t[at(row, enter)];
        for j in 0..width {
            t[at(row, j)] = t[at(row, j)] / p;
        }
        for i in 0..=m {
            if i == row {
                continue;
            }
            let f = t[at(i, enter)];
            if f != R::zero() {
                for j in 0..width {
                    t[at(i, j)] = t[at(i, j)] - f * t[at(row, j)];
                }
            }
        }
        basis[row] = enter;
    }

    let residual = |s: &[R]| {
        (0..m)
            .map(|i| (columns.iter().zip(s).map(|(c, &x)| c[i] * x).fold(R::zero(), |a, y| a + y) - b[i]).abs())
            .fold(R::zero(), R::max)
    };
    let mut s = vec![R::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            s[bv] = t[at(i, width - 1)].max(R::zero());
        }
    }
    // The tableau drifts on nearly parallel columns; re-solve the final
    // basis against the original data and keep whichever fits better.
    if let Some(polished) = resolve_basis(columns, b, &basis) {
        if residual(&polished) < residual(&s) {
            s = polished;
        }
    }
    let scale = b.iter().fold(R::one(), |a, x| a.max(x.abs()));
    (residual(&s) <= tol * scale).then_some(s)
}

fn resolve_basis<R: Real>(columns: &[Vec<R>], b: &[R], basis: &[usize]) -> Option<Vec<R>> {
    let (m, n) = (b.len(), columns.len());
    let a = Mat::from_fn(m, m, |i, k| {
        let j = basis[k];
        if j < n {
            columns[j][i]
        } else if j - n == i {
            R::one()
        } else {
            R::zero()
        }
    });
    let x = solve_linear(&a, &Mat::from_vec(m, 1, b.to_vec()).ok()?).ok()?;
    let mut s = vec![R::zero(); n];
    for (k, &j) in basis.iter().enumerate() {
        if j < n {
            s[j] = x[(k, 0)].max(R::zero());
        }
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_nonnegative_combination() {
        let cols: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let s = feasible_nonneg(&cols, &[2.0, 3.0], 1e-9).unwrap();
        assert!(s.iter().all(|&x| x >= 0.0));
        let r0 = s[0] + s[2] - 2.0;
        let r1 = s[1] + s[2] - 3.0;
        assert!(r0.abs() < 1e-12 && r1.abs() < 1e-12);
    }

    #[test]
    fn detects_infeasibility() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(feasible_nonneg(&cols, &[-1.0, 0.0], 1e-9).is_none());
        assert!(feasible_nonneg::<f64>(&[], &[1.0], 1e-9).is_none());
        assert!(feasible_nonneg::<f64>(&[], &[0.0], 1e-9).is_some());
    }

    #[test]
    fn degenerate_problem_terminates() {
        // many redundant columns through the same vertex
        let cols: Vec<Vec<f64>> = (0..30).map(|k| vec![1.0, (k % 3) as f64, 0.0]).collect();
        assert!(feasible_nonneg(&cols, &[0.0, 0.0, 0.0], 1e-9).is_some());
        assert!(feasible_nonneg(&cols, &[1.0, 1.5, 0.0], 1e-9).is_some());
        assert!(feasible_nonneg(&cols, &[1.0, 5.0, 0.0], 1e-9).is_none());
        assert!(feasible_nonneg(&cols, &[1.0, 1.5, 1.0], 1e-9).is_none());
    }
}
