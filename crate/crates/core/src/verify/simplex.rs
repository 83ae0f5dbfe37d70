//! Dense primal simplex for small linear programs
//! `maximize c.x subject to A x <= b, x >= 0` with `b >= 0`, so the slack
//! basis is feasible from the start. Bland's rule prevents cycling.

use crate::error::{Error, Result};

const EPS: f64 = 1e-12;

/// Optimal value and a maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

/// Solves the program with nonnegative variables.
pub fn maximize_nonneg(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let (m, n) = (a.len(), c.len());
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::Internal("inconsistent linear program dimensions".into()));
    }
    if b.iter().any(|&v| v < 0.0) {
        return Err(Error::Internal("right-hand side must be nonnegative".into()));
    }
    let width = n + m + 1;
    // rows 0..m are constraints, row m holds the negated objective
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_iter = 50 * (n + m) + 1000;
    for _ in 0..max_iter {
        let Some(enter) = (0..n + m).find(|&j| t[m][j] < -EPS) else {
            let mut x = vec![0.0; n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = t[i][width - 1];
                }
            }
            return Ok(LpSolution { value: t[m][width - 1], x });
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = t[i][enter];
            if coef > EPS {
                let ratio = t[i][width - 1] / coef;
                let better = match leave {
                    None => true,
                    Some((k, r)) => ratio < r - EPS || (ratio <= r + EPS && basis[i] < basis[k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Unbounded);
        };
        let pivot = t[row][enter];
        for v in t[row].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[enter];
            if f != 0.0 {
                for (v, p) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        basis[row] = enter;
    }
    Err(Error::Internal("simplex iteration limit reached".into()))
}

/// Solves the program with free variables by splitting `x = x+ - x-`.
pub fn maximize_free(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let c2: Vec<f64> = c.iter().copied().chain(c.iter().map(|v| -v)).collect();
    let a2: Vec<Vec<f64>> = a
        .iter()
        .map(|row| row.iter().copied().chain(row.iter().map(|v| -v)).collect())
        .collect();
    let sol = maximize_nonneg(&c2, &a2, b)?;
    let x = (0..n).map(|j| sol.x[j] - sol.x[n + j]).collect();
    Ok(LpSolution { value: sol.value, x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let s = maximize_nonneg(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((s.value - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn free_variables_and_unbounded() {
        // max x - y with |x| <= 1, |y| <= 2
        let a = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let s = maximize_free(&[1.0, -1.0], &a, &[1.0, 1.0, 2.0, 2.0]).unwrap();
        assert!((s.value - 3.0).abs() < 1e-12);
        assert!((s.x[1] + 2.0).abs() < 1e-12);
        assert_eq!(maximize_free(&[1.0, 1.0], &a[..2], &[1.0, 1.0]), Err(Error::Unbounded));
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // several constraints active at the optimum
        let a = vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![2.0, 2.0]];
        let s = maximize_nonneg(&[1.0, 1.0], &a, &[1.0, 1.0, 1.0, 2.0]).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }
}
