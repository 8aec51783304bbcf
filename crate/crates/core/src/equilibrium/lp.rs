//! Minimax solution of finite zero-sum matrix games by the simplex method.
//!
//! The row player maximizes. After shifting the matrix so every entry is at
//! least 1 the column player's problem is `max Σy s.t. A y ≤ 1, y ≥ 0`, which
//! starts feasible at the slack basis. The row player's strategy is read off
//! the dual prices of the optimal tableau.

use crate::error::{invalid, GameError, Result};

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSolution {
    pub value: f64,
    pub row: Vec<f64>,
    pub col: Vec<f64>,
    /// `min_j (xᵀA)_j`: what the row mixture guarantees.
    pub row_guarantee: f64,
    /// `max_i (A y)_i`: what the column mixture concedes.
    pub col_guarantee: f64,
    pub pivots: usize,
}

impl MatrixSolution {
    pub fn duality_gap(&self) -> f64 {
        self.col_guarantee - self.row_guarantee
    }
}

pub fn solve_matrix(a: &[Vec<f64>]) -> Result<MatrixSolution> {
    let m = a.len();
    if m == 0 || a[0].is_empty() {
        return invalid("payoff matrix must have at least one row and one column");
    }
    let n = a[0].len();
    if a.iter().any(|r| r.len() != n) {
        return invalid("payoff matrix rows must have equal length");
    }
    if a.iter().flatten().any(|x| !x.is_finite()) {
        return invalid("payoff matrix entries must be finite");
    }
    let min = a.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;

    // Tableau: m constraint rows over n structural + m slack columns, then rhs.
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        for j in 0..n {
            t[i][j] = a[i][j] + shift;
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = 1.0;
    }
    for j in 0..n {
        t[m][j] = -1.0;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut pivots = 0;
    let max_pivots = 50 * (m + n) + 1000;
    loop {
        // Dantzig's rule, switching to Bland's rule if it stalls.
        let bland = pivots > 10 * (m + n);
        let entering = if bland {
            (0..n + m).find(|&j| t[m][j] < -PIVOT_EPS)
        } else {
            (0..n + m)
                .filter(|&j| t[m][j] < -PIVOT_EPS)
                .min_by(|&x, &y| t[m][x].total_cmp(&t[m][y]))
        };
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][e] > PIVOT_EPS {
                let ratio = t[i][width - 1] / t[i][e];
                let better = match leave {
                    None => true,
                    Some((l, r)) => ratio < r - 1e-15 || (ratio <= r + 1e-15 && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Bounded: the constraints A y ≤ 1 with A > 0 cap every column.
        let (l, _) = leave.expect("shifted game LP is bounded");
        pivot(&mut t, l, e);
        basis[l] = e;
        pivots += 1;
        if pivots > max_pivots {
            return Err(GameError::NoConvergence(format!("simplex exceeded {max_pivots} pivots")));
        }
    }

    let mut y = vec![0.0; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            y[b] = t[i][width - 1].max(0.0);
        }
    }
    let x: Vec<f64> = (0..m).map(|i| t[m][n + i].max(0.0)).collect();
    let col = normalize(y);
    let row = normalize(x);
    let objective = t[m][width - 1];
    let value = 1.0 / objective - shift;

    let row_guarantee = (0..n)
        .map(|j| (0..m).map(|i| row[i] * a[i][j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let col_guarantee = (0..m)
        .map(|i| (0..n).map(|j| a[i][j] * col[j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MatrixSolution { value, row, col, row_guarantee, col_guarantee, pivots })
}

fn pivot(t: &mut [Vec<f64>], r: usize, c: usize) {
    let p = t[r][c];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row[c];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            row[c] = 0.0;
        }
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    } else {
        let k = v.len() as f64;
        v.iter_mut().for_each(|x| *x = 1.0 / k);
    }
    v
}

/// Pure saddle points `(i, j)`: the entry is the minimum of its row and the
/// maximum of its column.
pub fn pure_saddles(a: &[Vec<f64>], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let row_min = row.iter().copied().fold(f64::INFINITY, f64::min);
            let col_max = a.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
            if v <= row_min + tol && v >= col_max - tol {
                out.push((i, j));
            }
        }
    }
    out
}
