//! Double-oracle iteration for zero-sum games with large or continuous
//! strategy sets.
//!
//! Each round solves the game restricted to the strategies found so far, asks
//! both best-response oracles for a reply to the restricted optimum, and adds
//! whatever improves. The oracle values bracket the true value, so the loop
//! stops when the bracket closes to `tol` or neither oracle finds anything new.

use super::lp::solve_matrix;
use crate::error::Result;

/// A best-response oracle: given the opponent's mixture, returns a reply and
/// its payoff to player 1.
pub type Oracle<'a, S> = dyn FnMut(&[(f64, S)]) -> Result<(S, f64)> + 'a;

#[derive(Debug, Clone)]
pub struct DoubleOracleResult<S> {
    /// Value of the final restricted game.
    pub value: f64,
    pub p1: Vec<(f64, S)>,
    pub p2: Vec<(f64, S)>,
    /// Player 1's best reply value against `p2`.
    pub upper: f64,
    /// Player 2's best reply against `p1`, as a payoff to player 1.
    pub lower: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub struct DoubleOracle<'a, S> {
    pub payoff: &'a dyn Fn(&S, &S) -> f64,
    pub same: &'a dyn Fn(&S, &S) -> bool,
    pub tol: f64,
    pub max_iters: usize,
}

impl<S: Clone> DoubleOracle<'_, S> {
    pub fn run(
        &self,
        mut rows: Vec<S>,
        mut cols: Vec<S>,
        oracle_p1: &mut Oracle<'_, S>,
        oracle_p2: &mut Oracle<'_, S>,
    ) -> Result<DoubleOracleResult<S>> {
        assert!(!rows.is_empty() && !cols.is_empty(), "double oracle needs initial strategies");
        let mut matrix: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| cols.iter().map(|c| (self.payoff)(r, c)).collect())
            .collect();
        let mut iterations = 0;
        loop {
            iterations += 1;
            let sol = solve_matrix(&matrix)?;
            let p1 = support(&sol.row, &rows);
            let p2 = support(&sol.col, &cols);
            let (r_new, upper) = oracle_p1(&p2)?;
            let (c_new, lower) = oracle_p2(&p1)?;
            let done = upper - lower <= self.tol;
            let mut added = false;
            if !done && iterations < self.max_iters {
                if upper > sol.value + self.tol / 2.0 && !rows.iter().any(|r| (self.same)(r, &r_new)) {
                    matrix.push(cols.iter().map(|c| (self.payoff)(&r_new, c)).collect());
                    rows.push(r_new);
                    added = true;
                }
                if lower < sol.value - self.tol / 2.0 && !cols.iter().any(|c| (self.same)(c, &c_new)) {
                    for (row, r) in matrix.iter_mut().zip(&rows) {
                        row.push((self.payoff)(r, &c_new));
                    }
                    cols.push(c_new);
                    added = true;
                }
            }
            if !added {
                return Ok(DoubleOracleResult {
                    value: sol.value,
                    p1,
                    p2,
                    upper,
                    lower,
                    iterations,
                    converged: done,
                });
            }
        }
    }
}

fn support<S: Clone>(probs: &[f64], items: &[S]) -> Vec<(f64, S)> {
    let kept: Vec<(f64, S)> = probs
        .iter()
        .zip(items)
        .filter(|(p, _)| **p > 1e-12)
        .map(|(p, s)| (*p, s.clone()))
        .collect();
    let total: f64 = kept.iter().map(|(p, _)| p).sum();
    kept.into_iter().map(|(p, s)| (p / total, s)).collect()
}
