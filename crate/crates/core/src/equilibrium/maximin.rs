//! Ascent on a lower envelope `min_t f_t(U)` over tuples of unitaries.
//!
//! Each step linearizes every `f_t` in a Hermitian chart around the current
//! tuple and maximizes the linearized envelope over an L1 trust region. That
//! subproblem is a matrix game whose rows are the vertices `±Δ e_k` of the
//! region (plus staying put), so the simplex solver handles it directly. Kinks
//! where several `f_t` are active are where plain gradient ascent stalls and
//! exactly what the LP step is built for.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::lp::solve_matrix;
use crate::error::Result;
use crate::matrix::{SquareMatrix, Unitary};

const FD_STEP: f64 = 1e-6;
const MAX_STEPS: usize = 300;

/// Hermitian basis modulo the identity: off-diagonal pairs and adjacent
/// diagonal differences.
fn generators(dim: usize) -> Vec<DMatrix<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(dim * dim - 1);
    for r in 0..dim {
        for c in r + 1..dim {
            let mut x = DMatrix::zeros(dim, dim);
            x[(r, c)] = one;
            x[(c, r)] = one;
            out.push(x);
            let mut y = DMatrix::zeros(dim, dim);
            y[(r, c)] = -i;
            y[(c, r)] = i;
            out.push(y);
        }
    }
    for d in 0..dim - 1 {
        let mut z = DMatrix::zeros(dim, dim);
        z[(d, d)] = one;
        z[(d + 1, d + 1)] = -one;
        out.push(z);
    }
    out
}

/// Cayley map of `Σ ω_k G_k`: exactly unitary for every `ω`.
fn cayley(gens: &[DMatrix<Complex64>], omega: &[f64]) -> DMatrix<Complex64> {
    let dim = gens[0].nrows();
    let half_i = Complex64::new(0.0, 0.5);
    let mut h = DMatrix::zeros(dim, dim);
    for (g, w) in gens.iter().zip(omega) {
        h += g * Complex64::new(*w, 0.0);
    }
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let lhs = &id - &h * half_i;
    let rhs = &id + &h * half_i;
    // I - iH/2 has eigenvalues 1 - iλ/2, never zero.
    lhs.try_inverse().expect("Cayley denominator is invertible") * rhs
}

fn step(gens: &[DMatrix<Complex64>], us: &[Unitary], omega: &[f64]) -> Vec<Unitary> {
    let p = gens.len();
    us.iter()
        .enumerate()
        .map(|(s, u)| {
            let c = cayley(gens, &omega[s * p..(s + 1) * p]);
            Unitary::new_unchecked(SquareMatrix::from_inner(c * u.matrix().inner()))
        })
        .collect()
}

fn lowest(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Maximizes `min_t f(U)[t]` from `start`. Returns the final tuple and its
/// envelope value, which never falls below the starting value.
pub(crate) fn envelope_ascent(start: Vec<Unitary>, f: &dyn Fn(&[Unitary]) -> Vec<f64>) -> Result<(Vec<Unitary>, f64)> {
    let mut us = start;
    if us.is_empty() {
        let v = lowest(&f(&us));
        return Ok((us, v));
    }
    let gens = generators(us[0].dim());
    let n = us.len() * gens.len();
    let mut vals = f(&us);
    let mut cur = lowest(&vals);
    let mut radius = 0.5;
    for _ in 0..MAX_STEPS {
        let mut grads = Vec::with_capacity(n);
        let mut e = vec![0.0; n];
        for k in 0..n {
            e[k] = FD_STEP;
            let up = f(&step(&gens, &us, &e));
            e[k] = -FD_STEP;
            let down = f(&step(&gens, &us, &e));
            e[k] = 0.0;
            grads.push(up.iter().zip(&down).map(|(a, b)| (a - b) / (2.0 * FD_STEP)).collect::<Vec<f64>>());
        }
        let mut rows = vec![vals.clone()];
        for g in &grads {
            rows.push(vals.iter().zip(g).map(|(v, d)| v + radius * d).collect());
            rows.push(vals.iter().zip(g).map(|(v, d)| v - radius * d).collect());
        }
        let sol = solve_matrix(&rows)?;
        let predicted = sol.value - cur;
        if predicted < 1e-12 {
            break;
        }
        let omega: Vec<f64> = (0..n).map(|k| radius * (sol.row[1 + 2 * k] - sol.row[2 + 2 * k])).collect();
        let trial = step(&gens, &us, &omega);
        let trial_vals = f(&trial);
        let gain = lowest(&trial_vals) - cur;
        let ratio = gain / predicted;
        if ratio > 0.1 {
            us = trial;
            vals = trial_vals;
            cur += gain;
            if ratio > 0.75 {
                radius = (radius * 2.0).min(1.0);
            } else if ratio < 0.25 {
                radius *= 0.5;
            }
        } else {
            radius *= 0.25;
        }
        if radius < 1e-10 {
            break;
        }
    }
    Ok((us, cur))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::unitarity_error;

    fn tails(u: &Unitary) -> f64 {
        u.matrix().get(1, 0).norm_sqr()
    }

    #[test]
    fn cayley_steps_stay_unitary() {
        let gens = generators(3);
        assert_eq!(gens.len(), 8);
        let omega = [0.3, -1.2, 0.7, 2.0, 0.1, -0.4, 0.9, 1.5];
        let u = step(&gens, &[Unitary::identity(3)], &omega);
        assert!(unitarity_error(u[0].matrix()) < 1e-12);
    }

    #[test]
    fn balances_two_opposed_objectives() {
        // f0 wants the penny on tails, f1 on heads; the envelope peaks at the
        // even split where both are active.
        let f = |us: &[Unitary]| vec![tails(&us[0]), 1.0 - tails(&us[0])];
        let start = crate::matrix::make_u(crate::matrix::UnitParams::from_angles(0.2, 0.1, 0.4));
        let (_, v) = envelope_ascent(vec![start], &f).unwrap();
        assert!((v - 0.5).abs() < 1e-8, "{v}");
    }
}
