//! Mixed quantum equilibria of two-state games on a discretized unitary set.
//!
//! Each slot ranges over `U(e^{iα}cosθ, e^{iβ}sinθ)` on a uniform angle grid,
//! with entries that act identically removed. The finite game over slot
//! tuples is far too large to write out, so it is solved by double oracle:
//! the grid oracle is exact (all prefixes enumerated, last slot in closed
//! form in the Bloch picture) and its reply is then polished by continuum
//! coordinate ascent. Exploitabilities are certified against the continuum.

use std::collections::HashSet;
use std::f64::consts::PI;

use super::best_response::best_response_quantum_from;
use super::bloch::{bloch_vector, observable, rotation, Bloch, Rotation};
use super::double_oracle::{DoubleOracle, DoubleOracleResult};
use super::{Diagnostics, EquilibriumReport, RoundSummary, SolverConfig};
use crate::error::{invalid, GameError, Result};
use crate::game::{GameSpec, MixedQuantumStrategy, Player, QuantumStrategy, Strategy};
use crate::matrix::{make_u, DensityMatrix, SquareMatrix, UnitParams, Unitary};
use crate::payoff::branch_payoff;

type Tuple = Vec<Unitary>;

/// Distinct actions of `U(e^{iα}cosθ, e^{iβ}sinθ)` for `n` values of each
/// angle: `θ` spans `[0, π/2]` inclusive, `α` and `β` step by `2π/n`.
pub fn unitary_grid(n: usize) -> Result<Vec<Unitary>> {
    if n < 4 {
        return invalid(format!("grid needs at least 4 points per angle, got {n}"));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for k in 0..n {
        let theta = k as f64 * (PI / 2.0) / (n - 1) as f64;
        for i in 0..n {
            for j in 0..n {
                let (alpha, beta) = (2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64);
                let u = make_u(UnitParams::from_angles(theta, alpha, beta));
                let key: Vec<i64> = rotation(&u).iter().map(|x| (x * 1e8).round() as i64).collect();
                if seen.insert(key) {
                    out.push(u);
                }
            }
        }
    }
    Ok(out)
}

/// Exact best reply over grid tuples, in the Bloch picture.
struct GridSearch<'a> {
    game: &'a GameSpec,
    responder: Player,
    rots: Vec<Rotation>,
    resp_moves: Vec<usize>,
    slot_of_move: Vec<usize>,
    k0: f64,
    k: Bloch,
    r0: Bloch,
    cap: usize,
}

impl<'a> GridSearch<'a> {
    fn new(game: &'a GameSpec, responder: Player, grid: &[Unitary], cap: usize) -> Self {
        let (k0, k) = observable(&SquareMatrix::from_diagonal(&game.payoffs(responder)));
        Self {
            game,
            responder,
            rots: grid.iter().map(rotation).collect(),
            resp_moves: game.move_indices(responder),
            slot_of_move: game.slot_of_move(),
            k0,
            k,
            r0: bloch_vector(DensityMatrix::basis(2, game.initial()).matrix()),
            cap,
        }
    }

    fn rot<'r>(&'r self, move_idx: usize, own: &[usize], opp: &'r [Rotation]) -> &'r Rotation {
        let j = self.slot_of_move[move_idx];
        if self.game.moves()[move_idx] == self.responder { &self.rots[own[j]] } else { &opp[j] }
    }

    fn value(&self, own: &[usize], opp: &[(f64, Vec<Rotation>)]) -> f64 {
        let n = self.game.moves().len();
        opp.iter()
            .map(|(q, o)| {
                let r = (0..n).fold(self.r0, |r, m| self.rot(m, own, o) * r);
                q * (self.k0 + self.k.dot(&r))
            })
            .sum()
    }

    /// Best index tuple and its payoff to the responder.
    fn best(&self, opp: &[(f64, Vec<Rotation>)]) -> (Vec<usize>, f64) {
        let m = self.resp_moves.len();
        if m == 0 {
            return (vec![], self.value(&[], opp));
        }
        let g = self.rots.len();
        let prefixes = (0..m - 1).try_fold(1usize, |acc, _| acc.checked_mul(g));
        match prefixes {
            Some(count) if count <= self.cap => self.enumerate(opp, count),
            _ => self.coordinate(opp),
        }
    }

    fn enumerate(&self, opp: &[(f64, Vec<Rotation>)], count: usize) -> (Vec<usize>, f64) {
        let m = self.resp_moves.len();
        let at = self.resp_moves[m - 1];
        let n = self.game.moves().len();
        // Pull the payoff observable back through the moves after the last slot.
        let pulled: Vec<Bloch> = opp
            .iter()
            .map(|(_, o)| (at + 1..n).rev().fold(self.k, |k, mv| self.rot(mv, &[], o).transpose() * k))
            .collect();
        let mut own = vec![0; m];
        let mut best = (own.clone(), f64::NEG_INFINITY);
        for _ in 0..count {
            let mut mm = Rotation::zeros();
            for ((q, o), k) in opp.iter().zip(&pulled) {
                let r = (0..at).fold(self.r0, |r, mv| self.rot(mv, &own, o) * r);
                mm += k * r.transpose() * *q;
            }
            let (idx, score) = self
                .rots
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r.component_mul(&mm).sum()))
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            let v = self.k0 + score;
            if v > best.1 {
                own[m - 1] = idx;
                best = (own.clone(), v);
            }
            // Advance the mixed-radix prefix counter.
            for d in (0..m - 1).rev() {
                own[d] += 1;
                if own[d] < self.rots.len() {
                    break;
                }
                own[d] = 0;
            }
        }
        best
    }

    fn coordinate(&self, opp: &[(f64, Vec<Rotation>)]) -> (Vec<usize>, f64) {
        let m = self.resp_moves.len();
        let mut own = vec![0; m];
        let mut v = self.value(&own, opp);
        for _ in 0..50 {
            let before = v;
            for s in 0..m {
                for i in 0..self.rots.len() {
                    let old = own[s];
                    own[s] = i;
                    let w = self.value(&own, opp);
                    if w > v + 1e-15 {
                        v = w;
                    } else {
                        own[s] = old;
                    }
                }
            }
            if v <= before + 1e-15 {
                break;
            }
        }
        (own, v)
    }
}

fn mixture(owner: Player, mix: &[(f64, Tuple)]) -> Result<Strategy> {
    let support = mix.iter().map(|(p, us)| (*p, QuantumStrategy::new(owner, us.clone()))).collect();
    Ok(Strategy::MixedQuantum(MixedQuantumStrategy::new(owner, support)?))
}

/// Grid reply refined by continuum ascent, as `(tuple, payoff to player 1)`.
fn oracle(
    game: &GameSpec,
    search: &GridSearch<'_>,
    grid: &[Unitary],
    responder: Player,
    opp: &[(f64, Tuple)],
    restarts: usize,
    config: &SolverConfig,
) -> Result<(Tuple, f64)> {
    let rots: Vec<(f64, Vec<Rotation>)> = opp.iter().map(|(q, us)| (*q, us.iter().map(rotation).collect())).collect();
    let (idx, _) = search.best(&rots);
    let start: Tuple = idx.iter().map(|&i| grid[i].clone()).collect();
    let opponent = mixture(responder.other(), opp)?;
    let r = best_response_quantum_from(game, &opponent, responder, restarts, &[start], config)?;
    Ok((r.strategy.unitaries, responder.sign() * r.value))
}

fn same_tuple(a: &Tuple, b: &Tuple) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_action(y, 1e-9))
}

struct Round {
    result: DoubleOracleResult<Tuple>,
    exploit: [f64; 2],
    iterations: usize,
}

fn solve_round(
    game: &GameSpec,
    grid: &[Unitary],
    rows: Vec<Tuple>,
    cols: Vec<Tuple>,
    config: &SolverConfig,
) -> Result<Round> {
    let s1 = GridSearch::new(game, Player::P1, grid, config.grid_enumeration_cap);
    let s2 = GridSearch::new(game, Player::P2, grid, config.grid_enumeration_cap);
    let payoff = |a: &Tuple, b: &Tuple| branch_payoff(game, a, b);
    let engine = DoubleOracle { payoff: &payoff, same: &same_tuple, tol: config.oracle_tol, max_iters: config.max_oracle_iters };
    let (mut rows, mut cols) = (rows, cols);
    let mut iterations = 0;
    // A cheap single-start oracle drives the loop; a full-restart search
    // certifies the result and feeds back anything it finds.
    for _ in 0..4 {
        let mut o1 = |mix: &[(f64, Tuple)]| oracle(game, &s1, grid, Player::P1, mix, 1, config);
        let mut o2 = |mix: &[(f64, Tuple)]| oracle(game, &s2, grid, Player::P2, mix, 1, config);
        let result = engine.run(rows, cols, &mut o1, &mut o2)?;
        iterations += result.iterations;
        let (c1, upper) = oracle(game, &s1, grid, Player::P1, &result.p2, config.restarts.max(1), config)?;
        let (c2, lower) = oracle(game, &s2, grid, Player::P2, &result.p1, config.restarts.max(1), config)?;
        let exploit = [(upper - result.value).max(0.0), (result.value - lower).max(0.0)];
        let fresh1 = exploit[0] > config.oracle_tol && !result.p1.iter().any(|(_, r)| same_tuple(r, &c1));
        let fresh2 = exploit[1] > config.oracle_tol && !result.p2.iter().any(|(_, c)| same_tuple(c, &c2));
        if !fresh1 && !fresh2 {
            return Ok(Round { result, exploit, iterations });
        }
        rows = result.p1.iter().map(|(_, r)| r.clone()).collect();
        cols = result.p2.iter().map(|(_, c)| c.clone()).collect();
        if fresh1 {
            rows.push(c1);
        }
        if fresh2 {
            cols.push(c2);
        }
    }
    Err(GameError::NoConvergence("continuum certification kept finding improving replies".into()))
}

/// Approximate mixed quantum equilibrium over `refine_rounds` grids of
/// `grid`, `2·grid`, `4·grid`, … points per angle. Each round is warm-started
/// from the previous supports; the report describes the finest round and
/// lists a summary of every round.
pub fn approx_mixed_quantum_equilibrium(
    game: &GameSpec,
    grid: usize,
    refine_rounds: usize,
    config: &SolverConfig,
) -> Result<EquilibriumReport> {
    if game.dim() != 2 {
        return Err(GameError::Unsupported("mixed quantum approximation needs a two-state game".into()));
    }
    if grid < 4 {
        return invalid(format!("grid needs at least 4 points per angle, got {grid}"));
    }
    let ident = |p: Player| vec![Unitary::identity(2); game.move_count(p)];
    let (mut rows, mut cols) = (vec![ident(Player::P1)], vec![ident(Player::P2)]);
    let mut rounds = Vec::new();
    let mut total = 0;
    let mut last = None;
    for r in 0..refine_rounds.max(1) {
        let n = grid << r;
        let points = unitary_grid(n)?;
        let round = solve_round(game, &points, rows, cols, config)?;
        total += round.iterations;
        rounds.push(RoundSummary {
            grid: n,
            grid_points: points.len(),
            value: round.result.value,
            exploitability_p1: round.exploit[0],
            exploitability_p2: round.exploit[1],
            oracle_iterations: round.iterations,
        });
        rows = round.result.p1.iter().map(|(_, t)| t.clone()).collect();
        cols = round.result.p2.iter().map(|(_, t)| t.clone()).collect();
        last = Some((n, round));
    }
    let (n, round) = last.expect("at least one round");
    Ok(EquilibriumReport {
        value: round.result.value,
        strategy_p1: mixture(Player::P1, &round.result.p1)?,
        strategy_p2: mixture(Player::P2, &round.result.p2)?,
        exploitability_p1: round.exploit[0],
        exploitability_p2: round.exploit[1],
        method: "grid double oracle with continuum certification".into(),
        diagnostics: Diagnostics {
            iterations: total,
            grid: Some(n),
            restarts: config.restarts,
            rounds,
            notes: Vec::new(),
        },
        seed: config.seed,
    })
}
