//! Best responses against a fixed opponent strategy.
//!
//! The quantum search is coordinate ascent over the responder's unitary
//! slots. With every other slot fixed, the payoff is
//! `Σ_s q_s Tr(K_s U ρ_s U†)` over the opponent's deterministic branches `s`,
//! where `ρ_s` is the state entering the slot and `K_s` the payoff operator
//! pulled back through the later moves. When that sum collapses to a single
//! pair `Tr(K U ρ U†)` the optimum pairs the eigenvalues of `K` and `ρ` in
//! descending order. For two-state games the general sum is a rotation fit
//! in the Bloch picture; in larger games a Cayley-retraction gradient ascent
//! takes over.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::bloch::{best_rotation, bloch_vector, observable, unitary_from_rotation};
use super::SolverConfig;
use crate::error::{invalid, Result};
use crate::game::{enumerate_pure, Branch, GameSpec, Player, PureClassicalStrategy, QuantumStrategy, Strategy};
use crate::matrix::{hermitian_eig, make_u, random_unitary, DensityMatrix, SquareMatrix, UnitParams, Unitary};
use crate::payoff::branch_payoff;

/// Best pure strategy for `responder` against the fixed `opponent`, with its
/// payoff to the responder. Ties go to the first in enumeration order.
pub fn best_response_classical(
    game: &GameSpec,
    opponent: &Strategy,
    responder: Player,
) -> Result<(PureClassicalStrategy, f64)> {
    check_opponent(game, opponent, responder)?;
    let branches = opponent.branches(game)?;
    let mut best: Option<(PureClassicalStrategy, f64)> = None;
    for s in enumerate_pure(game, responder) {
        let us = s.unitaries(game)?;
        let v = responder_payoff(game, responder, &us, &branches);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((s, v));
        }
    }
    Ok(best.expect("at least one pure strategy"))
}

fn check_opponent(game: &GameSpec, opponent: &Strategy, responder: Player) -> Result<()> {
    if opponent.owner() == responder {
        return invalid("opponent strategy must belong to the other player");
    }
    opponent.check(game)
}

pub(crate) fn responder_payoff(
    game: &GameSpec,
    responder: Player,
    us: &[Unitary],
    opponent: &[Branch],
) -> f64 {
    let p1: f64 = opponent
        .iter()
        .map(|(q, o)| {
            q * match responder {
                Player::P1 => branch_payoff(game, us, o),
                Player::P2 => branch_payoff(game, o, us),
            }
        })
        .sum();
    responder.sign() * p1
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumResponse {
    pub strategy: QuantumStrategy,
    /// Payoff to the responder.
    pub value: f64,
    /// Value after each sweep of the winning restart, starting with its
    /// initial point.
    pub history: Vec<f64>,
    pub sweeps: usize,
    pub restarts: usize,
}

/// Quantum best response by coordinate ascent from `restarts` starting
/// points. The first start is the best pure classical strategy, so the
/// result never falls below the classical best response.
pub fn best_response_quantum(
    game: &GameSpec,
    opponent: &Strategy,
    responder: Player,
    restarts: usize,
    config: &SolverConfig,
) -> Result<QuantumResponse> {
    best_response_quantum_from(game, opponent, responder, restarts, &[], config)
}

/// As [`best_response_quantum`], with extra caller-supplied starting points
/// tried before the random ones.
pub fn best_response_quantum_from(
    game: &GameSpec,
    opponent: &Strategy,
    responder: Player,
    restarts: usize,
    extra_starts: &[Vec<Unitary>],
    config: &SolverConfig,
) -> Result<QuantumResponse> {
    if restarts == 0 {
        return invalid("restarts must be at least 1");
    }
    check_opponent(game, opponent, responder)?;
    let branches = opponent.branches(game)?;
    let slots = game.move_count(responder);

    let (classical, _) = best_response_classical(game, opponent, responder)?;
    let mut starts = vec![classical.unitaries(game)?];
    starts.extend(extra_starts.iter().filter(|s| s.len() == slots).cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    while starts.len() < restarts + extra_starts.len() {
        starts.push((0..slots).map(|_| random_slot(&mut rng, game.dim())).collect());
    }

    let ascent = Ascent::new(game, responder, &branches);
    let mut best: Option<(Vec<Unitary>, Vec<f64>)> = None;
    let mut sweeps = 0;
    for start in starts {
        let (us, history) = ascent.run(start, config);
        sweeps += history.len() - 1;
        let v = *history.last().unwrap();
        if best.as_ref().is_none_or(|(_, h)| v > *h.last().unwrap()) {
            best = Some((us, history));
        }
    }
    let (us, history) = best.unwrap();
    Ok(QuantumResponse {
        value: *history.last().unwrap(),
        strategy: QuantumStrategy::new(responder, us),
        history,
        sweeps,
        restarts,
    })
}

/// A unitary with `(θ, α, β)` drawn uniformly for two-state games, Haar
/// otherwise.
pub(crate) fn random_slot<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Unitary {
    if dim == 2 {
        let theta = rng.gen_range(0.0..PI / 2.0);
        make_u(UnitParams::from_angles(theta, rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)))
    } else {
        random_unitary(rng, dim)
    }
}

struct Ascent<'a> {
    game: &'a GameSpec,
    responder: Player,
    branches: &'a [Branch],
    resp_moves: Vec<usize>,
    slot_of_move: Vec<usize>,
    payoff_op: SquareMatrix,
}

/// One term `q Tr(K U ρ U†)` of a single-slot objective.
struct SlotTerm {
    weight: f64,
    rho: SquareMatrix,
    k: SquareMatrix,
}

impl<'a> Ascent<'a> {
    fn new(game: &'a GameSpec, responder: Player, branches: &'a [Branch]) -> Self {
        Self {
            game,
            responder,
            branches,
            resp_moves: game.move_indices(responder),
            slot_of_move: game.slot_of_move(),
            payoff_op: SquareMatrix::from_diagonal(&game.payoffs(responder)),
        }
    }

    fn value(&self, us: &[Unitary]) -> f64 {
        responder_payoff(self.game, self.responder, us, self.branches)
    }

    fn run(&self, mut us: Vec<Unitary>, config: &SolverConfig) -> (Vec<Unitary>, Vec<f64>) {
        let mut history = vec![self.value(&us)];
        if us.is_empty() {
            return (us, history);
        }
        for _ in 0..config.max_sweeps {
            for slot in 0..us.len() {
                let terms = self.slot_terms(&us, slot);
                us[slot] = best_slot_unitary(&terms, &us[slot]);
            }
            let v = self.value(&us);
            let prev = *history.last().unwrap();
            history.push(v);
            if v - prev < config.ascent_tol {
                break;
            }
        }
        (us, history)
    }

    fn slot_terms(&self, us: &[Unitary], slot: usize) -> Vec<SlotTerm> {
        let at = self.resp_moves[slot];
        let moves = self.game.moves();
        let unitary = |k: usize, opp: &'a [Unitary]| -> &Unitary {
            let j = self.slot_of_move[k];
            if moves[k] == self.responder { &us[j] } else { &opp[j] }
        };
        self.branches
            .iter()
            .map(|(q, opp)| {
                let mut rho = DensityMatrix::basis(self.game.dim(), self.game.initial()).matrix().clone();
                for k in 0..at {
                    let u = unitary(k, opp).matrix();
                    rho = u.mul(&rho).mul(&u.adjoint());
                }
                let mut k_op = self.payoff_op.clone();
                for k in (at + 1..moves.len()).rev() {
                    let u = unitary(k, opp).matrix();
                    k_op = u.adjoint().mul(&k_op).mul(u);
                }
                SlotTerm { weight: *q, rho, k: k_op }
            })
            .collect()
    }
}

fn slot_objective(terms: &[SlotTerm], u: &Unitary) -> f64 {
    let m = u.matrix();
    let md = m.adjoint();
    terms
        .iter()
        .map(|t| t.weight * t.k.mul(m).mul(&t.rho).mul(&md).trace().re)
        .sum()
}

fn weighted_sum(terms: &[SlotTerm], pick: impl Fn(&SlotTerm) -> &SquareMatrix) -> SquareMatrix {
    let n = terms[0].rho.dim();
    let mut acc = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for t in terms {
        acc += pick(t).inner() * Complex64::new(t.weight, 0.0);
    }
    SquareMatrix::from_inner(acc)
}

/// `Σ q_s ρ_s ⊗ K_s = ρ̄ ⊗ K̄` entrywise.
fn is_separable(terms: &[SlotTerm], rho_bar: &SquareMatrix, k_bar: &SquareMatrix) -> bool {
    if terms.len() == 1 {
        return true;
    }
    let n = rho_bar.dim();
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let joint: Complex64 = terms
                        .iter()
                        .map(|t| t.rho.get(i, j) * t.k.get(a, b) * t.weight)
                        .sum();
                    if (joint - rho_bar.get(i, j) * k_bar.get(a, b)).norm() > 1e-12 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Maximizer of `Tr(K U ρ U†)`: maps the `k`-th eigenvector of `ρ` onto the
/// `k`-th eigenvector of `K`, both in descending eigenvalue order.
pub fn trace_pairing_unitary(k: &SquareMatrix, rho: &SquareMatrix) -> Result<Unitary> {
    let (_, vk) = hermitian_eig(k)?;
    let (_, vr) = hermitian_eig(rho)?;
    Unitary::new(vk.mul(&vr.adjoint()))
}

fn best_slot_unitary(terms: &[SlotTerm], current: &Unitary) -> Unitary {
    let rho_bar = weighted_sum(terms, |t| &t.rho);
    let k_bar = weighted_sum(terms, |t| &t.k);
    let candidate = if is_separable(terms, &rho_bar, &k_bar) {
        trace_pairing_unitary(&k_bar, &rho_bar).ok()
    } else if current.dim() == 2 {
        let mut m = Matrix3::zeros();
        for t in terms {
            let (_, kv) = observable(&t.k);
            m += kv * bloch_vector(&t.rho).transpose() * t.weight;
        }
        Some(unitary_from_rotation(&best_rotation(&m)))
    } else {
        Some(gradient_ascent(terms, current.clone()))
    };
    match candidate {
        Some(u) if slot_objective(terms, &u) >= slot_objective(terms, current) => u,
        _ => current.clone(),
    }
}

fn gradient_ascent(terms: &[SlotTerm], mut u: Unitary) -> Unitary {
    let n = u.dim();
    let eye = DMatrix::<Complex64>::identity(n, n);
    let mut f = slot_objective(terms, &u);
    for _ in 0..200 {
        let m = u.matrix().inner();
        let mut grad = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for t in terms {
            let sigma = m * t.rho.inner() * m.adjoint();
            let k = t.k.inner();
            grad += (k * &sigma - &sigma * k) * Complex64::new(t.weight, 0.0);
        }
        if grad.norm() < 1e-12 {
            break;
        }
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-10 {
            let half = &grad * Complex64::new(step / 2.0, 0.0);
            let Some(inv) = (&eye - &half).try_inverse() else { break };
            let cayley = inv * (&eye + &half);
            let next = Unitary::new_unchecked(SquareMatrix::from_inner(cayley * m));
            let g = slot_objective(terms, &next);
            if g > f {
                u = next;
                improved = g - f > 1e-14;
                f = g;
                break;
            }
            step /= 2.0;
        }
        if !improved {
            break;
        }
    }
    u
}
