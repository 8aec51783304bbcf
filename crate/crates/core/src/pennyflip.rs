//! The built-in penny-flip game and its named strategies.
//!
//! Player 1 is Picard (payoff owner), player 2 is Q. The penny starts head
//! up and Q wins when it is still head up at the end.

use indexmap::IndexMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::game::{
    behavioral_to_mixed, GameSpec, MixedClassicalStrategy, MixedQuantumStrategy, Player,
    QuantumStrategy,
};
use crate::matrix::{make_u, UnitParams, Unitary};
use num_complex::Complex64;

pub const PICARD: Player = Player::P1;
pub const Q: Player = Player::P2;

fn actions() -> IndexMap<String, Unitary> {
    let mut actions = IndexMap::new();
    actions.insert("N".to_string(), Unitary::identity(2));
    actions.insert("F".to_string(), Unitary::flip());
    actions
}

fn with_moves(moves: Vec<Player>) -> GameSpec {
    GameSpec::new(vec!["H".into(), "T".into()], 0, moves, actions(), vec![-1.0, 1.0])
        .expect("penny flip is a valid game")
}

/// Q, Picard, Q.
pub fn game() -> GameSpec {
    with_moves(vec![Q, PICARD, Q])
}

/// The game stopped after Picard's move: Q, Picard.
pub fn two_move_game() -> GameSpec {
    with_moves(vec![Q, PICARD])
}

/// `U(1/√2, 1/√2)`.
pub fn hadamard() -> Unitary {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    make_u(UnitParams::new(s, s).expect("normalized"))
}

pub fn q_hadamard_pair() -> QuantumStrategy {
    QuantumStrategy::new(Q, vec![hadamard(), hadamard()])
}

fn flip_dist(p: f64) -> Vec<(String, f64)> {
    vec![("N".to_string(), 1.0 - p), ("F".to_string(), p)]
}

/// Picard flips with probability `p` on his single move.
pub fn picard_flip(p: f64) -> MixedClassicalStrategy {
    behavioral_to_mixed(PICARD, &[flip_dist(p)]).expect("valid flip probability")
}

/// Each of Q's moves flips independently with probability `p`.
pub fn q_flip(moves: usize, p: f64) -> MixedClassicalStrategy {
    behavioral_to_mixed(Q, &vec![flip_dist(p); moves]).expect("valid flip probability")
}

/// Q plays NN, NF, FN, FF with probability 1/4 each.
pub fn q_uniform() -> MixedClassicalStrategy {
    q_flip(2, 0.5)
}

/// The four Pauli-type unitaries `I, F, diag(1,−1), F·diag(1,−1)`.
pub fn pauli_unitaries() -> [Unitary; 4] {
    let z = Unitary::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
    let fz = Unitary::flip().compose(&z);
    [Unitary::identity(2), Unitary::flip(), z, fz]
}

/// Uniform Pauli mixture for a player with a single move; maps every state
/// to `I/2`.
pub fn pauli_twirl(owner: Player) -> MixedQuantumStrategy {
    let support = pauli_unitaries()
        .into_iter()
        .map(|u| (0.25, QuantumStrategy::new(owner, vec![u])))
        .collect();
    MixedQuantumStrategy::new(owner, support).expect("uniform weights")
}
