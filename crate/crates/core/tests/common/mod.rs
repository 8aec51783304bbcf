#![allow(dead_code)]

use indexmap::IndexMap;
use qgame_core::matrix::random_unitary;
use qgame_core::{
    behavioral_to_mixed, GameSpec, MixedClassicalStrategy, MixedQuantumStrategy, Player, PureClassicalStrategy,
    QuantumStrategy, Strategy, Unitary,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_permutation<R: Rng>(rng: &mut R, dim: usize) -> Unitary {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if perm[j] == i { 1.0 } else { 0.0 }).collect())
        .collect();
    Unitary::from_real_rows(&rows).unwrap()
}

/// Two to four states, one to four moves, up to three permutation actions.
pub fn random_game<R: Rng>(rng: &mut R, max_dim: usize, max_moves: usize) -> GameSpec {
    let dim = rng.gen_range(2..=max_dim);
    let basis = (0..dim).map(|i| format!("s{i}")).collect();
    let moves = (0..rng.gen_range(1..=max_moves))
        .map(|_| if rng.gen_bool(0.5) { Player::P1 } else { Player::P2 })
        .collect();
    let mut actions = IndexMap::new();
    actions.insert("A0".to_string(), Unitary::identity(dim));
    for k in 1..rng.gen_range(1..=3) {
        actions.insert(format!("A{k}"), random_permutation(rng, dim));
    }
    let payoffs = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
    GameSpec::new(basis, rng.gen_range(0..dim), moves, actions, payoffs).unwrap()
}

fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub fn random_pure<R: Rng>(rng: &mut R, game: &GameSpec, owner: Player) -> PureClassicalStrategy {
    let names: Vec<&String> = game.actions().keys().collect();
    let actions = (0..game.move_count(owner)).map(|_| (*names.choose(rng).unwrap()).clone()).collect();
    PureClassicalStrategy::new(owner, actions)
}

pub fn random_quantum<R: Rng>(rng: &mut R, game: &GameSpec, owner: Player) -> QuantumStrategy {
    QuantumStrategy::new(owner, (0..game.move_count(owner)).map(|_| random_unitary(rng, game.dim())).collect())
}

pub fn random_mixed<R: Rng>(rng: &mut R, game: &GameSpec, owner: Player) -> MixedClassicalStrategy {
    let n = rng.gen_range(1..=3);
    let support = weights(rng, n).into_iter().map(|p| (p, random_pure(rng, game, owner))).collect();
    MixedClassicalStrategy::new(owner, support).unwrap()
}

pub fn random_behavioral<R: Rng>(rng: &mut R, game: &GameSpec, owner: Player) -> MixedClassicalStrategy {
    let names: Vec<String> = game.actions().keys().cloned().collect();
    let per_move: Vec<Vec<(String, f64)>> = (0..game.move_count(owner))
        .map(|_| names.iter().cloned().zip(weights(rng, names.len())).collect())
        .collect();
    behavioral_to_mixed(owner, &per_move).unwrap()
}

pub fn random_mixed_quantum<R: Rng>(rng: &mut R, game: &GameSpec, owner: Player) -> MixedQuantumStrategy {
    let n = rng.gen_range(1..=3);
    let support = weights(rng, n).into_iter().map(|p| (p, random_quantum(rng, game, owner))).collect();
    MixedQuantumStrategy::new(owner, support).unwrap()
}

/// Any strategy variant.
pub fn random_strategy<R: Rng>(rng: &mut R, game: &GameSpec, owner: Player) -> Strategy {
    match rng.gen_range(0..4) {
        0 => Strategy::Pure(random_pure(rng, game, owner)),
        1 => Strategy::Mixed(random_mixed(rng, game, owner)),
        2 => Strategy::Quantum(random_quantum(rng, game, owner)),
        _ => Strategy::MixedQuantum(random_mixed_quantum(rng, game, owner)),
    }
}

/// A strategy that randomizes independently per move.
pub fn random_product_strategy<R: Rng>(rng: &mut R, game: &GameSpec, owner: Player) -> Strategy {
    match rng.gen_range(0..3) {
        0 => Strategy::Pure(random_pure(rng, game, owner)),
        1 => Strategy::Mixed(random_behavioral(rng, game, owner)),
        _ => Strategy::Quantum(random_quantum(rng, game, owner)),
    }
}

/// `λσ + (1−λ)τ` for two strategies of the same mixing family.
pub fn blend(lambda: f64, a: &Strategy, b: &Strategy) -> Option<Strategy> {
    match (a, b) {
        (Strategy::Mixed(x), Strategy::Mixed(y)) => {
            let support = x
                .support()
                .iter()
                .map(|(p, s)| (lambda * p, s.clone()))
                .chain(y.support().iter().map(|(p, s)| ((1.0 - lambda) * p, s.clone())))
                .collect();
            MixedClassicalStrategy::new(x.owner(), support).ok().map(Strategy::Mixed)
        }
        (Strategy::MixedQuantum(x), Strategy::MixedQuantum(y)) => {
            let support = x
                .support()
                .iter()
                .map(|(p, s)| (lambda * p, s.clone()))
                .chain(y.support().iter().map(|(p, s)| ((1.0 - lambda) * p, s.clone())))
                .collect();
            MixedQuantumStrategy::new(x.owner(), support).ok().map(Strategy::MixedQuantum)
        }
        _ => None,
    }
}

/// Minimax value of a 2×n game by checking every breakpoint of the row
/// player's lower envelope.
pub fn two_row_value(a: &[Vec<f64>]) -> f64 {
    assert_eq!(a.len(), 2);
    let n = a[0].len();
    let line = |j: usize, x: f64| x * a[0][j] + (1.0 - x) * a[1][j];
    let mut xs = vec![0.0, 1.0];
    for j in 0..n {
        for k in j + 1..n {
            // x·(a0j − a1j − a0k + a1k) = a1k − a1j
            let den = a[0][j] - a[1][j] - a[0][k] + a[1][k];
            if den.abs() > 1e-15 {
                let x = (a[1][k] - a[1][j]) / den;
                if (0.0..=1.0).contains(&x) {
                    xs.push(x);
                }
            }
        }
    }
    xs.into_iter()
        .map(|x| (0..n).map(|j| line(j, x)).fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max)
}
