//! Constructive quantum-strategy results.
//!
//! `theorem1_lift` replaces one player's per-move classical mixing with a
//! unitary per move that has the same effect on every stage's outcome
//! probabilities. `theorem2_improve` exhibits, for any all-quantum penny-flip
//! profile, a unilateral deviation that wins with certainty.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use super::DeviationCertificate;
use crate::error::{GameError, Result};
use crate::game::{GameSpec, Player, QuantumStrategy, Strategy, StrategyProfile};
use crate::matrix::{conjugate, make_u, mix_channels, off_diagonal_phase, DensityMatrix, UnitParams, Unitary, TOL};
use crate::payoff::expected_payoff;
use crate::pennyflip;

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedStrategy {
    pub strategy: QuantumStrategy,
    /// Outcome probabilities of the classical profile, one entry per stage.
    pub classical_diagonals: Vec<Vec<f64>>,
    /// Diagonals of the density matrix with the lifted strategy in place.
    pub quantum_diagonals: Vec<Vec<f64>>,
}

impl LiftedStrategy {
    pub fn max_error(&self) -> f64 {
        self.classical_diagonals
            .iter()
            .zip(&self.quantum_diagonals)
            .flat_map(|(c, q)| c.iter().zip(q).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// `U(e^{i(π/2−γ)}√(1−p), √p)`: on any state whose `(0,1)` entry has phase
/// `γ`, conjugation moves the diagonal exactly as `pF + (1−p)N` does.
pub fn lift_slot_unitary(gamma: f64, flip_probability: f64) -> Unitary {
    let p = flip_probability.clamp(0.0, 1.0);
    let a = Complex64::from_polar((1.0 - p).sqrt(), FRAC_PI_2 - gamma);
    let b = Complex64::new(p.sqrt(), 0.0);
    make_u(UnitParams::new(a, b).expect("normalized by construction"))
}

fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(GameError::Unsupported(msg.into()))
}

/// Lifts `quantum_player`'s classical strategy in `profile` to a quantum one.
///
/// Both strategies must be classical and randomize independently per move,
/// and the game must have two basis states.
pub fn theorem1_lift(
    game: &GameSpec,
    profile: &StrategyProfile,
    quantum_player: Player,
) -> Result<LiftedStrategy> {
    profile.check(game)?;
    if game.dim() != 2 {
        return unsupported("the lift is defined for two-state games only");
    }
    if !profile.p1.is_classical() || !profile.p2.is_classical() {
        return unsupported("the lift starts from a classical profile");
    }
    let channels = |s: &Strategy| -> Result<Vec<Vec<(f64, Unitary)>>> {
        match s.move_channels(game)? {
            Some(c) => Ok(c),
            None => unsupported(format!(
                "{} strategy correlates its moves; only per-move mixing can be lifted",
                s.owner()
            )),
        }
    };
    let own = channels(profile.get(quantum_player))?;
    let other = channels(profile.get(quantum_player.other()))?;
    let flip = Unitary::flip();
    let flip_probs: Vec<f64> = own
        .iter()
        .map(|c| c.iter().filter(|(_, u)| *u == flip).map(|(p, _)| p).sum())
        .collect();

    let slots = game.slot_of_move();
    let mut rho = DensityMatrix::basis(2, game.initial());
    let mut classical = rho.diagonal();
    let mut classical_diagonals = vec![classical.clone()];
    let mut quantum_diagonals = vec![rho.diagonal()];
    let mut lifted = Vec::new();
    for (k, player) in game.moves().iter().enumerate() {
        let slot = slots[k];
        let channel = if *player == quantum_player { &own[slot] } else { &other[slot] };
        classical = channel.iter().fold(vec![0.0; 2], |mut acc, (p, u)| {
            let moved = if *u == flip { [classical[1], classical[0]] } else { [classical[0], classical[1]] };
            acc[0] += p * moved[0];
            acc[1] += p * moved[1];
            acc
        });
        if *player == quantum_player {
            let gamma = off_diagonal_phase(&rho, 0, 1)?;
            let u = lift_slot_unitary(gamma, flip_probs[slot]);
            rho = conjugate(&u, &rho)?;
            lifted.push(u);
        } else {
            rho = mix_channels(channel, &rho)?;
        }
        classical_diagonals.push(classical.clone());
        quantum_diagonals.push(rho.diagonal());
    }
    Ok(LiftedStrategy {
        strategy: QuantumStrategy::new(quantum_player, lifted),
        classical_diagonals,
        quantum_diagonals,
    })
}

/// Given penny-flip quantum moves `U1, U3` for Q and `U2` for Picard, returns
/// the deviation that wins outright: Q swaps `U3` for `U1⁻¹U2⁻¹` unless the
/// penny already ends head up, in which case Picard swaps `U2` for
/// `U3⁻¹ F U1⁻¹`.
pub fn theorem2_improve(u1: &Unitary, u2: &Unitary, u3: &Unitary) -> Result<DeviationCertificate> {
    if [u1, u2, u3].iter().any(|u| u.dim() != 2) {
        return Err(GameError::InvalidParameter("penny-flip moves are 2x2 unitaries".into()));
    }
    let game = pennyflip::game();
    let q = |a: &Unitary, c: &Unitary| Strategy::Quantum(QuantumStrategy::new(pennyflip::Q, vec![a.clone(), c.clone()]));
    let picard = |b: &Unitary| Strategy::Quantum(QuantumStrategy::new(pennyflip::PICARD, vec![b.clone()]));
    let final_state = conjugate(&u3.compose(u2).compose(u1), &DensityMatrix::basis(2, 0))?;
    let head = final_state.diagonal()[0];
    let original = StrategyProfile::new(picard(u2), q(u1, u3))?;

    let (deviator, deviation, profile) = if head < 1.0 - TOL {
        let u3_new = u1.inverse().compose(&u2.inverse());
        let s = q(u1, &u3_new);
        (pennyflip::Q, s.clone(), StrategyProfile::new(picard(u2), s)?)
    } else {
        let u2_new = u3.inverse().compose(&Unitary::flip()).compose(&u1.inverse());
        let s = picard(&u2_new);
        (pennyflip::PICARD, s.clone(), StrategyProfile::new(s, q(u1, u3))?)
    };
    Ok(DeviationCertificate {
        deviator,
        original_payoff: expected_payoff(&game, &original, deviator)?,
        improved_payoff: expected_payoff(&game, &profile, deviator)?,
        deviation,
    })
}
