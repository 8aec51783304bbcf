//! Exploitability measurement for a fixed profile.

use super::best_response::{best_response_classical, best_response_quantum_from};
use super::theorems::theorem2_improve;
use super::{DeviationClass, Diagnostics, EquilibriumReport, SolverConfig};
use crate::error::Result;
use crate::game::{GameSpec, Player, Strategy, StrategyProfile};
use crate::matrix::Unitary;
use crate::payoff::expected_payoff;

/// Measures how much each player gains by deviating within their class.
///
/// A best reply to a fixed opponent can always be taken deterministic, so the
/// mixed classes search the same sets as their unmixed counterparts.
pub fn verify_equilibrium(
    game: &GameSpec,
    profile: &StrategyProfile,
    classes: [DeviationClass; 2],
    config: &SolverConfig,
) -> Result<EquilibriumReport> {
    profile.check(game)?;
    let value = expected_payoff(game, profile, Player::P1)?;
    let mut exploit = [0.0; 2];
    let mut sweeps = 0;
    for (idx, player) in [Player::P1, Player::P2].into_iter().enumerate() {
        let current = player.sign() * value;
        let best = match classes[idx] {
            DeviationClass::Pure | DeviationClass::MixedClassical => {
                best_response_classical(game, profile.get(player.other()), player)?.1
            }
            DeviationClass::Quantum | DeviationClass::MixedQuantum => {
                let starts = quantum_starts(game, profile, player)?;
                let r = best_response_quantum_from(
                    game,
                    profile.get(player.other()),
                    player,
                    config.restarts.max(1),
                    &starts,
                    config,
                )?;
                sweeps += r.sweeps;
                r.value
            }
        };
        exploit[idx] = (best - current).max(0.0);
    }
    Ok(EquilibriumReport {
        value,
        strategy_p1: profile.p1.clone(),
        strategy_p2: profile.p2.clone(),
        exploitability_p1: exploit[0],
        exploitability_p2: exploit[1],
        method: "best-response verification".into(),
        diagnostics: Diagnostics { iterations: sweeps, restarts: config.restarts, ..Diagnostics::default() },
        seed: config.seed,
    })
}

/// Seeds for the quantum search: the player's own current unitaries and, on
/// penny-flip shaped games with an all-quantum profile, the winning deviation.
fn quantum_starts(game: &GameSpec, profile: &StrategyProfile, player: Player) -> Result<Vec<Vec<Unitary>>> {
    let mut starts = Vec::new();
    match profile.get(player) {
        Strategy::Quantum(q) => starts.push(q.unitaries.clone()),
        Strategy::MixedQuantum(m) => starts.extend(m.support().iter().map(|(_, q)| q.unitaries.clone())),
        _ => {}
    }
    if let (Strategy::Quantum(a), Strategy::Quantum(b)) = (&profile.p1, &profile.p2) {
        if is_pennyflip_shape(game) {
            let (picard, q) = (&a.unitaries, &b.unitaries);
            let cert = theorem2_improve(&q[0], &picard[0], &q[1])?;
            if cert.deviator == player {
                if let Strategy::Quantum(d) = cert.deviation {
                    starts.push(d.unitaries);
                }
            }
        }
    }
    Ok(starts)
}

/// Two states starting at the first, moves P2, P1, P2 and P1 paid −1 for the
/// first state and +1 for the second.
pub(crate) fn is_pennyflip_shape(game: &GameSpec) -> bool {
    game.dim() == 2
        && game.initial() == 0
        && game.moves() == [Player::P2, Player::P1, Player::P2]
        && game.payoffs_p1() == [-1.0, 1.0]
}
