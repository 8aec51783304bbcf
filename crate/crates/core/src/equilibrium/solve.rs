//! Equilibrium search restricted to a strategy class per player.
//!
//! Players in a mixing class (`mixed`, `mixed-quantum`) may randomize; players
//! in `pure` or `quantum` must commit to one deterministic strategy. When no
//! equilibrium exists within the classes the outcome says so and carries the
//! evidence: a best-response cycle, the least exploitable candidate examined,
//! and on penny-flip shaped games a winning deviation certificate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::best_response::{best_response_classical, best_response_quantum, random_slot};
use super::double_oracle::{DoubleOracle, DoubleOracleResult};
use super::lp::pure_saddles;
use super::maximin::envelope_ascent;
use super::mixed_quantum::approx_mixed_quantum_equilibrium;
use super::theorems::theorem2_improve;
use super::verify::{is_pennyflip_shape, verify_equilibrium};
use super::{solve_zero_sum, DeviationCertificate, DeviationClass, EquilibriumReport, SolverConfig};
use crate::error::Result;
use crate::game::{
    enumerate_pure, GameSpec, MixedClassicalStrategy, MixedQuantumStrategy, Player, PureClassicalStrategy,
    QuantumStrategy, Strategy, StrategyProfile,
};
use crate::matrix::Unitary;
use crate::payoff::{branch_payoff, strategic_form};

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Equilibrium(EquilibriumReport),
    NoEquilibrium(NoEquilibrium),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoEquilibrium {
    pub classes: [DeviationClass; 2],
    pub reason: String,
    /// Best-response cycle `(P1, P2)` over pure strategies, when searched.
    pub cycle: Vec<(String, String)>,
    /// Least exploitable candidate profile examined.
    pub closest: Option<EquilibriumReport>,
    pub certificate: Option<DeviationCertificate>,
}

/// Searches for an equilibrium with player 1 in `classes[0]` and player 2 in
/// `classes[1]`. `grid` sets the angular resolution for the mixed quantum
/// pair.
pub fn solve_classes(
    game: &GameSpec,
    classes: [DeviationClass; 2],
    grid: usize,
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    use DeviationClass::*;
    match classes {
        [Pure, Pure] => Ok(solve_pure(game)),
        [MixedClassical, MixedClassical] => Ok(SolveOutcome::Equilibrium(solve_zero_sum(&strategic_form(game))?)),
        [MixedQuantum, MixedQuantum] if game.dim() == 2 => {
            Ok(SolveOutcome::Equilibrium(approx_mixed_quantum_equilibrium(game, grid, 1, config)?))
        }
        [a, b] if a.allows_mixing() && b.allows_mixing() => solve_oracle(game, classes, config),
        _ => solve_committed(game, classes, config),
    }
}

fn solve_pure(game: &GameSpec) -> SolveOutcome {
    let form = strategic_form(game);
    let classes = [DeviationClass::Pure; 2];
    if let Some(&(i, j)) = pure_saddles(&form.values, 1e-12).first() {
        let profile = form.profile(i, j);
        return SolveOutcome::Equilibrium(EquilibriumReport {
            value: form.values[i][j],
            strategy_p1: profile.p1,
            strategy_p2: profile.p2,
            exploitability_p1: 0.0,
            exploitability_p2: 0.0,
            method: "pure saddle point".into(),
            diagnostics: Default::default(),
            seed: 0,
        });
    }
    // Alternate best replies from the first profile until one repeats.
    let a = &form.values;
    let best_row = |j: usize| (0..a.len()).fold(0, |b, i| if a[i][j] > a[b][j] { i } else { b });
    let best_col = |i: usize| (0..a[i].len()).fold(0, |b, j| if a[i][j] < a[i][b] { j } else { b });
    let mut seen: Vec<(usize, usize)> = Vec::new();
    let mut at = (0, 0);
    let mut turn = 0;
    while !seen.contains(&at) {
        seen.push(at);
        at = if turn % 2 == 0 { (best_row(at.1), at.1) } else { (at.0, best_col(at.0)) };
        turn += 1;
    }
    let start = seen.iter().position(|p| *p == at).unwrap();
    let cycle = seen[start..]
        .iter()
        .chain(std::iter::once(&at))
        .map(|&(i, j)| (form.rows[i].label(), form.cols[j].label()))
        .collect();
    SolveOutcome::NoEquilibrium(NoEquilibrium {
        classes,
        reason: "no pure equilibrium: every pure profile admits an improving pure deviation".into(),
        cycle,
        closest: None,
        certificate: None,
    })
}

/// A deterministic strategy found by an oracle: classical ones keep their
/// action names.
#[derive(Debug, Clone)]
struct Candidate {
    unitaries: Vec<Unitary>,
    classical: Option<PureClassicalStrategy>,
}

impl Candidate {
    fn pure(game: &GameSpec, s: PureClassicalStrategy) -> Result<Self> {
        Ok(Self { unitaries: s.unitaries(game)?, classical: Some(s) })
    }

    fn quantum(s: QuantumStrategy) -> Self {
        Self { unitaries: s.unitaries, classical: None }
    }

    fn same(&self, other: &Candidate) -> bool {
        match (&self.classical, &other.classical) {
            (Some(a), Some(b)) => a == b,
            _ => {
                self.unitaries.len() == other.unitaries.len()
                    && self.unitaries.iter().zip(&other.unitaries).all(|(a, b)| a.same_action(b, 1e-9))
            }
        }
    }
}

/// Packs a mixture of candidates into the strategy type of `class`.
fn as_strategy(owner: Player, class: DeviationClass, mix: &[(f64, Candidate)]) -> Result<Strategy> {
    let classical: Option<Vec<(f64, PureClassicalStrategy)>> =
        mix.iter().map(|(p, c)| c.classical.clone().map(|s| (*p, s))).collect();
    let quantum = || mix.iter().map(|(p, c)| (*p, QuantumStrategy::new(owner, c.unitaries.clone()))).collect();
    Ok(match (class, classical) {
        (DeviationClass::Pure, Some(mut s)) if s.len() == 1 => Strategy::Pure(s.remove(0).1),
        (DeviationClass::Quantum, _) if mix.len() == 1 => {
            Strategy::Quantum(QuantumStrategy::new(owner, mix[0].1.unitaries.clone()))
        }
        (DeviationClass::Pure | DeviationClass::MixedClassical, Some(s)) => {
            Strategy::Mixed(MixedClassicalStrategy::new(owner, s)?)
        }
        (_, Some(s)) if mix.len() > 1 => Strategy::Mixed(MixedClassicalStrategy::new(owner, s)?),
        _ => Strategy::MixedQuantum(MixedQuantumStrategy::new(owner, quantum())?),
    })
}

/// Deterministic best reply within `class`, as a candidate and its payoff to
/// player 1.
fn reply(
    game: &GameSpec,
    class: DeviationClass,
    responder: Player,
    opponent: &Strategy,
    config: &SolverConfig,
) -> Result<(Candidate, f64)> {
    if class.is_quantum() {
        let r = best_response_quantum(game, opponent, responder, config.restarts.max(1), config)?;
        Ok((Candidate::quantum(r.strategy), responder.sign() * r.value))
    } else {
        let (s, v) = best_response_classical(game, opponent, responder)?;
        Ok((Candidate::pure(game, s)?, responder.sign() * v))
    }
}

fn initial(game: &GameSpec, owner: Player, class: DeviationClass) -> Result<Candidate> {
    let first = enumerate_pure(game, owner).remove(0);
    let c = Candidate::pure(game, first)?;
    Ok(if class.is_quantum() { Candidate { classical: None, ..c } } else { c })
}

/// Double oracle in which every player may mix over deterministic replies
/// from its own class.
fn run_oracle(
    game: &GameSpec,
    classes: [DeviationClass; 2],
    config: &SolverConfig,
) -> Result<DoubleOracleResult<Candidate>> {
    let payoff = |a: &Candidate, b: &Candidate| branch_payoff(game, &a.unitaries, &b.unitaries);
    let same = |a: &Candidate, b: &Candidate| a.same(b);
    let engine = DoubleOracle { payoff: &payoff, same: &same, tol: config.oracle_tol, max_iters: config.max_oracle_iters };
    let mut o1 = |mix: &[(f64, Candidate)]| {
        let opp = as_strategy(Player::P2, DeviationClass::MixedQuantum, mix)?;
        reply(game, classes[0], Player::P1, &opp, config)
    };
    let mut o2 = |mix: &[(f64, Candidate)]| {
        let opp = as_strategy(Player::P1, DeviationClass::MixedQuantum, mix)?;
        reply(game, classes[1], Player::P2, &opp, config)
    };
    engine.run(
        vec![initial(game, Player::P1, classes[0])?],
        vec![initial(game, Player::P2, classes[1])?],
        &mut o1,
        &mut o2,
    )
}

/// Both players may mix: the double oracle mixtures are the answer.
fn solve_oracle(game: &GameSpec, classes: [DeviationClass; 2], config: &SolverConfig) -> Result<SolveOutcome> {
    let r = run_oracle(game, classes, config)?;
    let profile =
        StrategyProfile::new(as_strategy(Player::P1, classes[0], &r.p1)?, as_strategy(Player::P2, classes[1], &r.p2)?)?;
    let mut report = verify_equilibrium(game, &profile, classes, config)?;
    report.method = "double oracle".into();
    report.diagnostics.iterations = r.iterations;
    conclude(game, classes, report, config)
}

/// Payoff to `owner` when it plays `own` against `other`.
fn payoff_to(game: &GameSpec, owner: Player, own: &[Unitary], other: &[Unitary]) -> f64 {
    match owner {
        Player::P1 => branch_payoff(game, own, other),
        Player::P2 => -branch_payoff(game, other, own),
    }
}

/// The best single commitment for `owner`: the strategy whose worst case over
/// the opponent's replies is highest. `hints` seeds the search and `known`
/// holds opponent strategies already worth guarding against. The search stops
/// early once the worst case reaches `target`.
#[allow(clippy::too_many_arguments)]
fn commit(
    game: &GameSpec,
    classes: [DeviationClass; 2],
    owner: Player,
    hints: &[Candidate],
    known: &[Candidate],
    target: Option<f64>,
    config: &SolverConfig,
) -> Result<(Candidate, f64)> {
    let idx = owner as usize;
    let other = owner.other();
    let opp_class = classes[other as usize];
    let guarantee = |c: &Candidate| -> Result<(Candidate, f64)> {
        let s = as_strategy(owner, classes[idx], &[(1.0, c.clone())])?;
        let (t, v) = reply(game, opp_class, other, &s, config)?;
        Ok((t, owner.sign() * v))
    };
    let reached = |g: f64| target.is_some_and(|t| g >= t - config.eps / 2.0);

    if !classes[idx].is_quantum() {
        let mut best: Option<(Candidate, f64)> = None;
        for s in enumerate_pure(game, owner) {
            let c = Candidate::pure(game, s)?;
            let g = guarantee(&c)?.1;
            if best.as_ref().is_none_or(|b| g > b.1 + 1e-12) {
                best = Some((c, g));
            }
            if reached(g) {
                break;
            }
        }
        return Ok(best.expect("every player has a pure strategy"));
    }

    let mut starts: Vec<Candidate> = hints.iter().take(8).cloned().collect();
    for s in enumerate_pure(game, owner).into_iter().take(8) {
        starts.push(Candidate { classical: None, ..Candidate::pure(game, s)? });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (0x5eed_u64 << idx));
    let slots = game.move_count(owner);
    for _ in 0..config.restarts {
        let us = (0..slots).map(|_| random_slot(&mut rng, game.dim())).collect();
        starts.push(Candidate { unitaries: us, classical: None });
    }

    let mut opponents: Vec<Candidate> = known.to_vec();
    if !opp_class.is_quantum() {
        for t in enumerate_pure(game, other).into_iter().take(64) {
            let c = Candidate::pure(game, t)?;
            if !opponents.iter().any(|o| o.same(&c)) {
                opponents.push(c);
            }
        }
    }
    let mut best: Option<(Candidate, f64)> = None;
    for start in starts {
        let mut us = start.unitaries;
        for _ in 0..12 {
            if opponents.is_empty() {
                opponents.push(guarantee(&Candidate { unitaries: us.clone(), classical: None })?.0);
            }
            let envelope =
                |u: &[Unitary]| opponents.iter().map(|t| payoff_to(game, owner, u, &t.unitaries)).collect::<Vec<f64>>();
            let (next, bound) = envelope_ascent(us, &envelope)?;
            us = next;
            let c = Candidate { unitaries: us.clone(), classical: None };
            let (t, g) = guarantee(&c)?;
            if best.as_ref().is_none_or(|b| g > b.1) {
                best = Some((c, g));
            }
            // The reply set already captures the worst case here.
            if g >= bound - 1e-9 || opponents.iter().any(|o| o.same(&t)) {
                break;
            }
            opponents.push(t);
        }
        if best.as_ref().is_some_and(|b| reached(b.1)) {
            break;
        }
    }
    Ok(best.expect("at least one start"))
}

/// At least one player must commit to a single strategy. Mixing players take
/// their double oracle mixture, which is optimal against every commitment
/// that matches the mixed value; committing players then maximize their worst
/// case. The profile is an equilibrium exactly when those worst cases meet
/// the mixed value.
fn solve_committed(game: &GameSpec, classes: [DeviationClass; 2], config: &SolverConfig) -> Result<SolveOutcome> {
    let mixed = if classes.iter().any(|c| c.allows_mixing()) { Some(run_oracle(game, classes, config)?) } else { None };
    let support = |owner: Player| -> Vec<Candidate> {
        let Some(r) = &mixed else { return Vec::new() };
        let mut mix = if owner == Player::P1 { r.p1.clone() } else { r.p2.clone() };
        mix.sort_by(|x, y| y.0.total_cmp(&x.0));
        mix.into_iter().map(|(_, c)| c).collect()
    };
    let mut strategies = Vec::with_capacity(2);
    for owner in [Player::P1, Player::P2] {
        let class = classes[owner as usize];
        let own = support(owner);
        if class.allows_mixing() {
            let r = mixed.as_ref().expect("a mixing player ran the oracle");
            strategies.push(as_strategy(owner, class, if owner == Player::P1 { &r.p1 } else { &r.p2 })?);
            continue;
        }
        let target = mixed.as_ref().map(|r| owner.sign() * r.value);
        let (c, _) = commit(game, classes, owner, &own, &support(owner.other()), target, config)?;
        strategies.push(as_strategy(owner, class, &[(1.0, c)])?);
    }
    let s2 = strategies.pop().expect("two strategies");
    let s1 = strategies.pop().expect("two strategies");
    let mut report = verify_equilibrium(game, &StrategyProfile::new(s1, s2)?, classes, config)?;
    report.method = if mixed.is_some() { "double oracle with worst-case commitment" } else { "worst-case commitment" }.into();
    report.diagnostics.iterations = mixed.map_or(0, |r| r.iterations);
    conclude(game, classes, report, config)
}

fn conclude(
    game: &GameSpec,
    classes: [DeviationClass; 2],
    report: EquilibriumReport,
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    if report.is_equilibrium(config.eps) {
        return Ok(SolveOutcome::Equilibrium(report));
    }
    let (certificate, reason) = match (&report.strategy_p1, &report.strategy_p2) {
        (Strategy::Quantum(a), Strategy::Quantum(b)) if is_pennyflip_shape(game) => (
            Some(theorem2_improve(&b.unitaries[0], &a.unitaries[0], &b.unitaries[1])?),
            "no quantum/quantum equilibrium: one side can always deviate to a certain win".to_string(),
        ),
        _ => (
            None,
            format!("no {}/{} equilibrium found: the best candidate remains exploitable", classes[0], classes[1]),
        ),
    };
    Ok(SolveOutcome::NoEquilibrium(NoEquilibrium {
        classes,
        reason,
        cycle: Vec::new(),
        closest: Some(report),
        certificate,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pennyflip;

    fn cfg() -> SolverConfig {
        SolverConfig { restarts: 4, ..SolverConfig::default() }
    }

    fn equilibrium(o: SolveOutcome) -> EquilibriumReport {
        match o {
            SolveOutcome::Equilibrium(r) => r,
            SolveOutcome::NoEquilibrium(n) => panic!("expected equilibrium: {}", n.reason),
        }
    }

    #[test]
    fn pennyflip_has_no_pure_equilibrium() {
        let o = solve_classes(&pennyflip::game(), [DeviationClass::Pure; 2], 8, &cfg()).unwrap();
        let SolveOutcome::NoEquilibrium(n) = o else { panic!("pennyflip has no saddle") };
        assert!(n.reason.contains("no pure equilibrium"));
        assert!(n.cycle.len() >= 3);
        assert_eq!(n.cycle.first(), n.cycle.last());
    }

    #[test]
    fn saddle_is_found() {
        let mut g = pennyflip::game();
        g = GameSpec::new(g.basis().to_vec(), 0, g.moves().to_vec(), g.actions().clone(), vec![2.0, 2.0]).unwrap();
        let r = equilibrium(solve_classes(&g, [DeviationClass::Pure; 2], 8, &cfg()).unwrap());
        assert_eq!(r.value, 2.0);
    }

    #[test]
    fn mixed_pair_value_zero() {
        let r = equilibrium(solve_classes(&pennyflip::game(), [DeviationClass::MixedClassical; 2], 8, &cfg()).unwrap());
        assert!(r.value.abs() < 1e-9);
    }

    #[test]
    fn mixed_against_quantum_is_minus_one() {
        let classes = [DeviationClass::MixedClassical, DeviationClass::Quantum];
        let r = equilibrium(solve_classes(&pennyflip::game(), classes, 8, &cfg()).unwrap());
        assert!((r.value + 1.0).abs() < 1e-9);
        assert!(matches!(r.strategy_p2, Strategy::Quantum(_)));
    }

    #[test]
    fn quantum_commitment_against_mixing_breaks_even() {
        // A balanced Picard unitary guarantees 0; Q's even mixture over its
        // last move guarantees 0 against anything.
        let classes = [DeviationClass::Quantum, DeviationClass::MixedClassical];
        let r = equilibrium(solve_classes(&pennyflip::game(), classes, 8, &cfg()).unwrap());
        assert!(r.value.abs() < 1e-6, "{}", r.value);
        let Strategy::Quantum(q) = &r.strategy_p1 else { panic!("P1 commits") };
        let tails = q.unitaries[0].matrix().get(1, 0).norm_sqr();
        assert!((tails - 0.5).abs() < 1e-5, "{tails}");
    }

    #[test]
    fn pure_against_quantum_is_minus_one() {
        let classes = [DeviationClass::Pure, DeviationClass::Quantum];
        let r = equilibrium(solve_classes(&pennyflip::game(), classes, 8, &cfg()).unwrap());
        assert!((r.value + 1.0).abs() < 1e-6);
    }

    #[test]
    fn quantum_against_pure_has_no_equilibrium() {
        let classes = [DeviationClass::Quantum, DeviationClass::Pure];
        let o = solve_classes(&pennyflip::game(), classes, 8, &cfg()).unwrap();
        assert!(matches!(o, SolveOutcome::NoEquilibrium(_)));
    }

    #[test]
    fn quantum_pair_has_no_equilibrium() {
        let o = solve_classes(&pennyflip::game(), [DeviationClass::Quantum; 2], 8, &cfg()).unwrap();
        let SolveOutcome::NoEquilibrium(n) = o else { panic!("quantum pair has no equilibrium") };
        let cert = n.certificate.expect("penny flip certificate");
        assert!((cert.improved_payoff - 1.0).abs() < 1e-9);
    }
}
