//! State evolution through a move sequence and expected payoffs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::game::{enumerate_pure, Branch, GameSpec, Player, PureClassicalStrategy, Strategy, StrategyProfile};
use crate::matrix::{conjugate_raw, mix_raw, DensityMatrix, SquareMatrix, Unitary};

/// The state before any move and after each move (`moves + 1` entries).
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub states: Vec<DensityMatrix>,
}

impl EvolutionTrace {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trace always holds the initial state")
    }

    pub fn diagonals(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(|s| s.diagonal()).collect()
    }
}

/// Evolves a profile. Product-form profiles go through per-move mixture
/// channels; anything with correlated moves is expanded over deterministic
/// profiles.
pub fn evolve(game: &GameSpec, profile: &StrategyProfile) -> Result<EvolutionTrace> {
    profile.check(game)?;
    match (profile.p1.move_channels(game)?, profile.p2.move_channels(game)?) {
        (Some(c1), Some(c2)) => evolve_channels(game, &c1, &c2),
        _ => evolve_expanded(game, profile),
    }
}

/// Exact evolution by averaging the traces of every deterministic profile in
/// the joint support.
pub fn evolve_expanded(game: &GameSpec, profile: &StrategyProfile) -> Result<EvolutionTrace> {
    let b1 = profile.p1.branches(game)?;
    let b2 = profile.p2.branches(game)?;
    let n = game.dim();
    let mut acc = vec![DMatrix::from_element(n, n, Complex64::new(0.0, 0.0)); game.moves().len() + 1];
    for (q1, u1) in &b1 {
        for (q2, u2) in &b2 {
            let w = Complex64::new(q1 * q2, 0.0);
            for (k, state) in deterministic_states(game, u1, u2).into_iter().enumerate() {
                acc[k] += state.inner() * w;
            }
        }
    }
    Ok(EvolutionTrace {
        states: acc
            .into_iter()
            .map(|m| DensityMatrix::new_unchecked(SquareMatrix::from_inner(m)))
            .collect(),
    })
}

/// Evolution with an independent mixture channel at every move. Each player
/// supplies one channel per owned move.
pub fn evolve_channels(
    game: &GameSpec,
    p1: &[Vec<(f64, Unitary)>],
    p2: &[Vec<(f64, Unitary)>],
) -> Result<EvolutionTrace> {
    if p1.len() != game.move_count(Player::P1) || p2.len() != game.move_count(Player::P2) {
        return invalid("one channel per owned move is required");
    }
    let slots = game.slot_of_move();
    let mut state = DensityMatrix::basis(game.dim(), game.initial()).matrix().clone();
    let mut states = vec![DensityMatrix::new_unchecked(state.clone())];
    for (k, player) in game.moves().iter().enumerate() {
        let channel = match player {
            Player::P1 => &p1[slots[k]],
            Player::P2 => &p2[slots[k]],
        };
        if channel.is_empty() {
            return invalid("empty channel");
        }
        state = mix_raw(channel, &state);
        states.push(DensityMatrix::new_unchecked(state.clone()));
    }
    Ok(EvolutionTrace { states })
}

fn deterministic_states(game: &GameSpec, u1: &[Unitary], u2: &[Unitary]) -> Vec<SquareMatrix> {
    let slots = game.slot_of_move();
    let mut state = DensityMatrix::basis(game.dim(), game.initial()).matrix().clone();
    let mut out = Vec::with_capacity(game.moves().len() + 1);
    out.push(state.clone());
    for (k, player) in game.moves().iter().enumerate() {
        let u = match player {
            Player::P1 => &u1[slots[k]],
            Player::P2 => &u2[slots[k]],
        };
        state = conjugate_raw(u.matrix(), &state);
        out.push(state.clone());
    }
    out
}

/// Payoff to `player` read off the final diagonal.
pub fn expected_payoff(game: &GameSpec, profile: &StrategyProfile, player: Player) -> Result<f64> {
    let trace = evolve(game, profile)?;
    Ok(payoff_of_state(game, trace.final_state(), player))
}

pub fn payoff_of_state(game: &GameSpec, state: &DensityMatrix, player: Player) -> f64 {
    let p1: f64 = state
        .diagonal()
        .iter()
        .zip(game.payoffs_p1())
        .map(|(d, v)| d * v)
        .sum();
    player.sign() * p1
}

/// Payoff to player 1 of one deterministic branch pair.
pub(crate) fn branch_payoff(game: &GameSpec, u1: &[Unitary], u2: &[Unitary]) -> f64 {
    let last = deterministic_states(game, u1, u2).pop().expect("non-empty");
    last.diagonal().iter().zip(game.payoffs_p1()).map(|(d, v)| d * v).sum()
}

/// Payoff to player 1 over the joint expansion of two branch sets.
pub fn branches_payoff(game: &GameSpec, b1: &[Branch], b2: &[Branch]) -> f64 {
    let mut total = 0.0;
    for (q1, u1) in b1 {
        for (q2, u2) in b2 {
            total += q1 * q2 * branch_payoff(game, u1, u2);
        }
    }
    total
}

/// Payoff matrix to player 1 indexed by both players' pure strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategicForm {
    pub rows: Vec<PureClassicalStrategy>,
    pub cols: Vec<PureClassicalStrategy>,
    pub values: Vec<Vec<f64>>,
}

pub fn strategic_form(game: &GameSpec) -> StrategicForm {
    let rows = enumerate_pure(game, Player::P1);
    let cols = enumerate_pure(game, Player::P2);
    let row_us: Vec<Vec<Unitary>> = rows.iter().map(|s| s.unitaries(game).unwrap()).collect();
    let col_us: Vec<Vec<Unitary>> = cols.iter().map(|s| s.unitaries(game).unwrap()).collect();
    let values = row_us
        .iter()
        .map(|r| col_us.iter().map(|c| branch_payoff(game, r, c)).collect())
        .collect();
    StrategicForm { rows, cols, values }
}

impl StrategicForm {
    pub fn profile(&self, i: usize, j: usize) -> StrategyProfile {
        StrategyProfile::new(
            Strategy::Pure(self.rows[i].clone()),
            Strategy::Pure(self.cols[j].clone()),
        )
        .expect("rows belong to P1 and columns to P2")
    }

    /// Header row of column labels, then one line per row strategy; values
    /// use 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let label = |s: &PureClassicalStrategy| {
            let l = s.label();
            if l.is_empty() { "-".to_string() } else { l }
        };
        out.push_str("P1\\P2");
        for c in &self.cols {
            out.push(',');
            out.push_str(&label(c));
        }
        out.push('\n');
        for (r, row) in self.rows.iter().zip(&self.values) {
            out.push_str(&label(r));
            for v in row {
                out.push(',');
                out.push_str(&format_significant(*v, 12));
            }
            out.push('\n');
        }
        out
    }
}

/// `%.{digits}g`-style formatting.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{load_game, PureClassicalStrategy as Pure};
    use crate::matrix::{conjugate, make_u, UnitParams};
    use crate::pennyflip::{self, PICARD, Q};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pure(owner: Player, names: &[&str]) -> Strategy {
        Strategy::Pure(Pure::from_names(owner, names))
    }

    #[test]
    fn first_state_after_u_ab() {
        let g = pennyflip::game();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let u = make_u(UnitParams::random(&mut rng));
            let q = Strategy::Quantum(crate::game::QuantumStrategy::new(
                Q,
                vec![u.clone(), Unitary::identity(2)],
            ));
            let profile = StrategyProfile::new(Strategy::Mixed(pennyflip::picard_flip(0.3)), q).unwrap();
            let trace = evolve(&g, &profile).unwrap();
            let expect = conjugate(&u, &DensityMatrix::basis(2, 0)).unwrap();
            assert!(trace.states[1].matrix().max_abs_diff(expect.matrix()) < 1e-14);
        }
    }

    #[test]
    fn hadamard_pair_returns_head() {
        let g = pennyflip::game();
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let profile = StrategyProfile::new(
                Strategy::Mixed(pennyflip::picard_flip(p)),
                Strategy::Quantum(pennyflip::q_hadamard_pair()),
            )
            .unwrap();
            let trace = evolve(&g, &profile).unwrap();
            assert!(trace.final_state().matrix().max_abs_diff(DensityMatrix::basis(2, 0).matrix()) < 1e-12);
            assert!((expected_payoff(&g, &profile, PICARD).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_no_flip_stays_head() {
        let g = pennyflip::game();
        let profile = StrategyProfile::new(pure(PICARD, &["N"]), pure(Q, &["N", "N"])).unwrap();
        assert_eq!(*evolve(&g, &profile).unwrap().final_state(), DensityMatrix::basis(2, 0));
    }

    #[test]
    fn payoff_examples() {
        let g = pennyflip::game();
        let p = StrategyProfile::new(pure(PICARD, &["N"]), pure(Q, &["N", "F"])).unwrap();
        assert_eq!(expected_payoff(&g, &p, PICARD).unwrap(), 1.0);
        assert_eq!(expected_payoff(&g, &p, Q).unwrap(), -1.0);
        let p = StrategyProfile::new(
            Strategy::Mixed(pennyflip::picard_flip(0.5)),
            Strategy::Mixed(pennyflip::q_uniform()),
        )
        .unwrap();
        assert!(expected_payoff(&g, &p, PICARD).unwrap().abs() < 1e-15);
    }

    #[test]
    fn pennyflip_strategic_form() {
        let form = strategic_form(&pennyflip::game());
        assert_eq!(form.values, vec![vec![-1.0, 1.0, 1.0, -1.0], vec![1.0, -1.0, -1.0, 1.0]]);
        assert_eq!(form.to_csv(), "P1\\P2,NN,NF,FN,FF\nN,-1,1,1,-1\nF,1,-1,-1,1\n");
    }

    #[test]
    fn identity_only_alphabet_is_constant() {
        let mut actions = indexmap::IndexMap::new();
        actions.insert("I".to_string(), Unitary::identity(3));
        let g = GameSpec::new(
            vec!["a".into(), "b".into(), "c".into()],
            1,
            vec![Player::P1, Player::P2, Player::P1],
            actions,
            vec![3.0, -2.0, 7.0],
        )
        .unwrap();
        let form = strategic_form(&g);
        assert!(form.values.iter().flatten().all(|&v| v == -2.0));
    }

    #[test]
    fn cyclic_fixture_matches_index_tracking() {
        let doc = r#"{"basis":["A","B","C"],"initial":"A","moves":["P1","P2","P2","P1"],
            "actions":{"stay":[[1,0,0],[0,1,0],[0,0,1]],"shift":[[0,0,1],[1,0,0],[0,1,0]],
            "swap":[[0,1,0],[1,0,0],[0,0,1]]},"payoffs_p1":{"A":1,"B":-1,"C":0.5}}"#;
        let g = load_game(doc).unwrap();
        let form = strategic_form(&g);
        // Oracle: follow the basis index through each permutation column.
        let step = |name: &str, i: usize| -> usize {
            let u = g.action(name).unwrap().matrix();
            (0..3).find(|&r| u.get(r, i).re == 1.0).unwrap()
        };
        for (r, row) in form.rows.iter().enumerate() {
            for (c, col) in form.cols.iter().enumerate() {
                let (mut i1, mut i2) = (0, 0);
                let mut state = g.initial();
                for player in g.moves() {
                    let name = match player {
                        Player::P1 => { i1 += 1; &row.actions[i1 - 1] }
                        Player::P2 => { i2 += 1; &col.actions[i2 - 1] }
                    };
                    state = step(name, state);
                }
                assert!((form.values[r][c] - g.payoffs_p1()[state]).abs() < 1e-12);
            }
        }
        assert_eq!(form.rows.len(), 9);
        assert_eq!(form.cols.len(), 9);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(-1.0, 12), "-1");
        assert_eq!(format_significant(0.5, 12), "0.5");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(123456.789, 12), "123456.789");
        assert_eq!(format_significant(1e-7, 12), "1e-07");
        assert_eq!(format_significant(2.5e15, 12), "2.5e+15");
    }
}
