//! Game definitions and the four strategy classes.
//!
//! A game is a fixed sequence of blind moves on a finite basis. Player 1 owns
//! the payoff vector; player 2 receives its negation. A strategy assigns one
//! action to every move the owner controls, with no conditioning on history.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use crate::error::{invalid, GameError, Result};
use crate::matrix::{check_distribution, SquareMatrix, Unitary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    /// Sign applied to player 1's payoff to get this player's payoff.
    pub fn sign(self) -> f64 {
        match self {
            Player::P1 => 1.0,
            Player::P2 => -1.0,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::P1 => f.write_str("P1"),
            Player::P2 => f.write_str("P2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    basis: Vec<String>,
    initial: usize,
    moves: Vec<Player>,
    actions: IndexMap<String, Unitary>,
    payoffs_p1: Vec<f64>,
}

impl GameSpec {
    pub fn new(
        basis: Vec<String>,
        initial: usize,
        moves: Vec<Player>,
        actions: IndexMap<String, Unitary>,
        payoffs_p1: Vec<f64>,
    ) -> Result<Self> {
        let fail = |m: String| Err(GameError::Validation(m));
        if basis.is_empty() {
            return fail("basis must contain at least one state".into());
        }
        for (i, label) in basis.iter().enumerate() {
            if basis[..i].contains(label) {
                return fail(format!("duplicate basis label {label:?}"));
            }
        }
        if initial >= basis.len() {
            return fail(format!("initial state index {initial} out of range"));
        }
        if actions.is_empty() {
            return fail("at least one classical action is required".into());
        }
        for (name, u) in &actions {
            if u.dim() != basis.len() {
                return fail(format!(
                    "action {name:?} has dimension {} but the basis has {} states",
                    u.dim(),
                    basis.len()
                ));
            }
            if !u.is_permutation() {
                return fail(format!("action {name:?} is not a permutation matrix"));
            }
        }
        if payoffs_p1.len() != basis.len() {
            return fail(format!(
                "expected {} payoffs, got {}",
                basis.len(),
                payoffs_p1.len()
            ));
        }
        if payoffs_p1.iter().any(|x| !x.is_finite()) {
            return fail("payoffs must be finite".into());
        }
        Ok(Self { basis, initial, moves, actions, payoffs_p1 })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn moves(&self) -> &[Player] {
        &self.moves
    }

    pub fn actions(&self) -> &IndexMap<String, Unitary> {
        &self.actions
    }

    pub fn action(&self, name: &str) -> Option<&Unitary> {
        self.actions.get(name)
    }

    pub fn payoffs_p1(&self) -> &[f64] {
        &self.payoffs_p1
    }

    /// Payoff vector as seen by `player`.
    pub fn payoffs(&self, player: Player) -> Vec<f64> {
        self.payoffs_p1.iter().map(|x| player.sign() * x).collect()
    }

    pub fn payoff_range(&self) -> (f64, f64) {
        let lo = self.payoffs_p1.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.payoffs_p1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Indices into `moves()` owned by `player`, in play order.
    pub fn move_indices(&self, player: Player) -> Vec<usize> {
        self.moves
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == player)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn move_count(&self, player: Player) -> usize {
        self.moves.iter().filter(|p| **p == player).count()
    }

    /// For each move, its position among the owner's moves.
    pub(crate) fn slot_of_move(&self) -> Vec<usize> {
        let mut counts = [0usize; 2];
        self.moves
            .iter()
            .map(|p| {
                let c = &mut counts[*p as usize];
                *c += 1;
                *c - 1
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureClassicalStrategy {
    pub owner: Player,
    pub actions: Vec<String>,
}

impl PureClassicalStrategy {
    pub fn new(owner: Player, actions: Vec<String>) -> Self {
        Self { owner, actions }
    }

    pub fn from_names(owner: Player, names: &[&str]) -> Self {
        Self::new(owner, names.iter().map(|s| s.to_string()).collect())
    }

    /// Action names joined: `NF` for single-character names, `a-b` otherwise.
    pub fn label(&self) -> String {
        if self.actions.iter().all(|a| a.chars().count() == 1) {
            self.actions.concat()
        } else {
            self.actions.join("-")
        }
    }

    pub fn check(&self, game: &GameSpec) -> Result<()> {
        let expected = game.move_count(self.owner);
        if self.actions.len() != expected {
            return invalid(format!(
                "{} strategy has {} actions but owns {expected} moves",
                self.owner,
                self.actions.len()
            ));
        }
        if let Some(bad) = self.actions.iter().find(|a| game.action(a).is_none()) {
            return invalid(format!("unknown action {bad:?}"));
        }
        Ok(())
    }

    pub fn unitaries(&self, game: &GameSpec) -> Result<Vec<Unitary>> {
        self.check(game)?;
        Ok(self.actions.iter().map(|a| game.action(a).unwrap().clone()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedClassicalStrategy {
    owner: Player,
    support: Vec<(f64, PureClassicalStrategy)>,
}

impl MixedClassicalStrategy {
    pub fn new(owner: Player, support: Vec<(f64, PureClassicalStrategy)>) -> Result<Self> {
        if support.is_empty() {
            return invalid("mixed strategy needs a non-empty support");
        }
        check_distribution(support.iter().map(|(p, _)| *p))?;
        if support.iter().any(|(_, s)| s.owner != owner) {
            return invalid("all support members must share the owner");
        }
        Ok(Self { owner, support })
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn support(&self) -> &[(f64, PureClassicalStrategy)] {
        &self.support
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    pub owner: Player,
    pub unitaries: Vec<Unitary>,
}

impl QuantumStrategy {
    pub fn new(owner: Player, unitaries: Vec<Unitary>) -> Self {
        Self { owner, unitaries }
    }

    pub fn check(&self, game: &GameSpec) -> Result<()> {
        let expected = game.move_count(self.owner);
        if self.unitaries.len() != expected {
            return invalid(format!(
                "{} quantum strategy has {} unitaries but owns {expected} moves",
                self.owner,
                self.unitaries.len()
            ));
        }
        if self.unitaries.iter().any(|u| u.dim() != game.dim()) {
            return invalid("quantum strategy dimension does not match the game");
        }
        Ok(())
    }

    pub fn same_action(&self, other: &QuantumStrategy, tol: f64) -> bool {
        self.unitaries.len() == other.unitaries.len()
            && self.unitaries.iter().zip(&other.unitaries).all(|(a, b)| a.same_action(b, tol))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedQuantumStrategy {
    owner: Player,
    support: Vec<(f64, QuantumStrategy)>,
}

impl MixedQuantumStrategy {
    pub fn new(owner: Player, support: Vec<(f64, QuantumStrategy)>) -> Result<Self> {
        if support.is_empty() {
            return invalid("mixed quantum strategy needs a non-empty support");
        }
        check_distribution(support.iter().map(|(p, _)| *p))?;
        if support.iter().any(|(_, s)| s.owner != owner) {
            return invalid("all support members must share the owner");
        }
        Ok(Self { owner, support })
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn support(&self) -> &[(f64, QuantumStrategy)] {
        &self.support
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Pure(PureClassicalStrategy),
    Mixed(MixedClassicalStrategy),
    Quantum(QuantumStrategy),
    MixedQuantum(MixedQuantumStrategy),
}

/// One deterministic realization of a strategy: a unitary per owned move.
pub type Branch = (f64, Vec<Unitary>);

impl Strategy {
    pub fn owner(&self) -> Player {
        match self {
            Strategy::Pure(s) => s.owner,
            Strategy::Mixed(s) => s.owner,
            Strategy::Quantum(s) => s.owner,
            Strategy::MixedQuantum(s) => s.owner,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Strategy::Pure(_) => "pure",
            Strategy::Mixed(_) => "mixed",
            Strategy::Quantum(_) => "quantum",
            Strategy::MixedQuantum(_) => "mixed-quantum",
        }
    }

    pub fn is_classical(&self) -> bool {
        matches!(self, Strategy::Pure(_) | Strategy::Mixed(_))
    }

    pub fn check(&self, game: &GameSpec) -> Result<()> {
        match self {
            Strategy::Pure(s) => s.check(game),
            Strategy::Quantum(s) => s.check(game),
            Strategy::Mixed(m) => m.support.iter().try_for_each(|(_, s)| s.check(game)),
            Strategy::MixedQuantum(m) => m.support.iter().try_for_each(|(_, s)| s.check(game)),
        }
    }

    /// Expands into weighted deterministic unitary sequences. Zero-weight
    /// members are dropped.
    pub fn branches(&self, game: &GameSpec) -> Result<Vec<Branch>> {
        self.check(game)?;
        Ok(match self {
            Strategy::Pure(s) => vec![(1.0, s.unitaries(game)?)],
            Strategy::Quantum(s) => vec![(1.0, s.unitaries.clone())],
            Strategy::Mixed(m) => m
                .support
                .iter()
                .filter(|(p, _)| *p > 0.0)
                .map(|(p, s)| Ok((*p, s.unitaries(game)?)))
                .collect::<Result<_>>()?,
            Strategy::MixedQuantum(m) => m
                .support
                .iter()
                .filter(|(p, _)| *p > 0.0)
                .map(|(p, s)| (*p, s.unitaries.clone()))
                .collect(),
        })
    }

    /// Per-move mixture channels when the strategy randomizes independently
    /// at each move; `None` if its moves are correlated.
    pub fn move_channels(&self, game: &GameSpec) -> Result<Option<Vec<Vec<(f64, Unitary)>>>> {
        self.check(game)?;
        match self {
            Strategy::Pure(_) | Strategy::Quantum(_) => {
                let (_, us) = self.branches(game)?.remove(0);
                Ok(Some(us.into_iter().map(|u| vec![(1.0, u)]).collect()))
            }
            Strategy::Mixed(m) => Ok(m.behavioral_marginals().map(|marginals| {
                marginals
                    .into_iter()
                    .map(|dist| {
                        dist.into_iter()
                            .map(|(name, p)| (p, game.action(&name).unwrap().clone()))
                            .collect()
                    })
                    .collect()
            })),
            Strategy::MixedQuantum(m) if m.support.len() == 1 => Ok(Some(
                m.support[0].1.unitaries.iter().map(|u| vec![(1.0, u.clone())]).collect(),
            )),
            Strategy::MixedQuantum(_) => Ok(None),
        }
    }
}

impl MixedClassicalStrategy {
    /// Per-move marginals, if the joint distribution is exactly their product
    /// (within 1e-12 per sequence).
    pub fn behavioral_marginals(&self) -> Option<Vec<Vec<(String, f64)>>> {
        let moves = self.support[0].1.actions.len();
        if self.support.iter().any(|(_, s)| s.actions.len() != moves) {
            return None;
        }
        let mut marginals: Vec<IndexMap<String, f64>> = vec![IndexMap::new(); moves];
        let mut joint: IndexMap<Vec<String>, f64> = IndexMap::new();
        for (p, s) in self.support.iter().filter(|(p, _)| *p > 0.0) {
            for (k, a) in s.actions.iter().enumerate() {
                *marginals[k].entry(a.clone()).or_insert(0.0) += *p;
            }
            *joint.entry(s.actions.clone()).or_insert(0.0) += *p;
        }
        let marginals: Vec<Vec<(String, f64)>> =
            marginals.into_iter().map(|m| m.into_iter().collect()).collect();
        let product = product_distribution(&marginals);
        if product.len() != joint.len() {
            return None;
        }
        for (seq, p) in &product {
            match joint.get(seq) {
                Some(q) if (p - q).abs() <= 1e-12 => {}
                _ => return None,
            }
        }
        Some(marginals)
    }
}

fn product_distribution(per_move: &[Vec<(String, f64)>]) -> Vec<(Vec<String>, f64)> {
    let mut out: Vec<(Vec<String>, f64)> = vec![(Vec::new(), 1.0)];
    for dist in per_move {
        out = out
            .into_iter()
            .flat_map(|(seq, p)| {
                dist.iter().map(move |(a, q)| {
                    let mut s = seq.clone();
                    s.push(a.clone());
                    (s, p * q)
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    pub p1: Strategy,
    pub p2: Strategy,
}

impl StrategyProfile {
    pub fn new(p1: Strategy, p2: Strategy) -> Result<Self> {
        if p1.owner() != Player::P1 || p2.owner() != Player::P2 {
            return invalid("profile needs a player 1 strategy and a player 2 strategy");
        }
        Ok(Self { p1, p2 })
    }

    pub fn check(&self, game: &GameSpec) -> Result<()> {
        self.p1.check(game)?;
        self.p2.check(game)
    }

    pub fn get(&self, player: Player) -> &Strategy {
        match player {
            Player::P1 => &self.p1,
            Player::P2 => &self.p2,
        }
    }

    /// Builds a profile from one player's strategy and the other's.
    pub fn with(player_strategy: Strategy, opponent: Strategy) -> Result<Self> {
        match player_strategy.owner() {
            Player::P1 => Self::new(player_strategy, opponent),
            Player::P2 => Self::new(opponent, player_strategy),
        }
    }
}

/// Product distribution over action sequences from independent per-move
/// distributions. Zero-probability actions are dropped from the support.
pub fn behavioral_to_mixed(
    owner: Player,
    per_move: &[Vec<(String, f64)>],
) -> Result<MixedClassicalStrategy> {
    for dist in per_move {
        if dist.is_empty() {
            return invalid("each per-move distribution needs at least one action");
        }
        check_distribution(dist.iter().map(|(_, p)| *p))?;
    }
    let trimmed: Vec<Vec<(String, f64)>> = per_move
        .iter()
        .map(|d| d.iter().filter(|(_, p)| *p > 0.0).cloned().collect())
        .collect();
    let support = product_distribution(&trimmed)
        .into_iter()
        .map(|(seq, p)| (p, PureClassicalStrategy::new(owner, seq)))
        .collect();
    MixedClassicalStrategy::new(owner, support)
}

/// Every unconditional action sequence for `owner`, lexicographic in the
/// game's action order with the first move most significant.
pub fn enumerate_pure(game: &GameSpec, owner: Player) -> Vec<PureClassicalStrategy> {
    let names: Vec<&String> = game.actions().keys().collect();
    let moves = game.move_count(owner);
    let mut out = vec![Vec::<String>::new()];
    for _ in 0..moves {
        out = out
            .into_iter()
            .flat_map(|seq| {
                names.iter().map(move |n| {
                    let mut s = seq.clone();
                    s.push((*n).clone());
                    s
                })
            })
            .collect();
    }
    out.into_iter().map(|a| PureClassicalStrategy::new(owner, a)).collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDocument {
    basis: Vec<String>,
    initial: String,
    moves: Vec<Player>,
    actions: IndexMap<String, Vec<Vec<i64>>>,
    payoffs_p1: IndexMap<String, f64>,
}

pub fn load_game(doc: &str) -> Result<GameSpec> {
    let doc: GameDocument =
        serde_json::from_str(doc).map_err(|e| GameError::Parse(e.to_string()))?;
    let fail = |m: String| Err(GameError::Validation(m));
    let dim = doc.basis.len();
    let Some(initial) = doc.basis.iter().position(|b| *b == doc.initial) else {
        return fail(format!("initial state {:?} is not a basis label", doc.initial));
    };
    let mut actions = IndexMap::new();
    for (name, rows) in doc.actions {
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return fail(format!("action {name:?} must be a {dim}x{dim} matrix"));
        }
        if rows.iter().flatten().any(|&x| x != 0 && x != 1) {
            return fail(format!("action {name:?} is not a permutation: entries must be 0 or 1"));
        }
        let real: Vec<Vec<f64>> =
            rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let m = SquareMatrix::from_real_rows(&real)
            .map_err(|e| GameError::Validation(e.to_string()))?;
        let u = Unitary::new(m)
            .map_err(|_| GameError::Validation(format!("action {name:?} is not a permutation")))?;
        if !u.is_permutation() {
            return fail(format!("action {name:?} is not a permutation"));
        }
        actions.insert(name, u);
    }
    if doc.payoffs_p1.len() != dim {
        return fail(format!("expected {dim} payoffs, got {}", doc.payoffs_p1.len()));
    }
    let mut payoffs = Vec::with_capacity(dim);
    for label in &doc.basis {
        match doc.payoffs_p1.get(label) {
            Some(&x) => payoffs.push(x),
            None => return fail(format!("missing payoff for basis state {label:?}")),
        }
    }
    GameSpec::new(doc.basis, initial, doc.moves, actions, payoffs)
}

pub fn load_game_file(path: impl AsRef<Path>) -> Result<GameSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| GameError::Parse(format!("{}: {e}", path.display())))?;
    load_game(&text)
}

pub fn emit_game(game: &GameSpec) -> String {
    let doc = GameDocument {
        basis: game.basis.clone(),
        initial: game.basis[game.initial].clone(),
        moves: game.moves.clone(),
        actions: game
            .actions
            .iter()
            .map(|(name, u)| {
                let rows = u
                    .matrix()
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(|z| z.re as i64).collect())
                    .collect();
                (name.clone(), rows)
            })
            .collect(),
        payoffs_p1: game
            .basis
            .iter()
            .cloned()
            .zip(game.payoffs_p1.iter().copied())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("game document serializes")
}
