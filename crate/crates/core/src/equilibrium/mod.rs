//! Equilibrium computation and verification.
//!
//! Classical games are solved exactly by linear programming. Quantum best
//! responses come from coordinate ascent over unitary slots, the mixed
//! quantum game is approximated on a grid with a double-oracle loop, and the
//! constructive quantum results are exposed as `theorem1_lift` and
//! `theorem2_improve`.

pub mod best_response;
pub mod bloch;
pub mod double_oracle;
pub mod lp;
mod maximin;
pub mod mixed_quantum;
pub mod solve;
pub mod theorems;
pub mod verify;

use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, GameError, Result};
use crate::game::{MixedClassicalStrategy, Player, Strategy};
use crate::payoff::StrategicForm;

pub use best_response::{best_response_classical, best_response_quantum, QuantumResponse};
pub use lp::{solve_matrix, MatrixSolution};
pub use mixed_quantum::{approx_mixed_quantum_equilibrium, unitary_grid};
pub use solve::{solve_classes, SolveOutcome};
pub use theorems::{theorem1_lift, theorem2_improve, LiftedStrategy};
pub use verify::verify_equilibrium;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviationClass {
    Pure,
    MixedClassical,
    Quantum,
    MixedQuantum,
}

impl DeviationClass {
    pub fn is_quantum(self) -> bool {
        matches!(self, DeviationClass::Quantum | DeviationClass::MixedQuantum)
    }

    pub fn allows_mixing(self) -> bool {
        matches!(self, DeviationClass::MixedClassical | DeviationClass::MixedQuantum)
    }
}

impl FromStr for DeviationClass {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(DeviationClass::Pure),
            "mixed" | "mixed-classical" => Ok(DeviationClass::MixedClassical),
            "quantum" => Ok(DeviationClass::Quantum),
            "mixed-quantum" => Ok(DeviationClass::MixedQuantum),
            other => invalid(format!(
                "unknown strategy class {other:?} (expected pure, mixed, quantum or mixed-quantum)"
            )),
        }
    }
}

impl fmt::Display for DeviationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviationClass::Pure => "pure",
            DeviationClass::MixedClassical => "mixed",
            DeviationClass::Quantum => "quantum",
            DeviationClass::MixedQuantum => "mixed-quantum",
        })
    }
}

/// Tolerances and search budgets shared by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Exploitability threshold for declaring an ε-equilibrium.
    pub eps: f64,
    /// Stopping threshold for one coordinate-ascent run.
    pub ascent_tol: f64,
    pub max_sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Double-oracle convergence gap.
    pub oracle_tol: f64,
    pub max_oracle_iters: usize,
    /// Largest number of prefix tuples enumerated exactly in a grid best
    /// response before falling back to coordinate search on the grid.
    pub grid_enumeration_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            ascent_tol: 1e-10,
            max_sweeps: 500,
            restarts: 16,
            seed: 0,
            oracle_tol: 1e-9,
            max_oracle_iters: 400,
            grid_enumeration_cap: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub grid: Option<usize>,
    pub restarts: usize,
    /// Per-round summaries for grid ladders.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rounds: Vec<RoundSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundSummary {
    pub grid: usize,
    pub grid_points: usize,
    pub value: f64,
    pub exploitability_p1: f64,
    pub exploitability_p2: f64,
    pub oracle_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    /// Payoff to player 1.
    pub value: f64,
    pub strategy_p1: Strategy,
    pub strategy_p2: Strategy,
    pub exploitability_p1: f64,
    pub exploitability_p2: f64,
    pub method: String,
    pub diagnostics: Diagnostics,
    pub seed: u64,
}

impl EquilibriumReport {
    pub fn exploitability(&self, player: Player) -> f64 {
        match player {
            Player::P1 => self.exploitability_p1,
            Player::P2 => self.exploitability_p2,
        }
    }

    pub fn is_equilibrium(&self, eps: f64) -> bool {
        self.exploitability_p1 <= eps && self.exploitability_p2 <= eps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationCertificate {
    pub deviator: Player,
    /// Deviator's payoff before the change.
    pub original_payoff: f64,
    /// Deviator's payoff after the change.
    pub improved_payoff: f64,
    pub deviation: Strategy,
}

/// Exact minimax solution of a strategic form, with both mixtures and their
/// duality-gap exploitabilities.
pub fn solve_zero_sum(form: &StrategicForm) -> Result<EquilibriumReport> {
    let sol = solve_matrix(&form.values)?;
    let mix = |owner: Player, probs: &[f64], pures: &[crate::game::PureClassicalStrategy]| {
        let support = probs
            .iter()
            .zip(pures)
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, s)| (*p, s.clone()))
            .collect();
        MixedClassicalStrategy::new(owner, support).map(Strategy::Mixed)
    };
    let current: f64 = sol
        .row
        .iter()
        .zip(&form.values)
        .map(|(x, row)| x * row.iter().zip(&sol.col).map(|(a, y)| a * y).sum::<f64>())
        .sum();
    Ok(EquilibriumReport {
        value: sol.value,
        strategy_p1: mix(Player::P1, &sol.row, &form.rows)?,
        strategy_p2: mix(Player::P2, &sol.col, &form.cols)?,
        exploitability_p1: (sol.col_guarantee - current).max(0.0),
        exploitability_p2: (current - sol.row_guarantee).max(0.0),
        method: "simplex".into(),
        diagnostics: Diagnostics { iterations: sol.pivots, ..Diagnostics::default() },
        seed: 0,
    })
}
