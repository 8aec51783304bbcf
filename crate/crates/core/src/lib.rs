//! Finite sequential two-player zero-sum games whose state is a density
//! matrix.
//!
//! Players move in a fixed order by conjugating the state with a unitary.
//! Classical players are restricted to the game's permutation actions and may
//! randomize over them; quantum players pick any unitary per move, and mixed
//! quantum players randomize over such sequences. The built-in [`pennyflip`]
//! game is the standard example of a quantum player beating a classical one.

pub mod equilibrium;
pub mod error;
pub mod game;
pub mod matrix;
pub mod payoff;
pub mod pennyflip;
pub mod report;

pub use error::{GameError, Result};
pub use game::{
    behavioral_to_mixed, emit_game, enumerate_pure, load_game, load_game_file, GameSpec, MixedClassicalStrategy,
    MixedQuantumStrategy, Player, PureClassicalStrategy, QuantumStrategy, Strategy, StrategyProfile,
};
pub use matrix::{
    conjugate, hermitian_eig, make_u, mix_channels, off_diagonal_phase, pure_density, DensityMatrix, SquareMatrix,
    UnitParams, Unitary,
};
pub use payoff::{evolve, expected_payoff, strategic_form, EvolutionTrace, StrategicForm};
