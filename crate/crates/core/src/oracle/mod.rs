//! Ground truth: exact solver for 3×3 Hex and the Baird counterexample.

pub mod baird;
mod solver;

pub use baird::{run_baird, BairdAlgorithm, BairdPoint};
pub use solver::{
    grid_string, score_position, solve, solved_dump, tabular_value_iteration, to_move_wins, SolveOutcome, SolveResult,
    ValueIteration,
};
