//! Othello rules, exact search and the frontier proof pipeline for weakly
//! solving small and full-size boards.

pub mod board;
pub mod bounds;
pub mod eval;
pub mod frontier;
pub mod gen;
pub mod jobs;
pub mod player;
pub mod search;
pub mod store;
pub mod symmetry;

pub use board::{Color, Move, Position, Score, Square};
pub use bounds::SolveBounds;
