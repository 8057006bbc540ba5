//! A Domineering solver and outcome-class toolkit.
//!
//! The engine is a boolean negamax searcher with static knowledge
//! cutoffs, symmetry-canonical transposition tables and heuristic move
//! ordering. On top of it, the outcome module computes N/P/V/H outcome
//! classes, combines solved boards through translational symmetry rules
//! and generates landscape tables of known results.

pub mod board;
pub mod cache;
pub mod error;
pub mod knowledge;
pub mod outcome;
pub mod search;
pub mod tt;

pub use board::{BoardDims, Move, Player, Position, Symmetry};
pub use error::DomineeringError;
pub use search::{solve, SolveConfig, SolveReport};
