//! Error types shared across the crate.

use crate::board::Move;

#[derive(Debug, thiserror::Error)]
pub enum DomineeringError {
    #[error("capacity error for {rows}x{cols} board: {reason}")]
    Capacity { rows: u16, cols: u16, reason: &'static str },

    #[error("illegal move {mv:?}: {reason}")]
    IllegalMove { mv: Move, reason: &'static str },

    #[error("inconsistent undo of {mv:?}: cells are not occupied")]
    InconsistentUndo { mv: Move },

    #[error("bad position diagram: {0}")]
    Diagram(String),

    #[error("node limit of {limit} exceeded")]
    NodeLimitExceeded { limit: u64 },

    #[error("brute-force oracle refused: {empty_cells} empty cells exceeds guard of {guard}")]
    OracleGuard { empty_cells: usize, guard: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
