//! Diagnostic: node distribution over the root children of one board.

use domineering::board::{BoardDims, Player, Position};
use domineering::search::{self, dedupe_symmetric, order_moves, MoveOrder, SolveConfig};
use domineering::tt::TTConfig;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let rows: u16 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let cols: u16 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(8);
    let bits: u8 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(26);
    let pos = Position::empty(BoardDims::new(rows, cols).unwrap());
    let mover = Player::Vertical;
    let moves = dedupe_symmetric(&pos, pos.legal_moves(mover));
    let moves = order_moves(&pos, mover, moves, MoveOrder::Heuristic);
    let cfg = SolveConfig {
        tt: TTConfig { index_bits: bits, scheme: domineering::tt::ReplacementScheme::TwoBig },
        ..SolveConfig::default()
    };
    let mut total = 0u64;
    for mv in moves {
        let child = pos.apply_move(mv).unwrap();
        let report = search::solve(&child, mover.opponent(), cfg).unwrap();
        total += report.nodes;
        println!(
            "move ({},{}) -> child winner {:?} nodes {}",
            mv.row, mv.col, report.winner, report.nodes
        );
    }
    println!("total {}", total);
}
