//! Boolean negamax solver.
//!
//! Values are win/loss only, so alpha-beta degenerates to short-circuit
//! minimax: a node is a win for the mover iff some child is a loss for
//! the opponent. Per node, cheapest checks run first: static verdict,
//! then transposition-table probe, then move generation.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use crate::board::{CellSet, Move, Player, Position, Symmetry};
use crate::error::DomineeringError;
use crate::knowledge::{self, KnowledgeBounds, StaticVerdict};
use crate::tt::{TTConfig, TranspositionTable, ZobristBasis, DEFAULT_SEED};

/// Move-ordering mode.
#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MoveOrder {
    RowMajor,
    Heuristic,
}

/// Feature toggles for one solve. Brute force is knowledge off; the
/// knowledge-intensive configuration is everything on.
#[derive(Copy, Clone, Debug)]
pub struct SolveConfig {
    pub use_knowledge: bool,
    pub use_tt: bool,
    pub tt: TTConfig,
    pub node_limit: Option<u64>,
    pub order: MoveOrder,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            use_knowledge: true,
            use_tt: true,
            tt: TTConfig::default(),
            node_limit: None,
            order: MoveOrder::Heuristic,
            seed: DEFAULT_SEED,
        }
    }
}

/// Result of a completed solve. `nodes` counts every visited node,
/// the root included, so a statically closed root reports 1.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub winner: Player,
    pub nodes: u64,
    pub elapsed: Duration,
    pub tt_hits: u64,
    pub static_cutoffs: u64,
}

/// One candidate move with its child position and the child's bounds.
/// Bounds are computed once here and handed to the recursive call so the
/// child's static verdict costs nothing extra.
struct Candidate {
    mv: Move,
    child: Position,
    bounds: KnowledgeBounds,
    /// Child's split hash (base, net), once some step here computed it;
    /// handed to the recursive call so the child does not hash again.
    key: Option<(u64, i32)>,
    /// Set when a table probe already proved this move loses.
    refuted: bool,
}

struct Solver {
    cfg: SolveConfig,
    basis: ZobristBasis,
    tt: Option<TranspositionTable>,
    nodes: u64,
    tt_hits: u64,
    static_cutoffs: u64,
}

impl Solver {
    fn new(cfg: SolveConfig) -> Solver {
        Solver {
            basis: ZobristBasis::new(cfg.seed),
            tt: cfg.use_tt.then(|| TranspositionTable::new(cfg.tt)),
            cfg,
            nodes: 0,
            tt_hits: 0,
            static_cutoffs: 0,
        }
    }

    /// Does the player to move win `pos`? `pre` carries the position's
    /// bounds when the parent already computed them.
    fn search(
        &mut self,
        pos: &Position,
        mover: Player,
        pre: Option<&KnowledgeBounds>,
        pre_key: Option<(u64, i32)>,
    ) -> Result<bool, DomineeringError> {
        self.nodes += 1;
        if let Some(limit) = self.cfg.node_limit {
            if self.nodes > limit {
                return Err(DomineeringError::NodeLimitExceeded { limit });
            }
        }
        let entry_nodes = self.nodes;

        if self.cfg.use_knowledge {
            let computed;
            let b = match pre {
                Some(b) => b,
                None => {
                    computed = knowledge::bounds(pos);
                    &computed
                }
            };
            match knowledge::verdict_component(pos, b, mover) {
                StaticVerdict::MoverWins => {
                    self.static_cutoffs += 1;
                    return Ok(true);
                }
                StaticVerdict::MoverLoses => {
                    self.static_cutoffs += 1;
                    return Ok(false);
                }
                StaticVerdict::Unknown => {}
            }
        }

        let key = self
            .tt
            .is_some()
            .then(|| pre_key.unwrap_or_else(|| self.basis.hash_base(pos, mover)));
        if let Some((base, net)) = key {
            if let Some(winner) = self.probe(base, net) {
                return Ok(winner == mover);
            }
        }

        let moves = pos.legal_moves(mover);
        if moves.is_empty() {
            return Ok(false);
        }
        let moves = dedupe_symmetric(pos, moves);

        let opponent = mover.opponent();
        let need_bounds = self.cfg.use_knowledge || self.cfg.order == MoveOrder::Heuristic;
        let mut mover_wins = false;
        let mut candidates: Vec<Candidate> = Vec::with_capacity(moves.len());
        for mv in moves {
            let child = pos.apply_move(mv).expect("move was legal");
            let bounds = if need_bounds {
                knowledge::bounds(&child)
            } else {
                KnowledgeBounds { safe_lower_v: 0, safe_lower_h: 0, real_upper_v: 0, real_upper_h: 0, damage_v: 0, damage_h: 0 }
            };
            if self.cfg.use_knowledge {
                // one-ply application of the static verdict: a child the
                // opponent statically loses proves this node won without
                // visiting it, and a child the opponent statically wins
                // is a refuted move not worth queueing.
                match knowledge::verdict_component(&child, &bounds, opponent) {
                    StaticVerdict::MoverLoses => {
                        self.static_cutoffs += 1;
                        mover_wins = true;
                        break;
                    }
                    StaticVerdict::MoverWins => {
                        self.static_cutoffs += 1;
                        continue;
                    }
                    StaticVerdict::Unknown => {}
                }
            }
            candidates.push(Candidate { mv, child, bounds, key: None, refuted: false });
        }
        if !mover_wins && self.cfg.order == MoveOrder::Heuristic {
            order_candidates(pos, mover, &mut candidates);
        }
        if !mover_wins && self.tt.is_some() {
            // enhanced transposition cutoff: a child already proven lost
            // for the opponent closes this node without a recursive call,
            // and a child already proven won for the opponent is a
            // refuted move that need not be revisited
            //
            // children with equal shape signatures differ only in their
            // integer reserve net, and the winner is monotone in the net:
            // extra reserve capacity never hurts its owner. The mover
            // only needs the sibling with its most favorable net; the
            // others are dominated (equal nets are the same game).
            let mut best: HashMap<u64, (usize, i32)> = HashMap::with_capacity(candidates.len());
            for i in 0..candidates.len() {
                let (base, net) = self.basis.hash_base(&candidates[i].child, opponent);
                candidates[i].key = Some((base, net));
                match best.entry(base) {
                    Entry::Occupied(mut held) => {
                        let (j, held_net) = *held.get();
                        let better = match mover {
                            Player::Vertical => net > held_net,
                            Player::Horizontal => net < held_net,
                        };
                        if better {
                            candidates[j].refuted = true;
                            held.insert((i, net));
                        } else {
                            candidates[i].refuted = true;
                            continue;
                        }
                    }
                    Entry::Vacant(slot) => {
                        slot.insert((i, net));
                    }
                }
                match self.probe(base, net) {
                    Some(winner) if winner == mover => {
                        mover_wins = true;
                        break;
                    }
                    Some(_) => candidates[i].refuted = true,
                    None => {}
                }
            }
        }
        if !mover_wins
            && self.cfg.use_knowledge
            && std::env::var("TWO_PLY").map(|v| v == "1").unwrap_or(false)
        {
            'cands: for cand in candidates.iter_mut() {
                if cand.refuted {
                    continue;
                }
                let mut all_won = true;
                for reply in cand.child.legal_moves(opponent) {
                    let g = cand.child.apply_move(reply).expect("move was legal");
                    let gb = knowledge::bounds(&g);
                    match knowledge::verdict_component(&g, &gb, mover) {
                        StaticVerdict::MoverWins => {}
                        StaticVerdict::MoverLoses => {
                            cand.refuted = true;
                            all_won = false;
                            break;
                        }
                        StaticVerdict::Unknown => {
                            all_won = false;
                            break;
                        }
                    }
                }
                if all_won {
                    self.static_cutoffs += 1;
                    mover_wins = true;
                    break 'cands;
                }
            }
        }
        if !mover_wins {
            for cand in &candidates {
                if cand.refuted {
                    continue;
                }
                let pre = self.cfg.use_knowledge.then_some(&cand.bounds);
                if !self.search(&cand.child, opponent, pre, cand.key)? {
                    mover_wins = true;
                    break;
                }
            }
        }

        if let (Some(tt), Some((base, net))) = (&mut self.tt, key) {
            let work = (self.nodes - entry_nodes + 1).min(u32::MAX as u64) as u32;
            let winner = if mover_wins { mover } else { mover.opponent() };
            tt.store(ZobristBasis::key_at(base, net), winner, work);
        }
        Ok(mover_wins)
    }

    /// Probe the table entry for the equivalence class (base, net).
    fn probe(&mut self, base: u64, net: i32) -> Option<Player> {
        let entry = self.tt.as_ref()?.probe(ZobristBasis::key_at(base, net))?;
        self.tt_hits += 1;
        Some(entry.result)
    }
}

/// Solve a position to a proven winner under optimal play.
pub fn solve(pos: &Position, to_move: Player, cfg: SolveConfig) -> Result<SolveReport, DomineeringError> {
    let start = Instant::now();
    let mut solver = Solver::new(cfg);
    let mover_wins = solver.search(pos, to_move, None, None)?;
    Ok(SolveReport {
        winner: if mover_wins { to_move } else { to_move.opponent() },
        nodes: solver.nodes,
        elapsed: start.elapsed(),
        tt_hits: solver.tt_hits,
        static_cutoffs: solver.static_cutoffs,
    })
}

/// Drop moves whose child position duplicates an earlier child up to
/// symmetry; the first move in the current order is kept.
///
/// When the parent has no nontrivial automorphism, coincident children
/// are rare enough that the transposition table resolves them at the cost
/// of one probe, so the per-child canonicalization is skipped.
pub fn dedupe_symmetric(pos: &Position, moves: Vec<Move>) -> Vec<Move> {
    let symmetric = Symmetry::ALL[1..].iter().any(|&s| pos.transform(s) == *pos);
    if !symmetric {
        return moves;
    }
    let mut seen: HashSet<CellSet> = HashSet::with_capacity(moves.len());
    moves
        .into_iter()
        .filter(|&mv| {
            let child = pos.apply_move(mv).expect("move was legal");
            seen.insert(child.canonical_occupancy().0)
        })
        .collect()
}

/// Score for move ordering, higher first: the mover's guaranteed move
/// count after the placement (lifted by the capacity the opponent cannot
/// destroy in the worst case, 2 per reply), minus the opponent's move
/// ceiling — the margin the static win rule needs. Maximizing it steers
/// the search toward children the static verdict can close.
fn order_score(cand: &Candidate, mover: Player, opponent: Player) -> i32 {
    let b = &cand.bounds;
    let s_m = b.safe_lower(mover) as i32;
    let r_o = b.real_upper(opponent) as i32;
    let r_m = b.real_upper(mover) as i32;
    s_m.max(r_m - b.damage(opponent) as i32) - r_o
}

/// Sort best score first; ties prefer placements farthest from the board
/// center (edge and corner moves shield their own cells sooner), and the
/// stable sort keeps row-major order inside exact ties.
fn order_candidates(pos: &Position, mover: Player, candidates: &mut [Candidate]) {
    let opponent = mover.opponent();
    let (cr, cc) = (pos.dims().rows as i32 - 1, pos.dims().cols as i32 - 1);
    candidates.sort_by_key(|cand| {
        let d = (2 * cand.mv.row as i32 - cr).abs() + (2 * cand.mv.col as i32 - cc).abs();
        (-order_score(cand, mover, opponent), -d)
    });
}

/// Sort moves so the most forcing placements come first. See
/// `order_score` and `order_candidates` for the ranking.
pub fn order_heuristic(pos: &Position, mover: Player, moves: &mut [Move]) {
    let mut candidates: Vec<Candidate> = moves
        .iter()
        .map(|&mv| {
            let child = pos.apply_move(mv).expect("move was legal");
            let bounds = knowledge::bounds(&child);
            Candidate { mv, child, bounds, key: None, refuted: false }
        })
        .collect();
    order_candidates(pos, mover, &mut candidates);
    for (slot, cand) in moves.iter_mut().zip(candidates) {
        *slot = cand.mv;
    }
}

/// Reorder `moves` per the configured mode.
pub fn order_moves(pos: &Position, player: Player, mut moves: Vec<Move>, order: MoveOrder) -> Vec<Move> {
    if order == MoveOrder::Heuristic {
        order_heuristic(pos, player, &mut moves);
    }
    moves
}

const ORACLE_GUARD: usize = 20;

/// Plain exhaustive negamax: no TT, no knowledge, no symmetry pruning.
/// Ground truth for equivalence tests; refuses large positions.
pub fn brute_force_oracle(pos: &Position, to_move: Player) -> Result<Player, DomineeringError> {
    let empty = pos.empty_cells();
    if empty > ORACLE_GUARD {
        return Err(DomineeringError::OracleGuard {
            empty_cells: empty,
            guard: ORACLE_GUARD,
        });
    }
    fn wins(pos: &Position, mover: Player) -> bool {
        pos.legal_moves(mover)
            .into_iter()
            .any(|mv| !wins(&pos.apply_move(mv).expect("legal"), mover.opponent()))
    }
    Ok(if wins(pos, to_move) { to_move } else { to_move.opponent() })
}
