//! Static bounds and sound static win/loss classification.
//!
//! Two quantities drive the static verdict:
//! - a lower bound on the moves a player can always still make, counted
//!   from protected runs (runs the opponent's orientation can never touch);
//! - an upper bound on the moves a player can make in any continuation,
//!   counted by packing dominoes into every maximal run.

use crate::board::{Player, Position};

/// The four static counts for a position.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeBounds {
    pub safe_lower_v: u32,
    pub safe_lower_h: u32,
    pub real_upper_v: u32,
    pub real_upper_h: u32,
    /// Upper bound on the opponent capacity this player's placements can
    /// ever destroy: per attacker run min(2 * packing, contested cells),
    /// summed, then capped by the victim side's total possible loss
    /// (per victim run min(packing, contested cells), summed).
    pub damage_v: u32,
    pub damage_h: u32,
}

impl KnowledgeBounds {
    pub fn safe_lower(&self, player: Player) -> u32 {
        match player {
            Player::Vertical => self.safe_lower_v,
            Player::Horizontal => self.safe_lower_h,
        }
    }

    pub fn real_upper(&self, player: Player) -> u32 {
        match player {
            Player::Vertical => self.real_upper_v,
            Player::Horizontal => self.real_upper_h,
        }
    }

    pub fn damage(&self, player: Player) -> u32 {
        match player {
            Player::Vertical => self.damage_v,
            Player::Horizontal => self.damage_h,
        }
    }
}

/// Outcome of the static classifier, relative to the player to move.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StaticVerdict {
    MoverWins,
    MoverLoses,
    Unknown,
}

/// Lower bound on moves `player` can always still make: shielded cells
/// (no empty perpendicular neighbor) are immune to opponent placements
/// forever, and a shielded stretch of length L holds floor(L/2) disjoint
/// dominoes.
pub fn safe_moves_lower(pos: &Position, player: Player) -> u32 {
    pos.run_counts(player).0
}

/// Upper bound on moves `player` can still make in any continuation:
/// every future placement lies inside a currently empty maximal run.
pub fn real_moves_upper(pos: &Position, player: Player) -> u32 {
    pos.run_counts(player).1
}

/// All four counts at once. The destruction bounds are capped from both
/// sides: by what the attacker's runs can deal out and by what the
/// victim's runs can possibly lose.
pub fn bounds(pos: &Position) -> KnowledgeBounds {
    let (safe_lower_v, real_upper_v, inflict_v, vulnerable_v) = pos.run_counts(Player::Vertical);
    let (safe_lower_h, real_upper_h, inflict_h, vulnerable_h) = pos.run_counts(Player::Horizontal);
    let damage_v = inflict_v.min(vulnerable_h);
    let damage_h = inflict_h.min(vulnerable_v);
    KnowledgeBounds {
        safe_lower_v,
        safe_lower_h,
        real_upper_v,
        real_upper_h,
        damage_v,
        damage_h,
    }
}

/// Sound static classification of the position for the player to move.
///
/// The mover-wins threshold is `s_m >= r_o + 1`, not `s_m >= r_o`: with
/// equality the mover may be forced to find one more move that is not
/// guaranteed.
pub fn static_verdict(pos: &Position, to_move: Player) -> StaticVerdict {
    verdict_from_bounds(&bounds(pos), to_move)
}

/// `static_verdict` evaluated on already-computed bounds.
pub fn verdict_from_bounds(b: &KnowledgeBounds, to_move: Player) -> StaticVerdict {
    let opponent = to_move.opponent();
    let r_m = b.real_upper(to_move);
    let r_o = b.real_upper(opponent);
    if r_m == 0 {
        return StaticVerdict::MoverLoses;
    }
    if r_o == 0 {
        return StaticVerdict::MoverWins;
    }
    let s_m = b.safe_lower(to_move);
    let s_o = b.safe_lower(opponent);
    if s_m >= r_o + 1 {
        StaticVerdict::MoverWins
    } else if s_o >= r_m {
        StaticVerdict::MoverLoses
    } else {
        StaticVerdict::Unknown
    }
}

/// Stronger sound verdict: besides the protected-run rules, accounts for
/// capacity the opponent cannot destroy in time. An opponent placement
/// lies across the mover's lines, covering one cell in each of two
/// distinct runs, and splitting a run costs at most 1 packing unit, so
/// each placement removes at most 2 of the mover's capacity. Moreover a
/// covered cell only costs capacity if it currently sits in a run of
/// length >= 2 and has an empty perpendicular neighbor, each such cell
/// is covered at most once, the set of such cells only shrinks, and all
/// of a placement's destruction happens inside the single opponent run
/// holding it, so total destruction is bounded per opponent run by
/// min(2 * packing, contested cells), summed over runs.
pub fn static_verdict_strong(pos: &Position, to_move: Player) -> StaticVerdict {
    verdict_strong_from_bounds(&bounds(pos), to_move)
}

/// Strongest verdict: the capacity-minus-damage guarantee evaluated per
/// connected component of the empty area and summed. Components are
/// independent subgames, so the per-component guarantees add, which
/// dominates the whole-board bound of `static_verdict_strong` whenever
/// components with different profiles coexist. `b` must be the bounds of
/// `pos` (passed in so callers that already computed them pay nothing).
pub fn verdict_component(pos: &Position, b: &KnowledgeBounds, to_move: Player) -> StaticVerdict {
    let opponent = to_move.opponent();
    let r_m = b.real_upper(to_move);
    let r_o = b.real_upper(opponent);
    if r_m == 0 {
        return StaticVerdict::MoverLoses;
    }
    if r_o == 0 {
        return StaticVerdict::MoverWins;
    }
    // the component-wise guarantee dominates the whole-board one, so the
    // cheap whole-board verdict short-circuits the flood fill
    let coarse = verdict_strong_from_bounds(b, to_move);
    if coarse != StaticVerdict::Unknown {
        return coarse;
    }
    let (g_v, g_h) = match pos.component_guarantees() {
        Some(g) => g,
        None => return coarse,
    };
    let (g_m, g_o) = match to_move {
        Player::Vertical => (g_v, g_h),
        Player::Horizontal => (g_h, g_v),
    };
    if g_m >= r_o + 1 {
        StaticVerdict::MoverWins
    } else if g_o >= r_m {
        StaticVerdict::MoverLoses
    } else {
        StaticVerdict::Unknown
    }
}

/// `static_verdict_strong` evaluated on already-computed bounds.
pub fn verdict_strong_from_bounds(b: &KnowledgeBounds, to_move: Player) -> StaticVerdict {
    let opponent = to_move.opponent();
    let r_m = b.real_upper(to_move) as i64;
    let r_o = b.real_upper(opponent) as i64;
    if r_m == 0 {
        return StaticVerdict::MoverLoses;
    }
    if r_o == 0 {
        return StaticVerdict::MoverWins;
    }
    let s_m = b.safe_lower(to_move) as i64;
    let s_o = b.safe_lower(opponent) as i64;
    let damage_m = b.damage(opponent) as i64;
    let damage_o = b.damage(to_move) as i64;
    if s_m.max(r_m - damage_m) >= r_o + 1 {
        StaticVerdict::MoverWins
    } else if s_o.max(r_o - damage_o) >= r_m {
        StaticVerdict::MoverLoses
    } else {
        StaticVerdict::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::BoardDims;

    fn empty(r: u16, c: u16) -> Position {
        Position::empty(BoardDims::new(r, c).unwrap())
    }

    #[test]
    fn safe_lower_examples() {
        assert_eq!(safe_moves_lower(&empty(2, 1), Player::Vertical), 1);
        assert_eq!(safe_moves_lower(&empty(2, 2), Player::Vertical), 0);
        let p = Position::parse_diagram(".#.\n.#.\n.#.").unwrap();
        assert_eq!(safe_moves_lower(&p, Player::Vertical), 2);
    }

    #[test]
    fn real_upper_examples() {
        assert_eq!(real_moves_upper(&empty(1, 5), Player::Horizontal), 2);
        assert_eq!(real_moves_upper(&empty(2, 2), Player::Horizontal), 2);
        assert_eq!(real_moves_upper(&empty(1, 1), Player::Vertical), 0);
        assert_eq!(real_moves_upper(&empty(1, 1), Player::Horizontal), 0);
    }

    #[test]
    fn verdict_examples() {
        assert_eq!(static_verdict(&empty(2, 1), Player::Vertical), StaticVerdict::MoverWins);
        assert_eq!(static_verdict(&empty(1, 2), Player::Vertical), StaticVerdict::MoverLoses);
        assert_eq!(static_verdict(&empty(2, 2), Player::Vertical), StaticVerdict::Unknown);
    }

    #[test]
    fn bounds_examples() {
        let b = bounds(&empty(2, 2));
        assert_eq!(b, KnowledgeBounds { safe_lower_v: 0, safe_lower_h: 0, real_upper_v: 2, real_upper_h: 2, damage_v: 2, damage_h: 2 });
        let b = bounds(&empty(2, 1));
        assert_eq!(b, KnowledgeBounds { safe_lower_v: 1, safe_lower_h: 0, real_upper_v: 1, real_upper_h: 0, damage_v: 0, damage_h: 0 });
        let b = bounds(&empty(5, 5));
        assert_eq!((b.safe_lower_v, b.real_upper_v, b.safe_lower_h, b.real_upper_h), (0, 10, 0, 10));
    }

    #[test]
    fn safe_never_exceeds_real() {
        // spot-check on an irregular position
        let p = Position::parse_diagram("#..#.\n.....\n##...\n....#").unwrap();
        for player in [Player::Vertical, Player::Horizontal] {
            assert!(safe_moves_lower(&p, player) <= real_moves_upper(&p, player));
        }
    }
}
