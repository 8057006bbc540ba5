//! Cross-configuration and transformation invariants.
//!
//! The solver's answer is a property of the game, so it must not depend
//! on which accelerations are enabled, and the static bounds must
//! transform the way the board does.

use domineering::board::{BoardDims, Player, Position, Symmetry};
use domineering::knowledge;
use domineering::search::{solve, MoveOrder, SolveConfig};
use domineering::tt::{ReplacementScheme, TTConfig};
use proptest::prelude::*;

fn empty(rows: u16, cols: u16) -> Position {
    Position::empty(BoardDims::new(rows, cols).unwrap())
}

/// Every toggle combination that finishes in reasonable time on the
/// given board size. Knowledge-off runs explode without a transposition
/// table, so the brute-force corner of the matrix is exercised on small
/// boards only (see the oracle sweep in the acceptance tests).
fn configs(include_knowledge_off: bool) -> Vec<SolveConfig> {
    let mut out = Vec::new();
    let knowledge_choices: &[bool] = if include_knowledge_off { &[true, false] } else { &[true] };
    for &use_knowledge in knowledge_choices {
        for (use_tt, scheme) in [
            (false, ReplacementScheme::Deep),
            (true, ReplacementScheme::Deep),
            (true, ReplacementScheme::TwoBig),
        ] {
            if !use_knowledge && !use_tt {
                continue; // no acceleration at all: feasible only below 6x6
            }
            for order in [MoveOrder::RowMajor, MoveOrder::Heuristic] {
                out.push(SolveConfig {
                    use_knowledge,
                    use_tt,
                    tt: TTConfig::new(20, scheme),
                    order,
                    ..SolveConfig::default()
                });
            }
        }
    }
    out
}

#[test]
fn toggles_agree_on_6x6() {
    let pos = empty(6, 6);
    for start in [Player::Vertical, Player::Horizontal] {
        let winners: Vec<Player> = configs(true)
            .into_iter()
            .map(|cfg| solve(&pos, start, cfg).unwrap().winner)
            .collect();
        assert!(
            winners.iter().all(|&w| w == winners[0]),
            "6x6 start {start:?}: winners disagree: {winners:?}"
        );
    }
}

#[test]
fn toggles_agree_on_7x7() {
    let pos = empty(7, 7);
    for start in [Player::Vertical, Player::Horizontal] {
        let winners: Vec<Player> = configs(false)
            .into_iter()
            .map(|cfg| solve(&pos, start, cfg).unwrap().winner)
            .collect();
        assert!(
            winners.iter().all(|&w| w == winners[0]),
            "7x7 start {start:?}: winners disagree: {winners:?}"
        );
    }
}

/// Random diagrams up to 5x6 as strategy input.
fn diagram_strategy() -> impl Strategy<Value = String> {
    (1usize..=5, 1usize..=6).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(proptest::bool::weighted(0.3), rows * cols).prop_map(
            move |cells| {
                cells
                    .chunks(cols)
                    .map(|row| row.iter().map(|&b| if b { '#' } else { '.' }).collect::<String>())
                    .collect::<Vec<_>>()
                    .join("\n")
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn safe_lower_never_exceeds_real_upper(diagram in diagram_strategy()) {
        let pos = Position::parse_diagram(&diagram).unwrap();
        let b = knowledge::bounds(&pos);
        prop_assert!(b.safe_lower_v <= b.real_upper_v, "{diagram}");
        prop_assert!(b.safe_lower_h <= b.real_upper_h, "{diagram}");
    }

    #[test]
    fn bounds_invariant_under_symmetry(diagram in diagram_strategy()) {
        let pos = Position::parse_diagram(&diagram).unwrap();
        let b = knowledge::bounds(&pos);
        for sym in Symmetry::ALL {
            prop_assert_eq!(knowledge::bounds(&pos.transform(sym)), b, "{:?}\n{}", sym, &diagram);
        }
    }

    #[test]
    fn bounds_swap_under_transposition(diagram in diagram_strategy()) {
        let pos = Position::parse_diagram(&diagram).unwrap();
        let b = knowledge::bounds(&pos);
        let t = knowledge::bounds(&pos.transposed());
        prop_assert_eq!(b.safe_lower_v, t.safe_lower_h, "{}", &diagram);
        prop_assert_eq!(b.real_upper_v, t.real_upper_h, "{}", &diagram);
        prop_assert_eq!(b.damage_v, t.damage_h, "{}", &diagram);
        prop_assert_eq!(b.safe_lower_h, t.safe_lower_v, "{}", &diagram);
        prop_assert_eq!(b.real_upper_h, t.real_upper_v, "{}", &diagram);
        prop_assert_eq!(b.damage_h, t.damage_v, "{}", &diagram);
    }
}
