//! Acceptance gate: one test per release criterion. Each test prints a
//! single `criterion N: PASS` line on success (visible with
//! `cargo test --test acceptance -- --nocapture`); a failure shows up as
//! the test's FAIL line.

use std::collections::BTreeMap;
use std::process::Command;

use domineering::board::{BoardDims, Player, Position, Symmetry};
use domineering::outcome::{
    self, generate_landscape, ingest_known_results, OutcomeClass, Provenance,
};
use domineering::search::{brute_force_oracle, solve, MoveOrder, SolveConfig};
use domineering::tt::{ReplacementScheme, TTConfig};
use domineering::DomineeringError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn empty(rows: u16, cols: u16) -> Position {
    Position::empty(BoardDims::new(rows, cols).unwrap())
}

/// Paper-scale table configuration used for the efficiency criterion.
fn big_table_cfg() -> SolveConfig {
    SolveConfig {
        tt: TTConfig::new(26, ReplacementScheme::TwoBig),
        ..SolveConfig::default()
    }
}

#[test]
fn criterion_1_square_board_winners() {
    let expected = [
        (2u16, Player::Vertical),
        (3, Player::Vertical),
        (4, Player::Vertical),
        (5, Player::Horizontal),
        (6, Player::Vertical),
        (7, Player::Vertical),
        (8, Player::Vertical),
    ];
    for (n, want) in expected {
        let report = solve(&empty(n, n), Player::Vertical, SolveConfig::default()).unwrap();
        assert_eq!(report.winner, want, "{n}x{n} winner");
    }
    println!("criterion 1: PASS — square winners 2..8 match with default config");
}

#[test]
fn criterion_2_node_count_efficiency() {
    let on = solve(&empty(8, 8), Player::Vertical, big_table_cfg()).unwrap();
    assert_eq!(on.winner, Player::Vertical);
    assert!(
        on.nodes <= 20_000_000,
        "8x8 with knowledge + TT took {} nodes (> 2e7)",
        on.nodes
    );
    // the knowledge-off run must need more than 10x the nodes; cap it
    // there and accept hitting the cap as proof
    let off_cfg = SolveConfig {
        use_knowledge: false,
        node_limit: Some(on.nodes * 10),
        ..big_table_cfg()
    };
    match solve(&empty(8, 8), Player::Vertical, off_cfg) {
        Err(DomineeringError::NodeLimitExceeded { .. }) => {}
        Ok(off) => panic!(
            "knowledge-off finished in {} nodes, less than 10x the {} with knowledge",
            off.nodes, on.nodes
        ),
        Err(e) => panic!("unexpected error: {e}"),
    }
    println!(
        "criterion 2: PASS — 8x8 in {} nodes (≤ 2e7), knowledge-off exceeds 10x",
        on.nodes
    );
}

#[test]
fn criterion_3_landscape_matches_table() {
    let text = std::fs::read_to_string(table3_path()).unwrap();
    let known = ingest_known_results(&text).unwrap();
    let grid = generate_landscape(6, 6, &BTreeMap::new(), 50_000_000, SolveConfig::default());
    for m in 1..=6u16 {
        for n in 1..=6u16 {
            let dims = BoardDims { rows: m, cols: n };
            let want = known[&dims].class().expect("table block is complete");
            let got = grid.get(m, n).knowledge.class();
            assert_eq!(got, Some(want), "cell {m}x{n}");
        }
    }
    println!("criterion 3: PASS — generated 6x6 landscape block matches the known table");
}

#[test]
fn criterion_4_oracle_equivalence_sweep() {
    let mut boards = Vec::new();
    for m in 1..=16u16 {
        for n in 1..=16u16 {
            if m * n <= 16 {
                boards.push((m, n));
            }
        }
    }
    let mut checked = 0u32;
    for &(m, n) in &boards {
        let pos = empty(m, n);
        for start in [Player::Vertical, Player::Horizontal] {
            let want = brute_force_oracle(&pos, start).unwrap();
            for use_knowledge in [true, false] {
                for (use_tt, scheme) in [
                    (false, ReplacementScheme::Deep),
                    (true, ReplacementScheme::Deep),
                    (true, ReplacementScheme::TwoBig),
                ] {
                    for order in [MoveOrder::RowMajor, MoveOrder::Heuristic] {
                        let cfg = SolveConfig {
                            use_knowledge,
                            use_tt,
                            tt: TTConfig::new(14, scheme),
                            order,
                            ..SolveConfig::default()
                        };
                        let got = solve(&pos, start, cfg).unwrap().winner;
                        assert_eq!(
                            got, want,
                            "{m}x{n} start {start:?} knowledge={use_knowledge} tt={use_tt} {scheme:?} {order:?}"
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    println!("criterion 4: PASS — {checked} config/board/start combinations match the oracle");
}

#[test]
fn criterion_5_translational_rules() {
    let cfg = SolveConfig::default();
    let mut fields = 0u32;
    // horizontal concatenation for heights 1..3, and the vertical dual
    for m in 1..=3u16 {
        let span = 24 / m;
        let mut known = Vec::with_capacity(span as usize + 1);
        known.push(None); // width 0 placeholder
        for w in 1..=span {
            known.push(Some(outcome::outcome_class(BoardDims { rows: m, cols: w }, cfg)));
        }
        for p in 1..span {
            for q in 1..=(span - p) {
                let a = known[p as usize].as_ref().unwrap();
                let b = known[q as usize].as_ref().unwrap();
                let (dims, combined) = outcome::combine_horizontal(
                    BoardDims { rows: m, cols: p },
                    a,
                    BoardDims { rows: m, cols: q },
                    b,
                )
                .unwrap();
                let direct = known[(p + q) as usize].as_ref().unwrap();
                if let Some(w) = combined.when_v_starts {
                    assert_eq!(Some(w), direct.when_v_starts, "{dims} V-start");
                    fields += 1;
                }
                if let Some(w) = combined.when_h_starts {
                    assert_eq!(Some(w), direct.when_h_starts, "{dims} H-start");
                    fields += 1;
                }
                // the vertical dual of the same pair
                let (tdims, tcombined) = outcome::combine_vertical(
                    BoardDims { rows: p, cols: m },
                    &a.transpose_dual(),
                    BoardDims { rows: q, cols: m },
                    &b.transpose_dual(),
                )
                .unwrap();
                assert_eq!(tdims, dims.transposed());
                assert_eq!(tcombined, combined.transpose_dual(), "{tdims} dual");
            }
        }
    }
    assert!(fields > 0, "no combined fields were produced");

    // closure must rediscover the derived wide-board entries from the
    // rest of the table alone
    let text = std::fs::read_to_string(table3_path()).unwrap();
    let mut base = ingest_known_results(&text).unwrap();
    for cols in [21u16, 25, 29, 31] {
        base.remove(&BoardDims { rows: 6, cols }).expect("entry present");
    }
    let grid = generate_landscape(6, 31, &base, 0, cfg);
    for cols in [25u16, 29, 31] {
        let k = &grid.get(6, cols).knowledge;
        assert_eq!(k.class(), Some(OutcomeClass::H), "6x{cols}");
        assert!(
            k.v_prov == Provenance::Rule || k.h_prov == Provenance::Rule,
            "6x{cols} must come from the rules, not the base"
        );
    }
    assert_eq!(grid.get(6, 21).knowledge.label(), "NH", "6x21");
    println!(
        "criterion 5: PASS — {fields} combined fields match direct solves; closure derives 6x25/6x29/6x31=H and 6x21=NH"
    );
}

#[test]
fn criterion_6_duality_and_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0D0E_57AD);
    let cfg = SolveConfig::default();
    for case in 0..200 {
        let rows = rng.gen_range(1..=6u16);
        let cols = rng.gen_range(1..=8u16);
        let density = rng.gen_range(0.0..0.6f64);
        let diagram: String = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| if rng.gen_bool(density) { '#' } else { '.' })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("\n");
        let pos = Position::parse_diagram(&diagram).unwrap();
        let start = if rng.gen_bool(0.5) { Player::Vertical } else { Player::Horizontal };
        let want = solve(&pos, start, cfg).unwrap().winner;
        for sym in Symmetry::ALL {
            let image = pos.transform(sym);
            let got = solve(&image, start, cfg).unwrap().winner;
            assert_eq!(got, want, "case {case} {sym:?}\n{diagram}");
        }
        let dual = solve(&pos.transposed(), start.transposed(), cfg).unwrap().winner;
        assert_eq!(dual, want.transposed(), "case {case} transpose\n{diagram}");
    }
    println!("criterion 6: PASS — 200 random positions invariant under symmetry and transpose duality");
}

#[test]
fn criterion_7_determinism() {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_domineering"))
            .args(["solve", "--rows", "7", "--cols", "7", "--no-cache"])
            .output()
            .unwrap();
        assert!(out.status.success(), "solver exited with {:?}", out.status);
        let text = String::from_utf8(out.stdout).unwrap();
        let winner = text.lines().next().unwrap_or_default().to_string();
        let nodes: u64 = text
            .lines()
            .find_map(|l| l.strip_prefix("nodes: "))
            .and_then(|rest| rest.split_whitespace().next())
            .and_then(|n| n.parse().ok())
            .expect("nodes line present");
        (winner, nodes)
    };
    let (w1, n1) = run();
    let (w2, n2) = run();
    assert_eq!(w1, w2, "winner differs between runs");
    assert_eq!(n1, n2, "node count differs between runs");
    println!("criterion 7: PASS — two 7x7 runs report identical winner and {n1} nodes");
}

fn table3_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/table3.csv")
}
