//! Command-line front end for the Domineering solver.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Args, Parser, Subcommand, ValueEnum};

use domineering::board::{BoardDims, Player, Position};
use domineering::cache::{self, ConfigFingerprint, ResultRecord, CACHE_ENV_VAR};
use domineering::error::DomineeringError;
use domineering::knowledge;
use domineering::outcome::{self, cell_provenance, OutcomeKnowledge};
use domineering::search::{self, brute_force_oracle, MoveOrder, SolveConfig};
use domineering::tt::{ReplacementScheme, TTConfig, DEFAULT_SEED};

const EXIT_OK: u8 = 0;
const EXIT_PROPERTY_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "domineering", about = "Solve Domineering boards and compute outcome classes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one board and report the winner and node count
    Solve(SolveArgs),
    /// Compute the outcome class of a board (both start players)
    Outcome(OutcomeArgs),
    /// Generate a landscape table of outcome classes
    Landscape(LandscapeArgs),
    /// Run the internal property suites
    Selftest(SelftestArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum PlayerArg {
    V,
    H,
}

impl From<PlayerArg> for Player {
    fn from(p: PlayerArg) -> Player {
        match p {
            PlayerArg::V => Player::Vertical,
            PlayerArg::H => Player::Horizontal,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum SchemeArg {
    Deep,
    Twobig,
}

#[derive(Copy, Clone, ValueEnum)]
enum OrderArg {
    Rowmajor,
    Heuristic,
}

#[derive(Args, Copy, Clone)]
struct EngineArgs {
    /// Transposition table size as log2 of the bucket count
    #[arg(long, default_value_t = 22)]
    tt_bits: u8,
    /// Replacement scheme
    #[arg(long, value_enum, default_value_t = SchemeArg::Deep)]
    tt_scheme: SchemeArg,
    /// Disable static knowledge cutoffs
    #[arg(long)]
    no_knowledge: bool,
    /// Disable the transposition table
    #[arg(long)]
    no_tt: bool,
    /// Move ordering
    #[arg(long, value_enum, default_value_t = OrderArg::Heuristic)]
    order: OrderArg,
    /// Zobrist seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Abort after this many investigated nodes
    #[arg(long)]
    node_limit: Option<u64>,
}

impl EngineArgs {
    fn solve_config(&self) -> Result<SolveConfig, String> {
        if !(10..=30).contains(&self.tt_bits) {
            return Err(format!("--tt-bits must be between 10 and 30, got {}", self.tt_bits));
        }
        let scheme = match self.tt_scheme {
            SchemeArg::Deep => ReplacementScheme::Deep,
            SchemeArg::Twobig => ReplacementScheme::TwoBig,
        };
        Ok(SolveConfig {
            use_knowledge: !self.no_knowledge,
            use_tt: !self.no_tt,
            tt: TTConfig::new(self.tt_bits, scheme),
            node_limit: self.node_limit,
            order: match self.order {
                OrderArg::Rowmajor => MoveOrder::RowMajor,
                OrderArg::Heuristic => MoveOrder::Heuristic,
            },
            seed: self.seed,
        })
    }

    fn fingerprint(&self, cfg: &SolveConfig) -> ConfigFingerprint {
        ConfigFingerprint {
            tt_bits: cfg.tt.index_bits,
            tt_scheme: cfg.tt.scheme,
            knowledge: cfg.use_knowledge,
            tt_enabled: cfg.use_tt,
            ordering: cfg.order,
            seed: cfg.seed,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    rows: u16,
    #[arg(long)]
    cols: u16,
    /// Player to move first (Vertical by convention)
    #[arg(long, value_enum, default_value_t = PlayerArg::V)]
    to_move: PlayerArg,
    #[command(flatten)]
    engine: EngineArgs,
    /// Emit the result as one JSON object
    #[arg(long)]
    json: bool,
    /// Cache file path (also settable via DOMINEERING_CACHE)
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Skip writing the result cache
    #[arg(long)]
    no_cache: bool,
    /// Print the static knowledge bounds of the empty board and exit
    #[arg(long)]
    show_bounds: bool,
}

#[derive(Args)]
struct OutcomeArgs {
    #[arg(long)]
    rows: u16,
    #[arg(long)]
    cols: u16,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct LandscapeArgs {
    #[arg(long, default_value_t = 8)]
    max_m: u16,
    #[arg(long, default_value_t = 8)]
    max_n: u16,
    /// CSV file of known results to ingest (m,n,label)
    #[arg(long)]
    base: Option<PathBuf>,
    /// Node budget per direct solve; 0 disables solving
    #[arg(long, default_value_t = 1_000_000)]
    budget_nodes: u64,
    /// Worker threads for the direct-solve phase
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct SelftestArgs {
    /// Largest board area for the oracle-equivalence sweep
    #[arg(long, default_value_t = 16)]
    area_limit: usize,
    #[command(flatten)]
    engine: EngineArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Outcome(args) => cmd_outcome(args),
        Command::Landscape(args) => cmd_landscape(args),
        Command::Selftest(args) => cmd_selftest(args),
    };
    ExitCode::from(status)
}

fn usage_error(message: &str) -> u8 {
    eprintln!("error: {}", message);
    EXIT_USAGE
}

fn result_digit(winner: Player, starter: Player) -> u8 {
    if winner == starter {
        1
    } else {
        2
    }
}

fn cmd_solve(args: SolveArgs) -> u8 {
    let cfg = match args.engine.solve_config() {
        Ok(cfg) => cfg,
        Err(msg) => return usage_error(&msg),
    };
    let dims = match BoardDims::new(args.rows, args.cols) {
        Ok(d) => d,
        Err(e) => return usage_error(&e.to_string()),
    };
    let pos = Position::empty(dims);
    let to_move: Player = args.to_move.into();

    if args.show_bounds {
        let b = knowledge::bounds(&pos);
        println!(
            "bounds {}: safe_lower_v={} safe_lower_h={} real_upper_v={} real_upper_h={}",
            dims, b.safe_lower_v, b.safe_lower_h, b.real_upper_v, b.real_upper_h
        );
        return EXIT_OK;
    }

    let report = match search::solve(&pos, to_move, cfg) {
        Ok(report) => report,
        Err(DomineeringError::NodeLimitExceeded { limit }) => {
            println!("undecided (node limit {} exceeded)", limit);
            return EXIT_BUDGET;
        }
        Err(e) => return usage_error(&e.to_string()),
    };

    let record = ResultRecord {
        rows: dims.rows,
        cols: dims.cols,
        to_move,
        winner: report.winner,
        nodes: report.nodes,
        elapsed_ms: report.elapsed.as_millis() as u64,
        config: args.engine.fingerprint(&cfg),
        timestamp: SystemTime::now()
            .duration_since(SystemTime::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };

    if args.json {
        println!("{}", serde_json::to_string(&record).expect("record serializes"));
    } else {
        println!("{} ({})", result_digit(report.winner, to_move), report.winner);
        println!(
            "nodes: {}  elapsed: {:.3}s  tt_hits: {}  static_cutoffs: {}",
            report.nodes,
            report.elapsed.as_secs_f64(),
            report.tt_hits,
            report.static_cutoffs
        );
    }

    if !args.no_cache {
        let path = args
            .cache
            .or_else(|| std::env::var_os(CACHE_ENV_VAR).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("domineering-cache.jsonl"));
        if let Err(e) = cache::append_record(&path, &record) {
            eprintln!("warning: failed to write cache {}: {}", path.display(), e);
        }
    }
    EXIT_OK
}

fn cmd_outcome(args: OutcomeArgs) -> u8 {
    let cfg = match args.engine.solve_config() {
        Ok(cfg) => cfg,
        Err(msg) => return usage_error(&msg),
    };
    let dims = match BoardDims::new(args.rows, args.cols) {
        Ok(d) => d,
        Err(e) => return usage_error(&e.to_string()),
    };
    let k = outcome::outcome_class(dims, cfg);
    let field = |w: Option<Player>| w.map_or("unknown".to_string(), |p| p.to_string());
    println!("{}", k.label());
    println!("when Vertical starts:   {}", field(k.when_v_starts));
    println!("when Horizontal starts: {}", field(k.when_h_starts));
    if k.is_complete() {
        EXIT_OK
    } else {
        EXIT_BUDGET
    }
}

fn cmd_landscape(args: LandscapeArgs) -> u8 {
    let cfg = match args.engine.solve_config() {
        Ok(cfg) => cfg,
        Err(msg) => return usage_error(&msg),
    };
    let base: BTreeMap<BoardDims, OutcomeKnowledge> = match &args.base {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage_error(&format!("cannot read {}: {}", path.display(), e)),
            };
            match outcome::ingest_known_results(&text) {
                Ok(base) => base,
                Err(e) => return usage_error(&format!("{}: {}", path.display(), e)),
            }
        }
        None => BTreeMap::new(),
    };

    let grid = outcome::generate_landscape_jobs(args.max_m, args.max_n, &base, args.budget_nodes, cfg, args.jobs.max(1));

    // aligned text grid, rows top to bottom
    let width = grid
        .cells()
        .map(|c| c.knowledge.label().len())
        .max()
        .unwrap_or(1)
        .max(2);
    print!("m\\n ");
    for n in 1..=grid.max_n {
        print!("{:>width$} ", n, width = width);
    }
    println!();
    for m in 1..=grid.max_m {
        print!("{:>3} ", m);
        for n in 1..=grid.max_n {
            print!("{:>width$} ", grid.get(m, n).knowledge.label(), width = width);
        }
        println!();
    }
    for note in landscape_notes(&grid) {
        println!("{}", note);
    }

    let mut csv = String::from("m,n,label,provenance\n");
    for cell in grid.cells() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            cell.dims.rows,
            cell.dims.cols,
            cell.knowledge.label(),
            cell_provenance(&cell.knowledge)
        ));
    }
    match &args.csv {
        Some(path) => {
            if let Err(e) = std::fs::write(path, csv) {
                return usage_error(&format!("cannot write {}: {}", path.display(), e));
            }
        }
        None => print!("{}", csv),
    }
    EXIT_OK
}

/// Footnote lines for facts that extend beyond the rendered grid.
fn landscape_notes(grid: &outcome::Landscape) -> Vec<String> {
    let mut notes = Vec::new();
    for m in 1..=grid.max_m {
        if 2 * m <= grid.max_n && grid.get(m, 2 * m).knowledge.class() == Some(outcome::OutcomeClass::H) {
            notes.push(format!("note: {0}x2k{0} boards are H for every k >= 1", m));
        }
        if 2 * m <= grid.max_m && grid.get(2 * m, m).knowledge.class() == Some(outcome::OutcomeClass::V) {
            notes.push(format!("note: 2k{0}x{0} boards are V for every k >= 1", m));
        }
    }
    notes
}

fn cmd_selftest(args: SelftestArgs) -> u8 {
    let base_cfg = match args.engine.solve_config() {
        Ok(cfg) => cfg,
        Err(msg) => return usage_error(&msg),
    };

    // oracle-equivalence sweep over every config combination
    let mut configs = Vec::new();
    for use_knowledge in [false, true] {
        for (use_tt, scheme) in [
            (false, ReplacementScheme::Deep),
            (true, ReplacementScheme::Deep),
            (true, ReplacementScheme::TwoBig),
        ] {
            for order in [MoveOrder::RowMajor, MoveOrder::Heuristic] {
                configs.push(SolveConfig {
                    use_knowledge,
                    use_tt,
                    tt: TTConfig::new(base_cfg.tt.index_bits.min(16), scheme),
                    node_limit: None,
                    order,
                    seed: base_cfg.seed,
                });
            }
        }
    }

    let mut boards = Vec::new();
    for m in 1..=args.area_limit as u16 {
        for n in 1..=(args.area_limit as u16 / m) {
            boards.push(BoardDims::new(m, n).expect("small board"));
        }
    }

    println!("selftest: oracle sweep over {} boards x {} configs", boards.len(), configs.len());
    for &dims in &boards {
        let pos = Position::empty(dims);
        for to_move in [Player::Vertical, Player::Horizontal] {
            let expected = match brute_force_oracle(&pos, to_move) {
                Ok(w) => w,
                Err(e) => return usage_error(&e.to_string()),
            };
            for cfg in &configs {
                let got = search::solve(&pos, to_move, *cfg).expect("no node limit set");
                if got.winner != expected {
                    println!(
                        "MISMATCH on {} with {} to move: oracle {}, solver {} (knowledge={}, tt={}, order={:?})",
                        dims, to_move, expected, got.winner, cfg.use_knowledge, cfg.use_tt, cfg.order
                    );
                    print!("{}", pos);
                    return EXIT_PROPERTY_FAILURE;
                }
            }
        }
    }

    // symmetry and transpose-duality invariance on solved boards
    println!("selftest: symmetry and duality checks");
    for &dims in boards.iter().filter(|d| d.cells() <= 12) {
        let pos = Position::empty(dims);
        for to_move in [Player::Vertical, Player::Horizontal] {
            let winner = search::solve(&pos, to_move, base_cfg).expect("solvable").winner;
            for sym in domineering::Symmetry::ALL {
                let image = pos.transform(sym);
                let w = search::solve(&image, to_move, base_cfg).expect("solvable").winner;
                if w != winner {
                    println!("SYMMETRY VIOLATION on {} under {:?}", dims, sym);
                    print!("{}", pos);
                    return EXIT_PROPERTY_FAILURE;
                }
            }
            let transposed = Position::empty(dims.transposed());
            let dual = search::solve(&transposed, to_move.transposed(), base_cfg)
                .expect("solvable")
                .winner;
            if dual.transposed() != winner {
                println!("DUALITY VIOLATION on {}", dims);
                print!("{}", pos);
                return EXIT_PROPERTY_FAILURE;
            }
        }
    }

    // TT schemes must agree on a mid-size board
    println!("selftest: TT on/off equivalence on 6x6");
    let pos = Position::empty(BoardDims::new(6, 6).expect("6x6"));
    let mut winners = Vec::new();
    for (use_tt, scheme) in [
        (false, ReplacementScheme::Deep),
        (true, ReplacementScheme::Deep),
        (true, ReplacementScheme::TwoBig),
    ] {
        let cfg = SolveConfig {
            use_tt,
            tt: TTConfig::new(base_cfg.tt.index_bits.min(20), scheme),
            ..base_cfg
        };
        winners.push(search::solve(&pos, Player::Vertical, cfg).expect("solvable").winner);
    }
    if winners.windows(2).any(|w| w[0] != w[1]) {
        println!("TT EQUIVALENCE VIOLATION on 6x6: {:?}", winners);
        return EXIT_PROPERTY_FAILURE;
    }

    println!("selftest: all checks passed");
    EXIT_OK
}
