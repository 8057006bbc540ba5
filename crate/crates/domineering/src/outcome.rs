//! Outcome classes and the algebra that extends solved results: transpose
//! duality, translational combination rules, ingestion of known results,
//! and landscape-table generation.
//!
//! Knowledge is stored per start player, not per class label: composite
//! labels like NH are exactly partial field knowledge, and the
//! combination rules act on single fields. Negative labels (-V, -H, NP)
//! ride alongside as class exclusions.

use std::collections::BTreeMap;

use crate::board::{BoardDims, Player, Position};
use crate::error::DomineeringError;
use crate::search::{solve, SolveConfig};

/// Game-theoretic outcome class of a board.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutcomeClass {
    /// Next (first) player wins.
    N,
    /// Previous (second) player wins.
    P,
    /// Vertical wins irrespective of who starts.
    V,
    /// Horizontal wins irrespective of who starts.
    H,
}

impl OutcomeClass {
    pub const ALL: [OutcomeClass; 4] = [OutcomeClass::N, OutcomeClass::P, OutcomeClass::V, OutcomeClass::H];

    fn letter(self) -> char {
        match self {
            OutcomeClass::N => 'N',
            OutcomeClass::P => 'P',
            OutcomeClass::V => 'V',
            OutcomeClass::H => 'H',
        }
    }

    /// Winner when the given player starts.
    fn winner_when_starts(self, starter: Player) -> Player {
        match self {
            OutcomeClass::N => starter,
            OutcomeClass::P => starter.opponent(),
            OutcomeClass::V => Player::Vertical,
            OutcomeClass::H => Player::Horizontal,
        }
    }

    fn transposed(self) -> OutcomeClass {
        match self {
            OutcomeClass::V => OutcomeClass::H,
            OutcomeClass::H => OutcomeClass::V,
            other => other,
        }
    }
}

/// A set of outcome classes, used for exclusion annotations.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassSet(u8);

impl ClassSet {
    pub const EMPTY: ClassSet = ClassSet(0);

    fn bit(class: OutcomeClass) -> u8 {
        match class {
            OutcomeClass::N => 1,
            OutcomeClass::P => 2,
            OutcomeClass::V => 4,
            OutcomeClass::H => 8,
        }
    }

    pub fn with(mut self, class: OutcomeClass) -> ClassSet {
        self.0 |= Self::bit(class);
        self
    }

    pub fn contains(self, class: OutcomeClass) -> bool {
        self.0 & Self::bit(class) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: ClassSet) -> ClassSet {
        ClassSet(self.0 | other.0)
    }

    pub fn transposed(self) -> ClassSet {
        let mut out = ClassSet::EMPTY;
        for class in OutcomeClass::ALL {
            if self.contains(class) {
                out = out.with(class.transposed());
            }
        }
        out
    }
}

/// How a piece of knowledge was obtained.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Solved,
    Rule,
    Ingested,
    Unknown,
}

/// Per-start-player knowledge about a board size, possibly partial.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OutcomeKnowledge {
    pub when_v_starts: Option<Player>,
    pub when_h_starts: Option<Player>,
    pub v_prov: Provenance,
    pub h_prov: Provenance,
    /// Classes the board is known NOT to be (from labels like -V, NP).
    pub excluded: ClassSet,
    /// Set for entries ingested from an anomalous source label.
    pub anomaly: bool,
}

impl Default for OutcomeKnowledge {
    fn default() -> Self {
        OutcomeKnowledge {
            when_v_starts: None,
            when_h_starts: None,
            v_prov: Provenance::Unknown,
            h_prov: Provenance::Unknown,
            excluded: ClassSet::EMPTY,
            anomaly: false,
        }
    }
}

impl OutcomeKnowledge {
    pub fn from_class(class: OutcomeClass, prov: Provenance) -> OutcomeKnowledge {
        OutcomeKnowledge {
            when_v_starts: Some(class.winner_when_starts(Player::Vertical)),
            when_h_starts: Some(class.winner_when_starts(Player::Horizontal)),
            v_prov: prov,
            h_prov: prov,
            ..Default::default()
        }
    }

    pub fn is_complete(&self) -> bool {
        self.when_v_starts.is_some() && self.when_h_starts.is_some()
    }

    /// The class, when both fields are known.
    pub fn class(&self) -> Option<OutcomeClass> {
        match (self.when_v_starts?, self.when_h_starts?) {
            (Player::Vertical, Player::Vertical) => Some(OutcomeClass::V),
            (Player::Horizontal, Player::Horizontal) => Some(OutcomeClass::H),
            (Player::Vertical, Player::Horizontal) => Some(OutcomeClass::N),
            (Player::Horizontal, Player::Vertical) => Some(OutcomeClass::P),
        }
    }

    /// Classes still compatible with the fields and exclusions.
    pub fn candidates(&self) -> Vec<OutcomeClass> {
        OutcomeClass::ALL
            .into_iter()
            .filter(|&class| {
                if self.excluded.contains(class) {
                    return false;
                }
                let v_ok = self
                    .when_v_starts
                    .map_or(true, |w| class.winner_when_starts(Player::Vertical) == w);
                let h_ok = self
                    .when_h_starts
                    .map_or(true, |w| class.winner_when_starts(Player::Horizontal) == w);
                v_ok && h_ok
            })
            .collect()
    }

    /// Table-style label: a single letter when complete, composites like
    /// NH for two candidates, -V style when only one class is excluded,
    /// "?" when nothing is known and "!" when knowledge is contradictory.
    pub fn label(&self) -> String {
        let candidates = self.candidates();
        match candidates.len() {
            0 => "!".into(),
            1 => candidates[0].letter().to_string(),
            2 => candidates.iter().map(|c| c.letter()).collect(),
            3 => {
                let missing = OutcomeClass::ALL
                    .into_iter()
                    .find(|c| !candidates.contains(c))
                    .expect("one class missing");
                format!("-{}", missing.letter())
            }
            _ => "?".into(),
        }
    }

    /// Swap V and H throughout: the knowledge about the transposed board.
    pub fn transpose_dual(&self) -> OutcomeKnowledge {
        OutcomeKnowledge {
            when_v_starts: self.when_h_starts.map(Player::transposed),
            when_h_starts: self.when_v_starts.map(Player::transposed),
            v_prov: self.h_prov,
            h_prov: self.v_prov,
            excluded: self.excluded.transposed(),
            anomaly: self.anomaly,
        }
    }

    /// Fill unknown fields and accumulate exclusions from `other`.
    /// Known fields are never overwritten. Returns true if anything changed.
    pub fn absorb(&mut self, other: &OutcomeKnowledge) -> bool {
        let mut changed = false;
        if self.when_v_starts.is_none() {
            if let Some(w) = other.when_v_starts {
                self.when_v_starts = Some(w);
                self.v_prov = other.v_prov;
                changed = true;
            }
        }
        if self.when_h_starts.is_none() {
            if let Some(w) = other.when_h_starts {
                self.when_h_starts = Some(w);
                self.h_prov = other.h_prov;
                changed = true;
            }
        }
        let merged = self.excluded.union(other.excluded);
        if merged != self.excluded {
            self.excluded = merged;
            changed = true;
        }
        changed
    }
}

/// Solve both start players for a board size.
pub fn outcome_class(dims: BoardDims, cfg: SolveConfig) -> OutcomeKnowledge {
    let mut knowledge = OutcomeKnowledge::default();
    let pos = Position::empty(dims);
    if let Ok(report) = solve(&pos, Player::Vertical, cfg) {
        knowledge.when_v_starts = Some(report.winner);
        knowledge.v_prov = Provenance::Solved;
    }
    if let Ok(report) = solve(&pos, Player::Horizontal, cfg) {
        knowledge.when_h_starts = Some(report.winner);
        knowledge.h_prov = Provenance::Solved;
    }
    knowledge
}

fn horiz_when_v_starts(k: &OutcomeKnowledge) -> bool {
    k.when_v_starts == Some(Player::Horizontal)
}

fn horiz_when_h_starts(k: &OutcomeKnowledge) -> bool {
    k.when_h_starts == Some(Player::Horizontal)
}

/// Translational combination of an m×p and an m×q board into m×(p+q).
///
/// Only the Horizontal-producing rules apply in this direction: if
/// Horizontal wins both halves as second player, it wins the whole as
/// second player; if it additionally wins one half moving first, it wins
/// the whole moving first. Vertical facts come via the dual form.
pub fn combine_horizontal(
    a_dims: BoardDims,
    a: &OutcomeKnowledge,
    b_dims: BoardDims,
    b: &OutcomeKnowledge,
) -> Result<(BoardDims, OutcomeKnowledge), DomineeringError> {
    if a_dims.rows != b_dims.rows {
        return Err(DomineeringError::DimensionMismatch(format!(
            "cannot concatenate {} and {} horizontally",
            a_dims, b_dims
        )));
    }
    let dims = BoardDims {
        rows: a_dims.rows,
        cols: a_dims.cols + b_dims.cols,
    };
    let mut out = OutcomeKnowledge::default();
    if horiz_when_v_starts(a) && horiz_when_v_starts(b) {
        out.when_v_starts = Some(Player::Horizontal);
        out.v_prov = Provenance::Rule;
    }
    if (horiz_when_v_starts(a) && horiz_when_h_starts(b))
        || (horiz_when_h_starts(a) && horiz_when_v_starts(b))
    {
        out.when_h_starts = Some(Player::Horizontal);
        out.h_prov = Provenance::Rule;
    }
    Ok((dims, out))
}

/// Vertical stacking of a p×n over a q×n board: the dual of
/// `combine_horizontal` with V in Horizontal's role.
pub fn combine_vertical(
    a_dims: BoardDims,
    a: &OutcomeKnowledge,
    b_dims: BoardDims,
    b: &OutcomeKnowledge,
) -> Result<(BoardDims, OutcomeKnowledge), DomineeringError> {
    if a_dims.cols != b_dims.cols {
        return Err(DomineeringError::DimensionMismatch(format!(
            "cannot stack {} and {} vertically",
            a_dims, b_dims
        )));
    }
    let (dims, combined) = combine_horizontal(
        a_dims.transposed(),
        &a.transpose_dual(),
        b_dims.transposed(),
        &b.transpose_dual(),
    )?;
    Ok((dims.transposed(), combined.transpose_dual()))
}

/// Parse a results file of CSV rows `m,n,label`. Lines starting with '#'
/// and a leading `m,n,label` header are skipped.
pub fn ingest_known_results(text: &str) -> Result<BTreeMap<BoardDims, OutcomeKnowledge>, DomineeringError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("m,n,label") {
            continue;
        }
        let parse_err = |message: String| DomineeringError::Parse {
            line: lineno + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected 3 fields, got {}", fields.len())));
        }
        let rows: u16 = fields[0].parse().map_err(|_| parse_err(format!("bad row count '{}'", fields[0])))?;
        let cols: u16 = fields[1].parse().map_err(|_| parse_err(format!("bad col count '{}'", fields[1])))?;
        if rows == 0 || cols == 0 {
            return Err(parse_err("dimensions must be positive".into()));
        }
        let dims = BoardDims { rows, cols };
        let knowledge = parse_label(fields[2]).ok_or_else(|| parse_err(format!("unknown label '{}'", fields[2])))?;
        out.insert(dims, knowledge);
    }
    Ok(out)
}

fn parse_label(label: &str) -> Option<OutcomeKnowledge> {
    let ingested = Provenance::Ingested;
    let k = match label {
        "N" => OutcomeKnowledge::from_class(OutcomeClass::N, ingested),
        "P" => OutcomeKnowledge::from_class(OutcomeClass::P, ingested),
        "V" => OutcomeKnowledge::from_class(OutcomeClass::V, ingested),
        "H" => OutcomeKnowledge::from_class(OutcomeClass::H, ingested),
        "NH" => OutcomeKnowledge {
            when_h_starts: Some(Player::Horizontal),
            h_prov: ingested,
            ..Default::default()
        },
        "NV" => OutcomeKnowledge {
            when_v_starts: Some(Player::Vertical),
            v_prov: ingested,
            ..Default::default()
        },
        "NP" => OutcomeKnowledge {
            excluded: ClassSet::EMPTY.with(OutcomeClass::V).with(OutcomeClass::H),
            ..Default::default()
        },
        "-V" => OutcomeKnowledge {
            excluded: ClassSet::EMPTY.with(OutcomeClass::V),
            ..Default::default()
        },
        "-H" => OutcomeKnowledge {
            excluded: ClassSet::EMPTY.with(OutcomeClass::H),
            ..Default::default()
        },
        // anomalous first-player-win marker in the source table
        "1" => OutcomeKnowledge {
            anomaly: true,
            ..OutcomeKnowledge::from_class(OutcomeClass::N, ingested)
        },
        _ => return None,
    };
    Some(k)
}

/// One cell of the generated landscape.
#[derive(Copy, Clone, Debug)]
pub struct LandscapeCell {
    pub dims: BoardDims,
    pub knowledge: OutcomeKnowledge,
}

/// A max_m × max_n grid of outcome knowledge.
pub struct Landscape {
    pub max_m: u16,
    pub max_n: u16,
    cells: Vec<LandscapeCell>,
}

impl Landscape {
    fn new(max_m: u16, max_n: u16) -> Landscape {
        let mut cells = Vec::with_capacity(max_m as usize * max_n as usize);
        for m in 1..=max_m {
            for n in 1..=max_n {
                cells.push(LandscapeCell {
                    dims: BoardDims { rows: m, cols: n },
                    knowledge: OutcomeKnowledge::default(),
                });
            }
        }
        Landscape { max_m, max_n, cells }
    }

    pub fn get(&self, m: u16, n: u16) -> &LandscapeCell {
        &self.cells[(m as usize - 1) * self.max_n as usize + (n as usize - 1)]
    }

    fn get_mut(&mut self, m: u16, n: u16) -> &mut LandscapeCell {
        &mut self.cells[(m as usize - 1) * self.max_n as usize + (n as usize - 1)]
    }

    pub fn cells(&self) -> impl Iterator<Item = &LandscapeCell> {
        self.cells.iter()
    }
}

/// Grid-size cap matching the rendered table margins.
pub const LANDSCAPE_MAX: u16 = 32;

/// Fill a landscape by priority: ingested base results, then direct
/// solves within `budget` nodes per field, then rule closure to fixpoint.
pub fn generate_landscape(
    max_m: u16,
    max_n: u16,
    base: &BTreeMap<BoardDims, OutcomeKnowledge>,
    budget: u64,
    solve_cfg: SolveConfig,
) -> Landscape {
    generate_landscape_jobs(max_m, max_n, base, budget, solve_cfg, 1)
}

/// As `generate_landscape`, with the direct-solve phase fanned out over
/// `jobs` worker threads. Cell solves are independent; each owns its
/// table, so the result is identical to the sequential run.
pub fn generate_landscape_jobs(
    max_m: u16,
    max_n: u16,
    base: &BTreeMap<BoardDims, OutcomeKnowledge>,
    budget: u64,
    solve_cfg: SolveConfig,
    jobs: usize,
) -> Landscape {
    let max_m = max_m.min(LANDSCAPE_MAX);
    let max_n = max_n.min(LANDSCAPE_MAX);
    let mut grid = Landscape::new(max_m, max_n);

    for (&dims, knowledge) in base {
        if dims.rows <= max_m && dims.cols <= max_n {
            grid.get_mut(dims.rows, dims.cols).knowledge.absorb(knowledge);
        }
    }

    if budget > 0 {
        let cfg = SolveConfig {
            node_limit: Some(budget),
            ..solve_cfg
        };
        let mut tasks: Vec<(BoardDims, bool, bool)> = Vec::new();
        for m in 1..=max_m {
            for n in 1..=max_n {
                let k = &grid.get(m, n).knowledge;
                if k.is_complete() || BoardDims::new(m, n).is_err() {
                    continue;
                }
                tasks.push((grid.get(m, n).dims, k.when_v_starts.is_none(), k.when_h_starts.is_none()));
            }
        }
        let updates = run_solve_tasks(&tasks, cfg, jobs.max(1));
        for (dims, update) in updates {
            grid.get_mut(dims.rows, dims.cols).knowledge.absorb(&update);
        }
    }

    close_under_rules(&mut grid);
    grid
}

fn solve_cell(dims: BoardDims, need_v: bool, need_h: bool, cfg: SolveConfig) -> OutcomeKnowledge {
    let pos = Position::empty(dims);
    let mut update = OutcomeKnowledge::default();
    if need_v {
        if let Ok(report) = solve(&pos, Player::Vertical, cfg) {
            update.when_v_starts = Some(report.winner);
            update.v_prov = Provenance::Solved;
        }
    }
    if need_h {
        if let Ok(report) = solve(&pos, Player::Horizontal, cfg) {
            update.when_h_starts = Some(report.winner);
            update.h_prov = Provenance::Solved;
        }
    }
    update
}

fn run_solve_tasks(
    tasks: &[(BoardDims, bool, bool)],
    cfg: SolveConfig,
    jobs: usize,
) -> Vec<(BoardDims, OutcomeKnowledge)> {
    if jobs <= 1 || tasks.len() <= 1 {
        return tasks
            .iter()
            .map(|&(dims, v, h)| (dims, solve_cell(dims, v, h, cfg)))
            .collect();
    }
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(tasks.len()));
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(dims, v, h)) = tasks.get(i) else { break };
                let update = solve_cell(dims, v, h, cfg);
                results.lock().expect("no poisoned lock").push((dims, update));
            });
        }
    });
    results.into_inner().expect("no poisoned lock")
}

/// Iterate transpose duality and the translational combination rules to
/// fixpoint. Monotone: fields are only ever added, so this terminates.
fn close_under_rules(grid: &mut Landscape) {
    loop {
        let mut changed = false;

        // transpose duality, including the square-board self-link
        for m in 1..=grid.max_m {
            for n in 1..=grid.max_n {
                if n > grid.max_m || m > grid.max_n {
                    continue; // transposed cell falls outside the grid
                }
                let dual = grid.get(m, n).knowledge.transpose_dual();
                let dual = OutcomeKnowledge {
                    v_prov: ruled(dual.v_prov),
                    h_prov: ruled(dual.h_prov),
                    ..dual
                };
                changed |= grid.get_mut(n, m).knowledge.absorb(&dual);
            }
        }

        // horizontal concatenation: m×p ++ m×q -> m×(p+q)
        for m in 1..=grid.max_m {
            for n in 2..=grid.max_n {
                for p in 1..n {
                    let q = n - p;
                    let a = *grid.get(m, p);
                    let b = *grid.get(m, q);
                    let (dims, combined) = combine_horizontal(a.dims, &a.knowledge, b.dims, &b.knowledge)
                        .expect("heights match by construction");
                    debug_assert_eq!(dims, BoardDims { rows: m, cols: n });
                    changed |= grid.get_mut(m, n).knowledge.absorb(&combined);
                }
            }
        }

        // vertical stacking: p×n ++ q×n -> (p+q)×n
        for n in 1..=grid.max_n {
            for m in 2..=grid.max_m {
                for p in 1..m {
                    let q = m - p;
                    let a = *grid.get(p, n);
                    let b = *grid.get(q, n);
                    let (dims, combined) = combine_vertical(a.dims, &a.knowledge, b.dims, &b.knowledge)
                        .expect("widths match by construction");
                    debug_assert_eq!(dims, BoardDims { rows: m, cols: n });
                    changed |= grid.get_mut(m, n).knowledge.absorb(&combined);
                }
            }
        }

        if !changed {
            break;
        }
    }
}

fn ruled(prov: Provenance) -> Provenance {
    match prov {
        Provenance::Unknown => Provenance::Unknown,
        _ => Provenance::Rule,
    }
}

/// Cell-level provenance for reporting.
pub fn cell_provenance(k: &OutcomeKnowledge) -> &'static str {
    match (k.v_prov, k.h_prov) {
        (Provenance::Unknown, Provenance::Unknown) => {
            if k.excluded.is_empty() {
                "unknown"
            } else {
                "ingested"
            }
        }
        (a, b) if a == b => prov_name(a),
        (Provenance::Unknown, b) => prov_name(b),
        (a, Provenance::Unknown) => prov_name(a),
        _ => "mixed",
    }
}

fn prov_name(p: Provenance) -> &'static str {
    match p {
        Provenance::Solved => "solved",
        Provenance::Rule => "rule",
        Provenance::Ingested => "ingested",
        Provenance::Unknown => "unknown",
    }
}
