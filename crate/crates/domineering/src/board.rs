//! Board representation: positions, moves, symmetry transforms and
//! canonicalization for m×n Domineering boards.
//!
//! Cells are indexed row-major; occupancy lives in a fixed 256-bit set so
//! positions are cheap to copy and hash.

use std::fmt;

use crate::error::DomineeringError;

/// Maximum number of cells a searchable board may have.
pub const MAX_CELLS: usize = 256;

/// The two players. Vertical places dominoes vertically, Horizontal
/// horizontally. Vertical conventionally moves first.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Player {
    Vertical,
    Horizontal,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Vertical => Player::Horizontal,
            Player::Horizontal => Player::Vertical,
        }
    }

    /// Swap roles, used by the transpose duality of the outcome algebra.
    pub fn transposed(self) -> Player {
        self.opponent()
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Vertical => write!(f, "Vertical"),
            Player::Horizontal => write!(f, "Horizontal"),
        }
    }
}

/// Board dimensions, rows × cols.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct BoardDims {
    pub rows: u16,
    pub cols: u16,
}

impl BoardDims {
    pub fn new(rows: u16, cols: u16) -> Result<Self, DomineeringError> {
        if rows == 0 || cols == 0 {
            return Err(DomineeringError::Capacity {
                rows,
                cols,
                reason: "dimensions must be positive",
            });
        }
        if rows as usize * cols as usize > MAX_CELLS {
            return Err(DomineeringError::Capacity {
                rows,
                cols,
                reason: "board exceeds 256-cell solver capacity",
            });
        }
        Ok(BoardDims { rows, cols })
    }

    pub fn cells(self) -> usize {
        self.rows as usize * self.cols as usize
    }

    pub fn transposed(self) -> BoardDims {
        BoardDims {
            rows: self.cols,
            cols: self.rows,
        }
    }
}

impl fmt::Display for BoardDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// Fixed 256-bit occupancy set, bit i = cell i (row-major).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CellSet(pub [u64; 4]);

impl CellSet {
    pub const EMPTY: CellSet = CellSet([0; 4]);

    #[inline]
    pub fn get(&self, idx: usize) -> bool {
        (self.0[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, idx: usize) {
        self.0[idx >> 6] |= 1u64 << (idx & 63);
    }

    #[inline]
    pub fn clear(&mut self, idx: usize) {
        self.0[idx >> 6] &= !(1u64 << (idx & 63));
    }

    pub fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    /// Iterate indices of set bits in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            std::iter::successors(Some(w), |&w| Some(w & w.wrapping_sub(1)))
                .take_while(|&w| w != 0)
                .map(move |w| (wi << 6) + w.trailing_zeros() as usize)
        })
    }

    /// Extract `len` (≤ 64) bits starting at `start` as a u64.
    #[inline]
    fn extract(&self, start: usize, len: usize) -> u64 {
        debug_assert!(len <= 64 && start + len <= MAX_CELLS);
        let (word, off) = (start >> 6, start & 63);
        let mut bits = self.0[word] >> off;
        if off + len > 64 {
            bits |= self.0[word + 1] << (64 - off);
        }
        if len == 64 {
            bits
        } else {
            bits & ((1u64 << len) - 1)
        }
    }

    /// Insert `len` (≤ 64) bits at `start`; the target range and the bits
    /// of `bits` above `len` must be clear.
    #[inline]
    fn insert(&mut self, start: usize, bits: u64) {
        let (word, off) = (start >> 6, start & 63);
        self.0[word] |= bits << off;
        if off > 0 {
            let spill = bits >> (64 - off);
            if spill != 0 {
                self.0[word + 1] |= spill;
            }
        }
    }
}

/// A domino placement. The anchor is the top cell for Vertical, the left
/// cell for Horizontal; the second covered cell is implied.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub player: Player,
    pub row: u16,
    pub col: u16,
}

impl Move {
    pub fn new(player: Player, row: u16, col: u16) -> Self {
        Move { player, row, col }
    }
}

/// The symmetries that preserve player roles. Together with the identity
/// the two mirrors and their composition form a group of order 4; the
/// diagonal transpose is deliberately excluded (it swaps the players).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetry {
    Identity,
    MirrorCols,
    MirrorRows,
    Rotate180,
}

impl Symmetry {
    pub const ALL: [Symmetry; 4] = [
        Symmetry::Identity,
        Symmetry::MirrorCols,
        Symmetry::MirrorRows,
        Symmetry::Rotate180,
    ];

    /// Image of cell (r, c) on a board of the given dims.
    #[inline]
    pub fn map_cell(self, dims: BoardDims, r: u16, c: u16) -> (u16, u16) {
        match self {
            Symmetry::Identity => (r, c),
            Symmetry::MirrorCols => (r, dims.cols - 1 - c),
            Symmetry::MirrorRows => (dims.rows - 1 - r, c),
            Symmetry::Rotate180 => (dims.rows - 1 - r, dims.cols - 1 - c),
        }
    }
}

/// Occupancy state of an m×n board.
///
/// Alongside the row-major occupancy a column-major mirror is kept in
/// lockstep, so both orientations can slice out line masks for the run
/// analysis without transposing on the fly. Equality and hashing look at
/// the row-major set only; the mirror is derived state.
#[derive(Copy, Clone, Debug)]
pub struct Position {
    dims: BoardDims,
    occupied: CellSet,
    occupied_t: CellSet,
}

impl PartialEq for Position {
    fn eq(&self, other: &Position) -> bool {
        self.dims == other.dims && self.occupied == other.occupied
    }
}

impl Eq for Position {}

impl std::hash::Hash for Position {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.dims.hash(state);
        self.occupied.hash(state);
    }
}

impl Position {
    /// All-empty position.
    pub fn empty(dims: BoardDims) -> Position {
        Position {
            dims,
            occupied: CellSet::EMPTY,
            occupied_t: CellSet::EMPTY,
        }
    }

    /// Rebuild a position from dims and row-major occupancy.
    fn from_occupancy(dims: BoardDims, occupied: CellSet) -> Position {
        let (rows, cols) = (dims.rows as usize, dims.cols as usize);
        let mut occupied_t = CellSet::EMPTY;
        for idx in occupied.iter() {
            let (r, c) = (idx / cols, idx % cols);
            occupied_t.set(c * rows + r);
        }
        Position {
            dims,
            occupied,
            occupied_t,
        }
    }

    pub fn dims(&self) -> BoardDims {
        self.dims
    }

    /// The diagonally transposed position (rows and columns swapped).
    /// Free of charge: the column-major mirror is exactly the row-major
    /// occupancy of the transposed board.
    pub fn transposed(&self) -> Position {
        Position {
            dims: self.dims.transposed(),
            occupied: self.occupied_t,
            occupied_t: self.occupied,
        }
    }

    pub fn occupied(&self) -> &CellSet {
        &self.occupied
    }

    #[inline]
    pub fn cell_index(&self, r: u16, c: u16) -> usize {
        r as usize * self.dims.cols as usize + c as usize
    }

    #[inline]
    pub fn is_occupied(&self, r: u16, c: u16) -> bool {
        self.occupied.get(self.cell_index(r, c))
    }

    pub fn empty_cells(&self) -> usize {
        self.dims.cells() - self.occupied.count() as usize
    }

    fn move_cells(&self, mv: Move) -> Result<(usize, usize), DomineeringError> {
        let (r2, c2) = match mv.player {
            Player::Vertical => (mv.row + 1, mv.col),
            Player::Horizontal => (mv.row, mv.col + 1),
        };
        if mv.row >= self.dims.rows || mv.col >= self.dims.cols || r2 >= self.dims.rows || c2 >= self.dims.cols {
            return Err(DomineeringError::IllegalMove {
                mv,
                reason: "placement out of bounds",
            });
        }
        Ok((self.cell_index(mv.row, mv.col), self.cell_index(r2, c2)))
    }

    /// Is `mv` playable here?
    pub fn is_legal(&self, mv: Move) -> bool {
        match self.move_cells(mv) {
            Ok((a, b)) => !self.occupied.get(a) && !self.occupied.get(b),
            Err(_) => false,
        }
    }

    /// All placements for `player`, row-major by anchor.
    pub fn legal_moves(&self, player: Player) -> Vec<Move> {
        let mut moves = Vec::new();
        let (row_end, col_end) = match player {
            Player::Vertical => (self.dims.rows - 1, self.dims.cols),
            Player::Horizontal => (self.dims.rows, self.dims.cols - 1),
        };
        for r in 0..row_end {
            for c in 0..col_end {
                let mv = Move::new(player, r, c);
                if self.is_legal(mv) {
                    moves.push(mv);
                }
            }
        }
        moves
    }

    /// Transposed cell indices covered by `mv`, in the column-major set.
    #[inline]
    fn move_cells_t(&self, mv: Move) -> (usize, usize) {
        let rows = self.dims.rows as usize;
        let base = mv.col as usize * rows + mv.row as usize;
        match mv.player {
            Player::Vertical => (base, base + 1),
            Player::Horizontal => (base, base + rows),
        }
    }

    /// Returns the position with `mv` played.
    pub fn apply_move(&self, mv: Move) -> Result<Position, DomineeringError> {
        let (a, b) = self.move_cells(mv)?;
        if self.occupied.get(a) || self.occupied.get(b) {
            return Err(DomineeringError::IllegalMove {
                mv,
                reason: "cell already occupied",
            });
        }
        let mut next = *self;
        next.occupied.set(a);
        next.occupied.set(b);
        let (ta, tb) = self.move_cells_t(mv);
        next.occupied_t.set(ta);
        next.occupied_t.set(tb);
        Ok(next)
    }

    /// Inverse of `apply_move` for the placement covering those two cells.
    pub fn undo_move(&self, mv: Move) -> Result<Position, DomineeringError> {
        let (a, b) = self.move_cells(mv).map_err(|_| DomineeringError::InconsistentUndo { mv })?;
        if !self.occupied.get(a) || !self.occupied.get(b) {
            return Err(DomineeringError::InconsistentUndo { mv });
        }
        let mut prev = *self;
        prev.occupied.clear(a);
        prev.occupied.clear(b);
        let (ta, tb) = self.move_cells_t(mv);
        prev.occupied_t.clear(ta);
        prev.occupied_t.clear(tb);
        Ok(prev)
    }

    /// Row-major occupancy permuted by `sym`. Rows no wider than 64 cells
    /// are shuffled as whole masks: a column mirror reverses the bits of
    /// each row, a row mirror reverses the row order, and the 180°
    /// rotation does both.
    fn transform_occupancy(&self, sym: Symmetry) -> CellSet {
        Self::transform_occ(self.dims, &self.occupied, sym)
    }

    /// `occ` permuted by `sym` within `dims`.
    fn transform_occ(dims: BoardDims, occ_in: &CellSet, sym: Symmetry) -> CellSet {
        let (rows, cols) = (dims.rows as usize, dims.cols as usize);
        if cols <= 64 {
            let mut occ = CellSet::EMPTY;
            for r in 0..rows {
                let bits = occ_in.extract(r * cols, cols);
                let (nr, nbits) = match sym {
                    Symmetry::Identity => (r, bits),
                    Symmetry::MirrorCols => (r, bits.reverse_bits() >> (64 - cols)),
                    Symmetry::MirrorRows => (rows - 1 - r, bits),
                    Symmetry::Rotate180 => (rows - 1 - r, bits.reverse_bits() >> (64 - cols)),
                };
                occ.insert(nr * cols, nbits);
            }
            return occ;
        }
        let mut occ = CellSet::EMPTY;
        for idx in occ_in.iter() {
            let (r, c) = ((idx / cols) as u16, (idx % cols) as u16);
            let (nr, nc) = sym.map_cell(dims, r, c);
            occ.set(nr as usize * cols + nc as usize);
        }
        occ
    }

    /// The position's occupancy with every *reserve* filled in, plus the
    /// net reserve capacity (vertical minus horizontal).
    ///
    /// A reserve is a maximal empty run none of whose cells has an empty
    /// perpendicular neighbor: an isolated one-wide segment the opponent
    /// can never reach or influence. Such a segment is an independent
    /// subgame worth exactly floor(len/2) guaranteed moves to its owner,
    /// regardless of where on the board it sits, so positions that agree
    /// on everything else and on the net reserve capacity have the same
    /// winner. Folding reserves out of the occupancy lets the
    /// transposition table identify those positions.
    pub fn reserve_core(&self) -> (CellSet, i32) {
        let mut core = self.occupied;
        let mut net: i32 = 0;
        if self.dims.rows > 64 || self.dims.cols > 64 {
            return (core, 0);
        }
        let mut masks = [0u64; MAX_CELLS];
        for player in [Player::Vertical, Player::Horizontal] {
            let (lines, _) = self.empty_line_masks(player, &mut masks);
            let sign = match player {
                Player::Vertical => 1i32,
                Player::Horizontal => -1i32,
            };
            for i in 0..lines {
                let e = masks[i];
                if e == 0 {
                    continue;
                }
                let before = if i > 0 { masks[i - 1] } else { 0 };
                let after = if i + 1 < lines { masks[i + 1] } else { 0 };
                let mut x = e & !(before | after);
                // only whole runs of `e` count; peel runs of the shielded
                // mask and keep those that are runs of `e` too
                while x != 0 {
                    let lsb = x & x.wrapping_neg();
                    let run = x & (x ^ x.wrapping_add(lsb));
                    x &= !run;
                    let lo = run.trailing_zeros();
                    let hi = 63 - run.leading_zeros();
                    let below = lo > 0 && e & (1u64 << (lo - 1)) != 0;
                    let above = hi < 63 && e & (1u64 << (hi + 1)) != 0;
                    if below || above {
                        continue;
                    }
                    net += sign * (run.count_ones() / 2) as i32;
                    let cols = self.dims.cols as usize;
                    for p in lo..=hi {
                        let idx = match player {
                            Player::Vertical => p as usize * cols + i,
                            Player::Horizontal => i * cols + p as usize,
                        };
                        core.set(idx);
                    }
                }
            }
        }
        (core, net)
    }

    /// Signature of the empty area as a sum of independent subgames.
    ///
    /// The empty cells split into orthogonally connected components that
    /// never interact, so the game is their sum. Straight one-wide
    /// segments are integers: floor(len/2) free moves for their owner,
    /// interchangeable with any other segments of the same net total.
    /// Every other component contributes its shape, which determines its
    /// value independently of where on the board it sits and survives
    /// mirror images unchanged. The returned pair is (order-independent
    /// hash of the canonical non-segment shapes, net segment capacity
    /// vertical minus horizontal); positions with equal signatures and
    /// the same player to move have the same winner.
    ///
    /// `cell_values` supplies the per-cell hashing basis (indexed by
    /// row-major cell position inside the component's bounding box).
    pub fn component_signature(&self, cell_values: &[u64; MAX_CELLS]) -> Option<(u64, i32)> {
        let (rows, cols) = (self.dims.rows as usize, self.dims.cols as usize);
        if rows > 64 || cols > 64 {
            return None;
        }
        let full = if cols == 64 { !0u64 } else { (1u64 << cols) - 1 };
        let mut empty = [0u64; 64];
        for r in 0..rows {
            empty[r] = !self.occupied.extract(r * cols, cols) & full;
        }
        let mut shapes: u64 = 0;
        let mut selfsame: u64 = 0;
        let mut net: i32 = 0;
        let mut comp = [0u64; 64];
        for seed_row in 0..rows {
            while empty[seed_row] != 0 {
                // flood-fill one component out of `empty`
                comp[..rows].fill(0);
                comp[seed_row] = empty[seed_row] & empty[seed_row].wrapping_neg();
                loop {
                    let mut changed = false;
                    for r in 0..rows {
                        let mut grow = comp[r];
                        grow |= (grow << 1) | (grow >> 1);
                        if r > 0 {
                            grow |= comp[r - 1];
                        }
                        if r + 1 < rows {
                            grow |= comp[r + 1];
                        }
                        grow &= empty[r];
                        if grow != comp[r] {
                            comp[r] = grow;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                let (mut lo_r, mut hi_r) = (usize::MAX, 0usize);
                let mut union = 0u64;
                for r in 0..rows {
                    empty[r] &= !comp[r];
                    if comp[r] != 0 {
                        lo_r = lo_r.min(r);
                        hi_r = hi_r.max(r);
                        union |= comp[r];
                    }
                }
                let h = hi_r - lo_r + 1;
                let lo_c = union.trailing_zeros() as usize;
                let w = 64 - union.leading_zeros() as usize - lo_c;
                // a 1-wide component is an integer subgame: only its owner
                // can ever place there, banking floor(len/2) moves nothing
                // can interfere with, so only the count enters the
                // signature (folded into `net`)
                if w == 1 {
                    net += (h / 2) as i32;
                    continue;
                }
                if h == 1 {
                    net -= (w / 2) as i32;
                    continue;
                }
                // canonical shape: smallest of the eight congruent images
                // (four mirrors, and four mirrors of the transpose). The
                // transpose swaps the players' roles, so it represents the
                // negative of the subgame: components pairing a shape with
                // its transpose sum to zero and cancel out of the
                // signature. Orientation is tracked as a sign so that a
                // lone shape stays distinct from its transpose; shapes
                // congruent to their own transpose are their own negative
                // and cancel in pairs, which xor-combining captures.
                let mut mirrors = [0u64; 64];
                let mut have = false;
                for sym in 0..4 {
                    let mut image = [0u64; 64];
                    for i in 0..h {
                        let src = if sym & 2 != 0 { hi_r - i } else { lo_r + i };
                        let mut bits = comp[src] >> lo_c;
                        if sym & 1 != 0 {
                            bits = bits.reverse_bits() >> (64 - w);
                        }
                        image[i] = bits;
                    }
                    if !have || image[..h] < mirrors[..h] {
                        mirrors[..h].copy_from_slice(&image[..h]);
                        have = true;
                    }
                }
                let mut trans = [0u64; 64];
                for i in 0..h {
                    let bits = comp[lo_r + i] >> lo_c;
                    let mut rest = bits;
                    while rest != 0 {
                        let c = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        trans[c] |= 1u64 << i;
                    }
                }
                let mut tbest = [0u64; 64];
                have = false;
                for sym in 0..4 {
                    let mut image = [0u64; 64];
                    for i in 0..w {
                        let src = if sym & 2 != 0 { w - 1 - i } else { i };
                        let mut bits = trans[src];
                        if sym & 1 != 0 {
                            bits = bits.reverse_bits() >> (64 - h);
                        }
                        image[i] = bits;
                    }
                    if !have || image[..w] < tbest[..w] {
                        tbest[..w].copy_from_slice(&image[..w]);
                        have = true;
                    }
                }
                let hash_shape = |rows: &[u64], w: usize, h: usize| -> u64 {
                    let mut hc = (w as u64) << 8 | h as u64;
                    for (i, &bits) in rows.iter().enumerate() {
                        hc = hc
                            .rotate_left(7)
                            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                            ^ bits
                            ^ cell_values[i];
                    }
                    crate::tt::mix64(hc)
                };
                let ord = if w == h {
                    mirrors[..h].cmp(&tbest[..h])
                } else if h < w {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                };
                // shapes are keyed with the flatter orientation (h <= w)
                // as positive so the choice is congruence-invariant
                match ord {
                    std::cmp::Ordering::Less => {
                        shapes = shapes.wrapping_add(hash_shape(&mirrors[..h], w, h));
                    }
                    std::cmp::Ordering::Greater => {
                        shapes = shapes.wrapping_sub(hash_shape(&tbest[..w], h, w));
                    }
                    std::cmp::Ordering::Equal => {
                        selfsame ^= hash_shape(&mirrors[..h], w, h);
                    }
                }
            }
        }
        Some((shapes ^ selfsame, net))
    }

    /// Per-player guaranteed-move totals, summed over the connected
    /// components of the empty area.
    ///
    /// Within one component the usual guarantee applies: the player can
    /// bank max(safe packing, total packing minus what the opponent can
    /// destroy there). Components are independent subgames, so the
    /// guarantees add — strictly sharper than the same bound on the whole
    /// board whenever components with different profiles coexist (one
    /// safe-heavy, another capacity-heavy). Returns (vertical,
    /// horizontal); None when a dimension exceeds 64.
    pub fn component_guarantees(&self) -> Option<(u32, u32)> {
        let (rows, cols) = (self.dims.rows as usize, self.dims.cols as usize);
        if rows > 64 || cols > 64 {
            return None;
        }
        let full = if cols == 64 { !0u64 } else { (1u64 << cols) - 1 };
        let mut empty = [0u64; 64];
        for r in 0..rows {
            empty[r] = !self.occupied.extract(r * cols, cols) & full;
        }
        let mut g_v: u32 = 0;
        let mut g_h: u32 = 0;
        let mut comp = [0u64; 64];
        let mut col = [0u64; 64];
        let mut shield_col = [0u64; 64];
        let mut cont_col = [0u64; 64];
        for seed_row in 0..rows {
            while empty[seed_row] != 0 {
                comp[..rows].fill(0);
                comp[seed_row] = empty[seed_row] & empty[seed_row].wrapping_neg();
                loop {
                    let mut changed = false;
                    for r in 0..rows {
                        let mut grow = comp[r];
                        grow |= (grow << 1) | (grow >> 1);
                        if r > 0 {
                            grow |= comp[r - 1];
                        }
                        if r + 1 < rows {
                            grow |= comp[r + 1];
                        }
                        grow &= empty[r];
                        if grow != comp[r] {
                            comp[r] = grow;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                let (mut lo_r, mut hi_r) = (usize::MAX, 0usize);
                for r in 0..rows {
                    empty[r] &= !comp[r];
                    if comp[r] != 0 {
                        lo_r = lo_r.min(r);
                        hi_r = hi_r.max(r);
                    }
                }
                // horizontal lines: H's runs, H's shielded cells (no
                // empty vertical neighbor), and the contested cells that
                // H's placements can destroy for V
                let (mut s_v, mut r_v, mut dmg_on_h, mut vul_v) = (0u32, 0u32, 0u32, 0u32);
                let (mut s_h, mut r_h, mut dmg_on_v, mut vul_h) = (0u32, 0u32, 0u32, 0u32);
                col[..cols].fill(0);
                shield_col[..cols].fill(0);
                cont_col[..cols].fill(0);
                for r in lo_r..=hi_r {
                    let row = comp[r];
                    if row == 0 {
                        continue;
                    }
                    let above = if r > lo_r { comp[r - 1] } else { 0 };
                    let below = if r < hi_r { comp[r + 1] } else { 0 };
                    let nb_h = (row << 1) | (row >> 1);
                    let nb_v = above | below;
                    let contested = row & nb_h & nb_v;
                    r_h += packed_run_sum(row);
                    s_h += packed_run_sum(row & !nb_v);
                    let mut x = row;
                    while x != 0 {
                        let lsb = x & x.wrapping_neg();
                        let run = x & (x ^ x.wrapping_add(lsb));
                        x &= !run;
                        let cap = run.count_ones() / 2;
                        if cap > 0 {
                            let cont = (run & contested).count_ones();
                            dmg_on_v += (2 * cap).min(cont);
                            vul_h += cap.min(cont);
                        }
                    }
                    // scatter this row into the column masks for the
                    // vertical pass
                    let shielded_v = row & !nb_h;
                    let mut rest = row;
                    while rest != 0 {
                        let c = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        let bit = 1u64 << r;
                        col[c] |= bit;
                        if shielded_v & (1u64 << c) != 0 {
                            shield_col[c] |= bit;
                        }
                        if contested & (1u64 << c) != 0 {
                            cont_col[c] |= bit;
                        }
                    }
                }
                for c in 0..cols {
                    let m = col[c];
                    if m == 0 {
                        continue;
                    }
                    r_v += packed_run_sum(m);
                    s_v += packed_run_sum(shield_col[c]);
                    let mut x = m;
                    while x != 0 {
                        let lsb = x & x.wrapping_neg();
                        let run = x & (x ^ x.wrapping_add(lsb));
                        x &= !run;
                        let cap = run.count_ones() / 2;
                        if cap > 0 {
                            let cont = (run & cont_col[c]).count_ones();
                            dmg_on_h += (2 * cap).min(cont);
                            vul_v += cap.min(cont);
                        }
                    }
                }
                // the loss each side can suffer is also capped by what
                // its own runs can possibly give up
                g_v += s_v.max(r_v.saturating_sub(dmg_on_v.min(vul_v)));
                g_h += s_h.max(r_h.saturating_sub(dmg_on_h.min(vul_h)));
            }
        }
        Some((g_v, g_h))
    }

    /// Smallest image of `occ` among the four symmetries of this board.
    pub fn canonicalize_occupancy(&self, occ: &CellSet) -> CellSet {
        let mut best = Self::transform_occ(self.dims, occ, Symmetry::Identity);
        for sym in [Symmetry::MirrorCols, Symmetry::MirrorRows, Symmetry::Rotate180] {
            let image = Self::transform_occ(self.dims, occ, sym);
            if image < best {
                best = image;
            }
        }
        best
    }

    /// Occupancy permuted by `sym`; dims unchanged.
    pub fn transform(&self, sym: Symmetry) -> Position {
        if sym == Symmetry::Identity {
            return *self;
        }
        Position::from_occupancy(self.dims, self.transform_occupancy(sym))
    }

    /// Smallest occupancy among the four symmetry images, with the symmetry
    /// that reaches it (ties broken by symmetry enum order).
    pub fn canonical_occupancy(&self) -> (CellSet, Symmetry) {
        let mut best = self.occupied;
        let mut best_sym = Symmetry::Identity;
        for sym in [Symmetry::MirrorCols, Symmetry::MirrorRows, Symmetry::Rotate180] {
            let image = self.transform_occupancy(sym);
            if image < best {
                best = image;
                best_sym = sym;
            }
        }
        (best, best_sym)
    }

    /// As `canonical_occupancy`, but materialized as a position.
    pub fn canonical(&self) -> (Position, Symmetry) {
        let (occ, sym) = self.canonical_occupancy();
        if sym == Symmetry::Identity {
            (*self, sym)
        } else {
            (Position::from_occupancy(self.dims, occ), sym)
        }
    }

    /// Maximal runs of empty cells in `player`'s orientation: per column
    /// for Vertical, per row for Horizontal. A run is protected when none
    /// of its cells has an empty perpendicular neighbor, so the opponent
    /// can never place into it.
    pub fn empty_runs(&self, player: Player) -> Vec<EmptyRun> {
        let mut runs = Vec::new();
        let (lines, line_len) = match player {
            Player::Vertical => (self.dims.cols, self.dims.rows),
            Player::Horizontal => (self.dims.rows, self.dims.cols),
        };
        for line in 0..lines {
            let mut start = 0u16;
            while start < line_len {
                if self.line_cell_occupied(player, line, start) {
                    start += 1;
                    continue;
                }
                let mut end = start;
                while end < line_len && !self.line_cell_occupied(player, line, end) {
                    end += 1;
                }
                let protected = (start..end).all(|pos| !self.has_empty_perp_neighbor(player, line, pos));
                runs.push(EmptyRun {
                    length: end - start,
                    protected,
                });
                start = end;
            }
        }
        runs
    }

    /// Line masks for `player`'s orientation: bit p of `masks[i]` is set
    /// when cell p of line i is empty. Lines are columns for Vertical
    /// (via the column-major mirror) and rows for Horizontal. Requires
    /// lines no longer than 64 cells; returns the line count.
    #[inline]
    fn empty_line_masks(&self, player: Player, masks: &mut [u64; MAX_CELLS]) -> (usize, usize) {
        let (lines, len, set) = match player {
            Player::Vertical => (self.dims.cols as usize, self.dims.rows as usize, &self.occupied_t),
            Player::Horizontal => (self.dims.rows as usize, self.dims.cols as usize, &self.occupied),
        };
        debug_assert!(len <= 64);
        let full = if len == 64 { !0u64 } else { (1u64 << len) - 1 };
        for (i, slot) in masks.iter_mut().enumerate().take(lines) {
            *slot = !set.extract(i * len, len) & full;
        }
        (lines, len)
    }

    /// The two counts the static analysis needs, `(safe, real)`:
    /// `real` sums floor(len/2) over all maximal empty runs in `player`'s
    /// orientation; `safe` sums floor(len/2) over maximal runs of
    /// *shielded* empty cells — cells with no empty perpendicular
    /// neighbor, which no opponent placement can ever cover. Counting
    /// shielded sub-runs rather than fully protected runs keeps the bound
    /// sound (shielding is monotone under play) while crediting partially
    /// exposed runs for their covered stretches.
    ///
    /// Runs are peeled off per line with carry tricks: adding the lowest
    /// set bit to the mask flips exactly the lowest run plus its stop bit.
    pub fn run_counts(&self, player: Player) -> (u32, u32, u32, u32) {
        let line_len = match player {
            Player::Vertical => self.dims.rows,
            Player::Horizontal => self.dims.cols,
        };
        if line_len > 64 {
            return self.run_counts_scalar(player);
        }
        let mut masks = [0u64; MAX_CELLS];
        let (lines, _) = self.empty_line_masks(player, &mut masks);
        let (mut safe, mut real, mut damage, mut vulnerable) = (0u32, 0u32, 0u32, 0u32);
        for i in 0..lines {
            let e = masks[i];
            if e == 0 {
                continue;
            }
            let before = if i > 0 { masks[i - 1] } else { 0 };
            let after = if i + 1 < lines { masks[i + 1] } else { 0 };
            safe += packed_run_sum(e & !(before | after));
            // Per maximal run: packing capacity, how much of the
            // opponent's capacity this player's moves inside the run can
            // ever destroy, and how much of this run's own capacity the
            // opponent can ever destroy. A placement covers two of the
            // run's cells and costs the other side at most 1 unit per
            // covered cell; only cells with an empty neighbor in both
            // orientations (contested cells, a shrinking set) can ever be
            // covered by the opponent or cost anything when covered. So
            // outgoing destruction is capped by twice the packing and the
            // contested count, and the run's own loss is capped by its
            // packing (it cannot drop below zero) and the contested count.
            let mut x = e;
            while x != 0 {
                let lsb = x & x.wrapping_neg();
                let run = x & (x ^ x.wrapping_add(lsb));
                let cap = run.count_ones() / 2;
                real += cap;
                if cap > 0 {
                    let contested = (run & (before | after)).count_ones();
                    damage += (2 * cap).min(contested);
                    vulnerable += cap.min(contested);
                }
                x &= !run;
            }
        }
        (safe, real, damage, vulnerable)
    }

    /// Per-cell fallback for boards whose lines exceed 64 cells.
    fn run_counts_scalar(&self, player: Player) -> (u32, u32, u32, u32) {
        let (mut safe, mut real, mut damage, mut vulnerable) = (0u32, 0u32, 0u32, 0u32);
        let (lines, line_len) = match player {
            Player::Vertical => (self.dims.cols, self.dims.rows),
            Player::Horizontal => (self.dims.rows, self.dims.cols),
        };
        for line in 0..lines {
            let (mut run, mut shielded_run, mut contested) = (0u32, 0u32, 0u32);
            for pos in 0..=line_len {
                if pos == line_len || self.line_cell_occupied(player, line, pos) {
                    let cap = run / 2;
                    real += cap;
                    safe += shielded_run / 2;
                    if cap > 0 {
                        damage += (2 * cap).min(contested);
                        vulnerable += cap.min(contested);
                    }
                    run = 0;
                    shielded_run = 0;
                    contested = 0;
                } else {
                    run += 1;
                    if self.has_empty_perp_neighbor(player, line, pos) {
                        safe += shielded_run / 2;
                        shielded_run = 0;
                        contested += 1;
                    } else {
                        shielded_run += 1;
                    }
                }
            }
        }
        (safe, real, damage, vulnerable)
    }

    /// Number of legal placements for `player`, without materializing
    /// them: empty cells whose successor along the line is also empty.
    pub fn count_moves(&self, player: Player) -> u32 {
        let line_len = match player {
            Player::Vertical => self.dims.rows,
            Player::Horizontal => self.dims.cols,
        };
        if line_len > 64 {
            return self.legal_moves(player).len() as u32;
        }
        let mut masks = [0u64; MAX_CELLS];
        let (lines, _) = self.empty_line_masks(player, &mut masks);
        (0..lines).map(|i| (masks[i] & (masks[i] >> 1)).count_ones()).sum()
    }

    #[inline]
    fn line_cell_occupied(&self, player: Player, line: u16, pos: u16) -> bool {
        match player {
            Player::Vertical => self.is_occupied(pos, line),
            Player::Horizontal => self.is_occupied(line, pos),
        }
    }

    #[inline]
    fn has_empty_perp_neighbor(&self, player: Player, line: u16, pos: u16) -> bool {
        match player {
            // Cell (pos, line): perpendicular neighbors are (pos, line±1).
            Player::Vertical => {
                (line > 0 && !self.is_occupied(pos, line - 1))
                    || (line + 1 < self.dims.cols && !self.is_occupied(pos, line + 1))
            }
            // Cell (line, pos): perpendicular neighbors are (line±1, pos).
            Player::Horizontal => {
                (line > 0 && !self.is_occupied(line - 1, pos))
                    || (line + 1 < self.dims.rows && !self.is_occupied(line + 1, pos))
            }
        }
    }

    /// Parse the text diagram format: one line per row, '.' empty, '#' occupied.
    pub fn parse_diagram(text: &str) -> Result<Position, DomineeringError> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if lines.is_empty() {
            return Err(DomineeringError::Diagram("empty diagram".into()));
        }
        let rows = lines.len() as u16;
        let cols = lines[0].trim().len() as u16;
        let dims = BoardDims::new(rows, cols)?;
        let mut occ = CellSet::EMPTY;
        for (r, line) in lines.iter().enumerate() {
            let line = line.trim();
            if line.len() != cols as usize {
                return Err(DomineeringError::Diagram(format!("row {} has length {}, expected {}", r, line.len(), cols)));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '.' => {}
                    '#' => occ.set(r * cols as usize + c),
                    other => {
                        return Err(DomineeringError::Diagram(format!("unexpected character '{}' at row {}, col {}", other, r, c)))
                    }
                }
            }
        }
        Ok(Position::from_occupancy(dims, occ))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dims.rows {
            for c in 0..self.dims.cols {
                write!(f, "{}", if self.is_occupied(r, c) { '#' } else { '.' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Sum of floor(len/2) over the maximal runs of set bits in `mask`.
#[inline]
fn packed_run_sum(mut mask: u64) -> u32 {
    let mut total = 0;
    while mask != 0 {
        let lsb = mask & mask.wrapping_neg();
        let run = mask & (mask ^ mask.wrapping_add(lsb));
        total += run.count_ones() / 2;
        mask &= !run;
    }
    total
}

/// A maximal empty run in one orientation.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct EmptyRun {
    pub length: u16,
    pub protected: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(r: u16, c: u16) -> BoardDims {
        BoardDims::new(r, c).unwrap()
    }

    #[test]
    fn new_position_within_capacity() {
        let p = Position::empty(dims(2, 2));
        assert_eq!(p.empty_cells(), 4);
        let p = Position::empty(dims(1, 1));
        assert_eq!(p.empty_cells(), 1);
    }

    #[test]
    fn new_position_over_capacity() {
        assert!(BoardDims::new(16, 17).is_err());
        assert!(BoardDims::new(0, 5).is_err());
        assert!(BoardDims::new(16, 16).is_ok());
    }

    #[test]
    fn legal_moves_counts() {
        let p = Position::empty(dims(2, 2));
        let v = p.legal_moves(Player::Vertical);
        assert_eq!(v.len(), 2);
        assert_eq!(v[0], Move::new(Player::Vertical, 0, 0));
        assert_eq!(v[1], Move::new(Player::Vertical, 0, 1));

        let p = Position::empty(dims(1, 3));
        assert!(p.legal_moves(Player::Vertical).is_empty());

        let p = Position::empty(dims(3, 3));
        assert_eq!(p.legal_moves(Player::Horizontal).len(), 6);
    }

    #[test]
    fn apply_move_fills_cells() {
        let p = Position::empty(dims(2, 1));
        let q = p.apply_move(Move::new(Player::Vertical, 0, 0)).unwrap();
        assert_eq!(q.empty_cells(), 0);

        let p = Position::empty(dims(2, 2));
        let q = p.apply_move(Move::new(Player::Vertical, 0, 0)).unwrap();
        assert!(q.is_occupied(0, 0) && q.is_occupied(1, 0));
        assert!(!q.is_occupied(0, 1) && !q.is_occupied(1, 1));

        let p = Position::empty(dims(1, 2));
        assert!(p.apply_move(Move::new(Player::Vertical, 0, 0)).is_err());
    }

    #[test]
    fn undo_round_trips() {
        let p = Position::empty(dims(2, 2));
        let m = Move::new(Player::Vertical, 0, 0);
        assert_eq!(p.apply_move(m).unwrap().undo_move(m).unwrap(), p);

        assert!(p.undo_move(m).is_err());

        let m1 = Move::new(Player::Vertical, 0, 0);
        let m2 = Move::new(Player::Vertical, 0, 1);
        let after_m1 = p.apply_move(m1).unwrap();
        let both = after_m1.apply_move(m2).unwrap();
        assert_eq!(both.undo_move(m2).unwrap(), after_m1);
    }

    #[test]
    fn transform_examples() {
        let p = Position::empty(dims(2, 3))
            .apply_move(Move::new(Player::Vertical, 0, 0))
            .unwrap()
            .undo_move(Move::new(Player::Vertical, 0, 0))
            .unwrap();
        assert_eq!(p.transform(Symmetry::Identity), p);

        // single cell via diagram
        let p = Position::parse_diagram("#..\n...").unwrap();
        let mc = p.transform(Symmetry::MirrorCols);
        assert!(mc.is_occupied(0, 2));
        assert_eq!(mc.occupied().count(), 1);
        let rot = p.transform(Symmetry::Rotate180);
        assert!(rot.is_occupied(1, 2));
    }

    #[test]
    fn transform_involutions() {
        let p = Position::parse_diagram("#.#\n.#.\n...").unwrap();
        for sym in [Symmetry::MirrorCols, Symmetry::MirrorRows, Symmetry::Rotate180] {
            assert_eq!(p.transform(sym).transform(sym), p);
        }
        assert_eq!(
            p.transform(Symmetry::MirrorRows).transform(Symmetry::MirrorCols),
            p.transform(Symmetry::Rotate180)
        );
    }

    #[test]
    fn canonical_constant_on_orbit() {
        let empty = Position::empty(dims(3, 3));
        let (canon, sym) = empty.canonical();
        assert_eq!(canon, empty);
        assert_eq!(sym, Symmetry::Identity);

        let col0 = Position::parse_diagram("#.\n#.").unwrap();
        let col1 = Position::parse_diagram(".#\n.#").unwrap();
        assert_eq!(col0.canonical().0, col1.canonical().0);

        let p = Position::parse_diagram("..#\n.#.\n#..").unwrap();
        for sym in Symmetry::ALL {
            assert_eq!(p.transform(sym).canonical().0, p.canonical().0);
        }
        assert_eq!(p.canonical().0.canonical().1, Symmetry::Identity);
    }

    #[test]
    fn empty_runs_protection() {
        let p = Position::empty(dims(1, 5));
        let runs = p.empty_runs(Player::Horizontal);
        assert_eq!(runs, vec![EmptyRun { length: 5, protected: true }]);

        let p = Position::empty(dims(2, 2));
        let runs = p.empty_runs(Player::Vertical);
        assert_eq!(runs.len(), 2);
        assert!(runs.iter().all(|r| r.length == 2 && !r.protected));

        let p = Position::parse_diagram(".#.\n.#.\n.#.").unwrap();
        let runs = p.empty_runs(Player::Vertical);
        assert_eq!(runs, vec![
            EmptyRun { length: 3, protected: true },
            EmptyRun { length: 3, protected: true },
        ]);
    }

    #[test]
    fn diagram_round_trip() {
        let text = "#..\n.#.\n..#\n";
        let p = Position::parse_diagram(text).unwrap();
        assert_eq!(p.to_string(), text);
        assert!(Position::parse_diagram("#.\n#x").is_err());
    }

    #[test]
    fn move_counts_invariant_under_symmetry() {
        let p = Position::parse_diagram("#...\n..#.\n....").unwrap();
        for sym in Symmetry::ALL {
            for player in [Player::Vertical, Player::Horizontal] {
                assert_eq!(
                    p.transform(sym).legal_moves(player).len(),
                    p.legal_moves(player).len()
                );
            }
        }
    }
}
