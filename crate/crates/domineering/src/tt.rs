//! Transposition table keyed on canonical positions.
//!
//! Keys identify positions up to game equivalence, not just up to
//! picture equality: the hash combines the multiset of canonicalized
//! empty-area components with the net reserve capacity and the side to
//! move (see `Position::component_signature`), so symmetric variants and
//! positions with rearranged-but-equivalent subgames share one entry.
//! Two replacement schemes are supported: one-level Deep (keep the entry
//! with the larger proof work) and two-level TwoBig (always store the
//! newest, overwriting the less important entry).

use crate::board::{Player, Position, MAX_CELLS};

/// Default Zobrist seed; published so node counts are reproducible.
pub const DEFAULT_SEED: u64 = 0x00D0_711E_E517_B0A5;

/// Replacement scheme selector.
#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ReplacementScheme {
    Deep,
    TwoBig,
}

/// Table configuration: 2^index_bits buckets plus the scheme.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TTConfig {
    pub index_bits: u8,
    pub scheme: ReplacementScheme,
}

impl TTConfig {
    pub fn new(index_bits: u8, scheme: ReplacementScheme) -> TTConfig {
        assert!((10..=30).contains(&index_bits), "index_bits must be in 10..=30");
        TTConfig { index_bits, scheme }
    }
}

impl Default for TTConfig {
    fn default() -> Self {
        TTConfig {
            index_bits: 22,
            scheme: ReplacementScheme::Deep,
        }
    }
}

/// 64-bit key of (component signature, dims, side to move).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct TTKey(pub u64);

/// A proven result. Results are exact: the game is boolean win/loss.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TTEntry {
    pub verify: u32,
    pub result: Player,
    pub work: u32,
}

fn splitmix64(x: u64) -> u64 {
    mix64(x)
}

/// One round of splitmix64 finalization; shared with board-level hashing.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Zobrist basis: one value per cell index plus one side-to-move value.
#[derive(Clone)]
pub struct ZobristBasis {
    pub cells: [u64; MAX_CELLS],
    pub side: u64,
}

impl ZobristBasis {
    /// Deterministic basis from a seed: same seed, same basis.
    pub fn new(seed: u64) -> ZobristBasis {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            splitmix64(state)
        };
        let mut cells = [0u64; MAX_CELLS];
        for slot in cells.iter_mut() {
            *slot = next();
        }
        let side = next();
        ZobristBasis { cells, side }
    }

    /// Hash of the canonical form of `pos` with `to_move` to play.
    /// Invariant under all four board symmetries by construction.
    pub fn hash(&self, pos: &Position, to_move: Player) -> TTKey {
        let (base, net) = self.hash_base(pos, to_move);
        Self::key_at(base, net)
    }

    /// Hash split into the reserve-independent part and the net reserve
    /// capacity. Keying on the reserve-collapsed core rather than the raw
    /// occupancy lets positions agreeing on the core and on the net
    /// reserve capacity share one entry; keeping the net separate lets
    /// the search form keys for neighboring net values with one xor.
    pub fn hash_base(&self, pos: &Position, to_move: Player) -> (u64, i32) {
        let mut h = splitmix64((pos.dims().rows as u64) << 16 | pos.dims().cols as u64);
        let net = match pos.component_signature(&self.cells) {
            Some((shapes, net)) => {
                h = h.wrapping_add(shapes);
                net
            }
            // Boards wider or taller than 64 fall back to hashing the
            // reserve-collapsed canonical occupancy.
            None => {
                let (core, net) = pos.reserve_core();
                let canon = pos.canonicalize_occupancy(&core);
                for idx in canon.iter() {
                    h ^= self.cells[idx];
                }
                net
            }
        };
        if to_move == Player::Horizontal {
            h ^= self.side;
        }
        (h, net)
    }

    /// Full key for a given base and net reserve capacity.
    pub fn key_at(base: u64, net: i32) -> TTKey {
        TTKey(base ^ splitmix64(0x5EED_0000_0000_0000u64.wrapping_add(net as i64 as u64)))
    }
}

enum Buckets {
    Deep(Vec<Option<TTEntry>>),
    TwoBig(Vec<[Option<TTEntry>; 2]>),
}

/// The table itself. One instance is owned by one solve.
pub struct TranspositionTable {
    buckets: Buckets,
    index_mask: u64,
    index_bits: u8,
}

impl TranspositionTable {
    pub fn new(cfg: TTConfig) -> TranspositionTable {
        let len = 1usize << cfg.index_bits;
        let buckets = match cfg.scheme {
            ReplacementScheme::Deep => Buckets::Deep(vec![None; len]),
            ReplacementScheme::TwoBig => Buckets::TwoBig(vec![[None; 2]; len]),
        };
        TranspositionTable {
            buckets,
            index_mask: (len - 1) as u64,
            index_bits: cfg.index_bits,
        }
    }

    #[inline]
    fn index(&self, key: TTKey) -> usize {
        (key.0 & self.index_mask) as usize
    }

    #[inline]
    fn verify_bits(&self, key: TTKey) -> u32 {
        // high 32 bits, disjoint from the index for index_bits <= 30
        (key.0 >> 32) as u32
    }

    pub fn probe(&self, key: TTKey) -> Option<TTEntry> {
        let idx = self.index(key);
        let verify = self.verify_bits(key);
        match &self.buckets {
            Buckets::Deep(slots) => slots[idx].filter(|e| e.verify == verify),
            Buckets::TwoBig(slots) => slots[idx]
                .iter()
                .flatten()
                .find(|e| e.verify == verify)
                .copied(),
        }
    }

    pub fn store(&mut self, key: TTKey, result: Player, work: u32) {
        let idx = self.index(key);
        let entry = TTEntry {
            verify: self.verify_bits(key),
            result,
            work,
        };
        match &mut self.buckets {
            Buckets::Deep(slots) => {
                // keep the larger proof; the newest wins ties
                match slots[idx] {
                    Some(old) if old.work > entry.work => {}
                    _ => slots[idx] = Some(entry),
                }
            }
            Buckets::TwoBig(slots) => {
                let pair = &mut slots[idx];
                // refresh in place if the same key is already present
                if let Some(slot) = pair.iter_mut().flatten().find(|e| e.verify == entry.verify) {
                    *slot = entry;
                    return;
                }
                let target = match (pair[0], pair[1]) {
                    (None, _) => 0,
                    (_, None) => 1,
                    (Some(a), Some(b)) => {
                        if a.work < b.work {
                            0
                        } else {
                            1
                        }
                    }
                };
                pair[target] = Some(entry);
            }
        }
    }

    pub fn index_bits(&self) -> u8 {
        self.index_bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{BoardDims, Position, Symmetry};

    #[test]
    fn basis_is_deterministic() {
        let a = ZobristBasis::new(42);
        let b = ZobristBasis::new(42);
        assert_eq!(a.cells[..], b.cells[..]);
        assert_eq!(a.side, b.side);

        let c = ZobristBasis::new(43);
        assert!(a.cells.iter().zip(c.cells.iter()).any(|(x, y)| x != y));
    }

    #[test]
    fn hash_is_symmetry_invariant() {
        let basis = ZobristBasis::new(DEFAULT_SEED);
        let p = Position::parse_diagram("#..\n.#.\n...").unwrap();
        let base = basis.hash(&p, Player::Vertical);
        for sym in Symmetry::ALL {
            assert_eq!(basis.hash(&p.transform(sym), Player::Vertical), base);
        }
    }

    #[test]
    fn hash_separates_side_and_dims() {
        let basis = ZobristBasis::new(DEFAULT_SEED);
        let p = Position::empty(BoardDims::new(2, 2).unwrap());
        assert_ne!(basis.hash(&p, Player::Vertical), basis.hash(&p, Player::Horizontal));
        let q = Position::empty(BoardDims::new(2, 3).unwrap());
        assert_ne!(basis.hash(&p, Player::Vertical), basis.hash(&q, Player::Vertical));
    }

    #[test]
    fn probe_fresh_table_misses() {
        let tt = TranspositionTable::new(TTConfig::new(10, ReplacementScheme::Deep));
        assert!(tt.probe(TTKey(0xDEAD_BEEF)).is_none());
    }

    #[test]
    fn store_probe_round_trip() {
        for scheme in [ReplacementScheme::Deep, ReplacementScheme::TwoBig] {
            let mut tt = TranspositionTable::new(TTConfig::new(10, scheme));
            let key = TTKey(0x1234_5678_9ABC_DEF0);
            tt.store(key, Player::Vertical, 7);
            let hit = tt.probe(key).unwrap();
            assert_eq!(hit.result, Player::Vertical);
            assert_eq!(hit.work, 7);
        }
    }

    #[test]
    fn verify_rejects_colliding_index() {
        let mut tt = TranspositionTable::new(TTConfig::new(10, ReplacementScheme::Deep));
        let k1 = TTKey(0x0000_0001_0000_0155);
        let k2 = TTKey(0x0000_0002_0000_0155); // same low 10 bits, different verify
        tt.store(k1, Player::Vertical, 1);
        assert!(tt.probe(k2).is_none());
    }

    #[test]
    fn deep_keeps_larger_work() {
        let mut tt = TranspositionTable::new(TTConfig::new(10, ReplacementScheme::Deep));
        let k1 = TTKey(0x0000_0001_0000_0000);
        let k2 = TTKey(0x0000_0002_0000_0000);
        tt.store(k1, Player::Vertical, 100);
        tt.store(k2, Player::Horizontal, 50);
        assert_eq!(tt.probe(k1).unwrap().work, 100);
        assert!(tt.probe(k2).is_none());

        let k3 = TTKey(0x0000_0003_0000_0000);
        tt.store(k3, Player::Horizontal, 150);
        assert_eq!(tt.probe(k3).unwrap().work, 150);
        assert!(tt.probe(k1).is_none());
    }

    #[test]
    fn twobig_always_stores_newest() {
        let mut tt = TranspositionTable::new(TTConfig::new(10, ReplacementScheme::TwoBig));
        let k_big = TTKey(0x0000_0001_0000_0000);
        let k_small = TTKey(0x0000_0002_0000_0000);
        let k_new = TTKey(0x0000_0003_0000_0000);
        tt.store(k_big, Player::Vertical, 100);
        tt.store(k_small, Player::Vertical, 40);
        tt.store(k_new, Player::Horizontal, 10);
        // newest overwrote the smaller-work entry
        assert_eq!(tt.probe(k_big).unwrap().work, 100);
        assert!(tt.probe(k_small).is_none());
        assert_eq!(tt.probe(k_new).unwrap().work, 10);
    }
}
