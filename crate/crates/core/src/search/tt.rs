//! Transposition table keyed by the canonical position.
//!
//! Entries keep the canonical masks next to the hash so a probe never
//! returns data for a different position. Best moves are stored in
//! canonical coordinates and mapped back through the inverse symmetry on
//! lookup.

use crate::board::{Move, Position, Score, Square};
use crate::bounds::SolveBounds;
use crate::symmetry::{canonicalize, raw_hash, SymmetryTransform};

const NO_MOVE: u8 = u8::MAX;

/// Cached search result for one canonical position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranspositionEntry {
    pub key: u64,
    pub depth: u32,
    pub bounds: SolveBounds,
    /// Best move in the coordinates of the probed (not canonical) position.
    pub best_move: Option<Move>,
    pub generation: u8,
}

#[derive(Clone, Copy, Debug, Default)]
struct Slot {
    used: bool,
    key: u64,
    mover: u64,
    opponent: u64,
    lower: i16,
    upper: i16,
    depth: u8,
    best: u8,
    generation: u8,
}

/// Handle produced by [`TranspositionTable::locate`]: the canonical image of a
/// position, its hash and the symmetry that maps the position onto it.
#[derive(Clone, Copy, Debug)]
pub struct Probe {
    pub key: u64,
    canonical: Position,
    transform: SymmetryTransform,
}

pub struct TranspositionTable {
    slots: Vec<Slot>,
    mask: u64,
    generation: u8,
}

impl TranspositionTable {
    /// A table with `2^size_log2` slots; zero disables caching entirely.
    pub fn new(size_log2: u32) -> Self {
        let slots = if size_log2 == 0 { Vec::new() } else { vec![Slot::default(); 1usize << size_log2] };
        let mask = if size_log2 == 0 { 0 } else { (1u64 << size_log2) - 1 };
        TranspositionTable {
            slots,
            mask,
            generation: 0,
        }
    }

    #[inline]
    pub fn is_enabled(&self) -> bool {
        !self.slots.is_empty()
    }

    pub fn new_generation(&mut self) {
        self.generation = self.generation.wrapping_add(1);
    }

    pub fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = Slot::default());
        self.generation = 0;
    }

    #[inline]
    pub fn locate(&self, p: &Position) -> Probe {
        let (canonical, transform) = canonicalize(p);
        Probe {
            key: raw_hash(&canonical),
            canonical,
            transform,
        }
    }

    pub fn probe(&self, probe: &Probe) -> Option<TranspositionEntry> {
        if !self.is_enabled() {
            return None;
        }
        let slot = &self.slots[(probe.key & self.mask) as usize];
        if !slot.used
            || slot.key != probe.key
            || slot.mover != probe.canonical.mover()
            || slot.opponent != probe.canonical.opponent()
        {
            return None;
        }
        let size = probe.canonical.size();
        let best_move = (slot.best != NO_MOVE).then(|| {
            let sq = Square::from_bit_index(slot.best);
            Move::Place(probe.transform.inverse().apply_square(sq, size))
        });
        Some(TranspositionEntry {
            key: slot.key,
            depth: slot.depth as u32,
            bounds: SolveBounds {
                lower: slot.lower as Score,
                upper: slot.upper as Score,
            },
            best_move,
            generation: slot.generation,
        })
    }

    /// Depth-preferred replacement; entries from an older generation are
    /// always replaceable. Results for the same position at the same depth
    /// are intersected.
    pub fn store(&mut self, probe: &Probe, depth: u32, bounds: SolveBounds, best_move: Option<Move>) {
        if !self.is_enabled() {
            return;
        }
        let generation = self.generation;
        let size = probe.canonical.size();
        let slot = &mut self.slots[(probe.key & self.mask) as usize];
        let same = slot.used
            && slot.key == probe.key
            && slot.mover == probe.canonical.mover()
            && slot.opponent == probe.canonical.opponent();
        let depth = depth.min(u8::MAX as u32) as u8;
        if slot.used && !same && slot.generation == generation && depth < slot.depth {
            return;
        }
        let mut bounds = bounds;
        if same && slot.depth == depth {
            let old = SolveBounds {
                lower: slot.lower as Score,
                upper: slot.upper as Score,
            };
            if let Some(tighter) = old.intersect(&bounds) {
                bounds = tighter;
            }
        } else if same && slot.depth > depth {
            return;
        }
        let best = match best_move {
            Some(Move::Place(sq)) => probe.transform.apply_square(sq, size).bit_index(),
            _ => {
                if same {
                    slot.best
                } else {
                    NO_MOVE
                }
            }
        };
        *slot = Slot {
            used: true,
            key: probe.key,
            mover: probe.canonical.mover(),
            opponent: probe.canonical.opponent(),
            lower: bounds.lower as i16,
            upper: bounds.upper as i16,
            depth,
            best,
            generation,
        };
    }
}
