//! Dihedral symmetries of the board, canonical forms and position hashing.

use crate::board::{Move, Position, Square};

/// One of the eight symmetries of the square, applied as an optional
/// transpose about the main diagonal, then an optional vertical flip
/// (row order reversed), then an optional horizontal mirror.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymmetryTransform {
    transpose: bool,
    flip_vertical: bool,
    mirror_horizontal: bool,
}

impl SymmetryTransform {
    pub const IDENTITY: SymmetryTransform = SymmetryTransform::new(false, false, false);

    pub const ALL: [SymmetryTransform; 8] = [
        SymmetryTransform::new(false, false, false),
        SymmetryTransform::new(false, false, true),
        SymmetryTransform::new(false, true, false),
        SymmetryTransform::new(false, true, true),
        SymmetryTransform::new(true, false, false),
        SymmetryTransform::new(true, false, true),
        SymmetryTransform::new(true, true, false),
        SymmetryTransform::new(true, true, true),
    ];

    pub const fn new(transpose: bool, flip_vertical: bool, mirror_horizontal: bool) -> Self {
        SymmetryTransform {
            transpose,
            flip_vertical,
            mirror_horizontal,
        }
    }

    pub fn inverse(self) -> SymmetryTransform {
        // Transposition conjugates a vertical flip into a horizontal mirror.
        if self.transpose {
            SymmetryTransform::new(true, self.mirror_horizontal, self.flip_vertical)
        } else {
            self
        }
    }

    #[inline]
    pub fn apply_mask(self, mut x: u64, size: u8) -> u64 {
        if self.transpose {
            x = transpose(x);
        }
        if self.flip_vertical {
            x = x.swap_bytes() >> (8 * (8 - size as u32));
        }
        if self.mirror_horizontal {
            x = mirror_bytes(x) >> (8 - size as u32);
        }
        x
    }

    pub fn apply_square(self, sq: Square, size: u8) -> Square {
        Square::from_bit_index(self.apply_mask(sq.bit(), size).trailing_zeros() as u8)
    }

    pub fn apply_move(self, mv: Move, size: u8) -> Move {
        match mv {
            Move::Place(sq) => Move::Place(self.apply_square(sq, size)),
            Move::Pass => Move::Pass,
        }
    }

    pub fn apply(self, p: &Position) -> Position {
        let size = p.size();
        Position::from_masks_unchecked(
            self.apply_mask(p.mover(), size),
            self.apply_mask(p.opponent(), size),
            size,
        )
    }
}

#[inline]
fn transpose(mut x: u64) -> u64 {
    const K1: u64 = 0x5500_5500_5500_5500;
    const K2: u64 = 0x3333_0000_3333_0000;
    const K4: u64 = 0x0F0F_0F0F_0000_0000;
    let mut t = K4 & (x ^ (x << 28));
    x ^= t ^ (t >> 28);
    t = K2 & (x ^ (x << 14));
    x ^= t ^ (t >> 14);
    t = K1 & (x ^ (x << 7));
    x ^= t ^ (t >> 7);
    x
}

#[inline]
fn mirror_bytes(mut x: u64) -> u64 {
    x = ((x >> 1) & 0x5555_5555_5555_5555) | ((x & 0x5555_5555_5555_5555) << 1);
    x = ((x >> 2) & 0x3333_3333_3333_3333) | ((x & 0x3333_3333_3333_3333) << 2);
    ((x >> 4) & 0x0F0F_0F0F_0F0F_0F0F) | ((x & 0x0F0F_0F0F_0F0F_0F0F) << 4)
}

/// Smallest `(mover, opponent)` pair over the eight images of `p`, with the
/// transform that produced it.
pub fn canonicalize(p: &Position) -> (Position, SymmetryTransform) {
    let size = p.size();
    let mut best = (p.mover(), p.opponent());
    let mut best_t = SymmetryTransform::IDENTITY;
    for t in &SymmetryTransform::ALL[1..] {
        let image = (t.apply_mask(p.mover(), size), t.apply_mask(p.opponent(), size));
        if image < best {
            best = image;
            best_t = *t;
        }
    }
    (Position::from_masks_unchecked(best.0, best.1, size), best_t)
}

pub fn canonical(p: &Position) -> Position {
    canonicalize(p).0
}

const HASH_SEED: u64 = 0x0DDB_1A5E_5BAD_5EED;

const fn splitmix64(state: u64) -> (u64, u64) {
    let state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (state, z ^ (z >> 31))
}

/// Per-square keys for (occupant, square), then one key per board size.
const SQUARE_KEYS: [[u64; 64]; 2] = {
    let mut keys = [[0u64; 64]; 2];
    let mut state = HASH_SEED;
    let mut side = 0;
    while side < 2 {
        let mut sq = 0;
        while sq < 64 {
            let (next, key) = splitmix64(state);
            state = next;
            keys[side][sq] = key;
            sq += 1;
        }
        side += 1;
    }
    keys
};

const SIZE_KEYS: [u64; 3] = {
    let (s1, k1) = splitmix64(!HASH_SEED);
    let (s2, k2) = splitmix64(s1);
    let (_, k3) = splitmix64(s2);
    [k1, k2, k3]
};

/// Byte-chunk tabulation tables: entry `[side][byte][value]` is the XOR of
/// the square keys for the bits set in `value` at that byte.
static BYTE_TABLES: [[[u64; 256]; 8]; 2] = {
    let mut tables = [[[0u64; 256]; 8]; 2];
    let mut side = 0;
    while side < 2 {
        let mut byte = 0;
        while byte < 8 {
            let mut value = 0;
            while value < 256 {
                let mut acc = 0u64;
                let mut bit = 0;
                while bit < 8 {
                    if value & (1 << bit) != 0 {
                        acc ^= SQUARE_KEYS[side][byte * 8 + bit];
                    }
                    bit += 1;
                }
                tables[side][byte][value] = acc;
                value += 1;
            }
            byte += 1;
        }
        side += 1;
    }
    tables
};

/// Tabulation hash of the exact masks given (no canonicalisation).
#[inline]
pub fn raw_hash(p: &Position) -> u64 {
    let mut h = SIZE_KEYS[(p.size() as usize / 2) - 2];
    let (m, o) = (p.mover().to_le_bytes(), p.opponent().to_le_bytes());
    for i in 0..8 {
        h ^= BYTE_TABLES[0][i][m[i] as usize] ^ BYTE_TABLES[1][i][o[i] as usize];
    }
    h
}

/// Symmetry-invariant 64-bit key: the tabulation hash of the canonical form.
pub fn position_hash(p: &Position) -> u64 {
    raw_hash(&canonical(p))
}

/// Per-square reference hash used to check the byte tables.
#[cfg(test)]
fn square_hash(p: &Position) -> u64 {
    let mut h = SIZE_KEYS[(p.size() as usize / 2) - 2];
    for sq in crate::board::squares(p.mover()) {
        h ^= SQUARE_KEYS[0][sq.bit_index() as usize];
    }
    for sq in crate::board::squares(p.opponent()) {
        h ^= SQUARE_KEYS[1][sq.bit_index() as usize];
    }
    h
}
