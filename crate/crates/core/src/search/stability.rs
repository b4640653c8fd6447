//! Stones that can never be flipped again, used to bound the final score.

use crate::board::{board_mask, shift, Position, Score};

/// Direction pairs of `board::shift` forming the four lines through a square.
const AXES: [(usize, usize); 4] = [(0, 1), (2, 3), (4, 7), (5, 6)];

/// Stones of `own` that no sequence of moves can flip. For each of the four
/// lines through a stone, either the line is full or one of its two
/// neighbours on that line is the board edge or another stable stone of the
/// same colour.
pub fn stable_stones(own: u64, opponent: u64, size: u8) -> u64 {
    let board = board_mask(size);
    let filled = (own | opponent) & board;
    let mut blocked = [0u64; 4];
    for (i, &(d, e)) in AXES.iter().enumerate() {
        let edge_d = board & !shift(board, e);
        let edge_e = board & !shift(board, d);
        let mut full_d = filled & edge_d;
        let mut full_e = filled & edge_e;
        for _ in 0..7 {
            full_d |= filled & shift(full_d, e);
            full_e |= filled & shift(full_e, d);
        }
        blocked[i] = (full_d & full_e) | edge_d | edge_e;
    }
    let mut stable = 0u64;
    loop {
        let mut next = own & board;
        for (i, &(d, e)) in AXES.iter().enumerate() {
            next &= blocked[i] | shift(stable, d) | shift(stable, e);
        }
        if next == stable {
            return stable;
        }
        stable = next;
    }
}

/// Highest final score the mover can still reach given the opponent's stable
/// stones.
#[inline]
pub fn score_ceiling(p: &Position) -> Score {
    let stable = stable_stones(p.opponent(), p.mover(), p.size()).count_ones() as Score;
    p.max_score() - 2 * stable
}
