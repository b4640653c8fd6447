//! Seeded position generators for tests, corpora and benchmarks.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::board::{board_mask, Move, Position};

/// Plays uniformly random legal moves from the initial position until
/// exactly `empties` squares remain. Returns `None` if the game ended first.
pub fn random_playout_to<R: Rng + ?Sized>(rng: &mut R, size: usize, empties: u32) -> Option<Position> {
    let mut p = Position::initial(size).ok()?;
    while p.empties() > empties {
        let moves = p.legal_moves();
        if moves.is_empty() {
            if !p.pass().has_moves() {
                return None;
            }
            p = p.pass();
            continue;
        }
        let mv = *moves.choose(rng).expect("non-empty");
        p = p.apply_move(mv).expect("generated move is legal");
    }
    Some(p)
}

/// A reachable position whose empty count is drawn from `empties`. Retries
/// playouts that end early; after many failures the last terminal position
/// reached is returned instead.
pub fn random_position<R: Rng + ?Sized>(rng: &mut R, size: usize, empties: RangeInclusive<usize>) -> Position {
    let mut fallback = Position::initial(size).expect("supported size");
    for _ in 0..1000 {
        let target = rng.gen_range(empties.clone()) as u32;
        if let Some(p) = random_playout_to(rng, size, target) {
            return p;
        }
        fallback = random_game_end(rng, size);
    }
    fallback
}

/// A reachable, non-terminal position with exactly `empties` empty squares.
pub fn random_live_position<R: Rng + ?Sized>(rng: &mut R, size: usize, empties: u32) -> Position {
    loop {
        if let Some(p) = random_playout_to(rng, size, empties) {
            if !p.is_terminal() {
                return p;
            }
        }
    }
}

fn random_game_end<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Position {
    let mut p = Position::initial(size).expect("supported size");
    loop {
        let moves = p.legal_moves();
        if moves.is_empty() {
            if !p.pass().has_moves() {
                return p;
            }
            p = p.apply_move(Move::Pass).expect("pass is legal");
            continue;
        }
        p = p.apply_move(*moves.choose(rng).expect("non-empty")).expect("legal");
    }
}

/// Arbitrary stone placement, not necessarily reachable in play: each square
/// is independently empty, mover or opponent.
pub fn random_masks<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Position {
    let mask = board_mask(size as u8);
    let a = rng.gen::<u64>() & mask;
    let b = rng.gen::<u64>() & mask;
    let fill = rng.gen::<u64>() | rng.gen::<u64>();
    let occupied = (a | b) & fill;
    let mover = occupied & a;
    let opponent = occupied & !a;
    Position::from_masks(mover, opponent, size).expect("disjoint, on-board masks")
}
