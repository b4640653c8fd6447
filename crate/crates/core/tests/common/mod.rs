#![allow(dead_code)]

use std::collections::BTreeSet;

use othello_core::frontier::BoundDictionary;
use othello_core::search::oracle::naive_oracle;
use othello_core::symmetry::canonical;
use othello_core::{Position, SolveBounds};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// First positions at or below `e` empties with a move available, reached
/// from `p` through interior play and passes, in canonical form.
pub fn frontier_positions(p: &Position, e: u32) -> BTreeSet<Position> {
    let mut out = BTreeSet::new();
    walk(p, e, &mut out);
    out
}

fn walk(p: &Position, e: u32, out: &mut BTreeSet<Position>) {
    if !p.has_moves() {
        let passed = p.pass();
        if passed.has_moves() {
            walk(&passed, e, out);
        }
        return;
    }
    if p.empties() <= e {
        out.insert(canonical(p));
        return;
    }
    for mv in p.legal_moves() {
        walk(&p.apply_move(mv).unwrap(), e, out);
    }
}

/// Exact brute-force values for every frontier position under `p`.
pub fn oracle_dictionary(p: &Position, e2: u32) -> BoundDictionary {
    frontier_positions(p, e2)
        .into_iter()
        .map(|f| (f, SolveBounds::exact(naive_oracle(&f).unwrap())))
        .collect()
}

/// Follows a principal line from `p` down to the `e2` frontier. Returns the
/// frontier position and whether the root's mover is the side to move
/// there, or `None` when the game ends first or the root's side has two
/// equally good moves somewhere on the line.
pub fn unique_principal_frontier(p: &Position, e2: u32) -> Option<(Position, bool)> {
    fn go(p: &Position, e2: u32, root_turn: bool) -> Option<(Position, bool)> {
        if !p.has_moves() {
            let passed = p.pass();
            if !passed.has_moves() {
                return None;
            }
            return go(&passed, e2, !root_turn);
        }
        if p.empties() <= e2 {
            return Some((*p, root_turn));
        }
        let mut values: Vec<(i32, Position)> = p
            .legal_moves()
            .into_iter()
            .map(|mv| {
                let c = p.apply_move(mv).unwrap();
                (-naive_oracle(&c).unwrap(), c)
            })
            .collect();
        values.sort_by_key(|v| std::cmp::Reverse(v.0));
        if root_turn && values.len() > 1 && values[0].0 == values[1].0 {
            return None;
        }
        go(&values[0].1, e2, !root_turn)
    }
    go(p, e2, true)
}

/// Cell-by-cell rules on a plain grid, sharing nothing with the bitboard
/// code beyond the position masks.
pub mod naive {
    use othello_core::{Position, Square};

    pub type Grid = Vec<Vec<i8>>;

    const DIRS: [(i32, i32); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

    /// 1 for the mover, -1 for the opponent, 0 for empty.
    pub fn grid(p: &Position) -> Grid {
        let n = p.size() as usize;
        let mut g = vec![vec![0i8; n]; n];
        for (r, row) in g.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let bit = Square::new(r as u8, c as u8).bit();
                if p.mover() & bit != 0 {
                    *cell = 1;
                } else if p.opponent() & bit != 0 {
                    *cell = -1;
                }
            }
        }
        g
    }

    pub fn position(g: &Grid) -> Position {
        let (mut mover, mut opponent) = (0u64, 0u64);
        for (r, row) in g.iter().enumerate() {
            for (c, &cell) in row.iter().enumerate() {
                let bit = Square::new(r as u8, c as u8).bit();
                match cell {
                    1 => mover |= bit,
                    -1 => opponent |= bit,
                    _ => {}
                }
            }
        }
        Position::from_masks(mover, opponent, g.len()).unwrap()
    }

    /// Squares flipped by the mover playing at (r, c).
    pub fn flips(g: &Grid, r: usize, c: usize) -> Vec<(usize, usize)> {
        let n = g.len() as i32;
        let mut out = Vec::new();
        if g[r][c] != 0 {
            return out;
        }
        for (dr, dc) in DIRS {
            let mut line = Vec::new();
            let (mut rr, mut cc) = (r as i32 + dr, c as i32 + dc);
            while rr >= 0 && rr < n && cc >= 0 && cc < n && g[rr as usize][cc as usize] == -1 {
                line.push((rr as usize, cc as usize));
                rr += dr;
                cc += dc;
            }
            if !line.is_empty() && rr >= 0 && rr < n && cc >= 0 && cc < n && g[rr as usize][cc as usize] == 1 {
                out.extend(line);
            }
        }
        out
    }

    pub fn moves(g: &Grid) -> Vec<(usize, usize)> {
        let n = g.len();
        let mut out = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if !flips(g, r, c).is_empty() {
                    out.push((r, c));
                }
            }
        }
        out
    }

    /// Grid after the mover plays at (r, c), seen from the new mover.
    pub fn play(g: &Grid, r: usize, c: usize) -> Grid {
        let mut next = g.clone();
        next[r][c] = 1;
        for (fr, fc) in flips(g, r, c) {
            next[fr][fc] = 1;
        }
        swap_sides(&next)
    }

    pub fn swap_sides(g: &Grid) -> Grid {
        g.iter().map(|row| row.iter().map(|&v| -v).collect()).collect()
    }

    /// Final score for the mover with empties awarded to the winner.
    pub fn score(g: &Grid) -> i32 {
        let mine = g.iter().flatten().filter(|&&v| v == 1).count() as i32;
        let theirs = g.iter().flatten().filter(|&&v| v == -1).count() as i32;
        let empty = g.iter().flatten().filter(|&&v| v == 0).count() as i32;
        match mine.cmp(&theirs) {
            std::cmp::Ordering::Greater => mine - theirs + empty,
            std::cmp::Ordering::Less => mine - theirs - empty,
            std::cmp::Ordering::Equal => 0,
        }
    }
}

/// Full-tree minimax on the grid representation.
pub fn grid_value(g: &naive::Grid) -> i32 {
    let moves = naive::moves(g);
    if moves.is_empty() {
        let passed = naive::swap_sides(g);
        if naive::moves(&passed).is_empty() {
            return naive::score(g);
        }
        return -grid_value(&passed);
    }
    moves
        .into_iter()
        .map(|(r, c)| -grid_value(&naive::play(g, r, c)))
        .max()
        .unwrap()
}
