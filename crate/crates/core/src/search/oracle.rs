//! Brute-force reference solver: plain negamax over every legal line with no
//! caching, ordering or windows.

use crate::board::{Move, Position, Score};
use crate::search::SearchError;

pub const DEFAULT_ORACLE_CAP: u32 = 12;

pub fn naive_oracle(p: &Position) -> Result<Score, SearchError> {
    naive_oracle_with_cap(p, DEFAULT_ORACLE_CAP)
}

pub fn naive_oracle_with_cap(p: &Position, cap: u32) -> Result<Score, SearchError> {
    if p.empties() > cap {
        return Err(SearchError::TooManyEmpties {
            empties: p.empties(),
            limit: cap,
        });
    }
    Ok(negamax(p))
}

fn negamax(p: &Position) -> Score {
    let moves = p.legal_moves();
    if moves.is_empty() {
        let passed = p.pass();
        if passed.legal_moves().is_empty() {
            return p.score_now();
        }
        return -negamax(&passed);
    }
    moves
        .into_iter()
        .map(|mv| -negamax(&p.apply_move(mv).expect("generated move is legal")))
        .max()
        .expect("non-empty")
}

/// Exact value of every move available in `p`, computed by brute force. A
/// forced pass is listed as the only move; a finished game has none.
pub fn naive_move_values(p: &Position, cap: u32) -> Result<Vec<(Move, Score)>, SearchError> {
    if p.empties() > cap {
        return Err(SearchError::TooManyEmpties {
            empties: p.empties(),
            limit: cap,
        });
    }
    let mut moves = p.legal_moves();
    if moves.is_empty() && !p.is_terminal() {
        moves.push(Move::Pass);
    }
    Ok(moves
        .into_iter()
        .map(|mv| (mv, -negamax(&p.apply_move(mv).expect("legal"))))
        .collect())
}
