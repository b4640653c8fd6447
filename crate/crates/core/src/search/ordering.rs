//! Move ordering shared by the exact solver and the shallow estimator.

use std::cmp::Reverse;

use crate::board::{Move, Position, Score, Square};
use crate::eval::{evaluate, EvalWeights};
use crate::search::tt::TranspositionEntry;
use crate::search::SearchConfig;

/// Whether a cached best move is deep enough to be trusted for ordering at
/// `current_depth`.
pub fn tt_move_is_usable(stored_depth: u32, current_depth: u32, cfg: &SearchConfig) -> bool {
    stored_depth + cfg.tt_ordering_min_relative_depth >= current_depth
}

/// Heuristic value of playing `sq`, from the mover's side.
#[inline]
pub fn move_score(p: &Position, sq: Square, weights: &EvalWeights) -> Score {
    let child = p.play_unchecked(sq);
    if child.is_terminal() {
        -child.score_now()
    } else {
        -evaluate(&child, weights)
    }
}

/// Orders `candidates` for search. A usable transposition-table move goes
/// first; the rest follow by heuristic score, best first, with ties broken
/// by ascending square index. The result does not depend on the input order.
pub fn order_moves(
    p: &Position,
    candidates: &[Square],
    tt_entry: Option<&TranspositionEntry>,
    current_depth: u32,
    cfg: &SearchConfig,
    weights: &EvalWeights,
) -> Vec<Square> {
    let promoted = tt_entry.and_then(|e| match e.best_move {
        Some(Move::Place(sq)) if tt_move_is_usable(e.depth, current_depth, cfg) && candidates.contains(&sq) => Some(sq),
        _ => None,
    });
    let mut scored: Vec<(Score, Square)> = candidates
        .iter()
        .filter(|&&sq| Some(sq) != promoted)
        .map(|&sq| (move_score(p, sq, weights), sq))
        .collect();
    scored.sort_unstable_by_key(|&(score, sq)| (Reverse(score), sq.bit_index()));
    promoted.into_iter().chain(scored.into_iter().map(|(_, sq)| sq)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::squares;
    use crate::bounds::SolveBounds;
    use crate::gen::random_live_position;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn entry(best: Square, depth: u32) -> TranspositionEntry {
        TranspositionEntry {
            key: 0,
            depth,
            bounds: SolveBounds::exact(0),
            best_move: Some(Move::Place(best)),
            generation: 0,
        }
    }

    #[test]
    fn permuted_input_gives_identical_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cfg = SearchConfig::default();
        let w = EvalWeights::default();
        for _ in 0..100 {
            let p = random_live_position(&mut rng, 8, 30);
            let mut cands: Vec<Square> = squares(p.moves_mask()).collect();
            if cands.is_empty() {
                continue;
            }
            let reference = order_moves(&p, &cands, None, 10, &cfg, &w);
            cands.shuffle(&mut rng);
            assert_eq!(order_moves(&p, &cands, None, 10, &cfg, &w), reference);
            let mut sorted = reference.clone();
            sorted.sort_unstable_by_key(|s| s.bit_index());
            cands.sort_unstable_by_key(|s| s.bit_index());
            assert_eq!(sorted, cands);
        }
    }

    #[test]
    fn shallow_tt_move_is_not_promoted() {
        let cfg = SearchConfig {
            tt_ordering_min_relative_depth: 4,
            ..SearchConfig::default()
        };
        let w = EvalWeights::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = loop {
            let p = random_live_position(&mut rng, 8, 40);
            if p.moves_mask().count_ones() >= 3 {
                break p;
            }
        };
        let cands: Vec<Square> = squares(p.moves_mask()).collect();
        let plain = order_moves(&p, &cands, None, 20, &cfg, &w);
        let last = *plain.last().unwrap();
        assert_eq!(order_moves(&p, &cands, Some(&entry(last, 1)), 20, &cfg, &w), plain);
        assert_eq!(order_moves(&p, &cands, Some(&entry(last, 16)), 20, &cfg, &w)[0], last);
        let lax = SearchConfig {
            tt_ordering_min_relative_depth: 19,
            ..cfg
        };
        assert_eq!(order_moves(&p, &cands, Some(&entry(last, 1)), 20, &lax, &w)[0], last);
    }

    #[test]
    fn order_is_by_score_then_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = EvalWeights::default();
        for _ in 0..50 {
            let p = random_live_position(&mut rng, 6, 20);
            let cands: Vec<Square> = squares(p.moves_mask()).collect();
            let ordered = order_moves(&p, &cands, None, 5, &SearchConfig::default(), &w);
            for pair in ordered.windows(2) {
                let (a, b) = (move_score(&p, pair[0], &w), move_score(&p, pair[1], &w));
                assert!(a > b || (a == b && pair[0].bit_index() < pair[1].bit_index()));
            }
        }
    }
}
