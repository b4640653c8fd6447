use crate::board::{Position, Score, Square};
use crate::eval::EstimateDictionary;
use crate::frontier::{BoundDictionary, BoundMode, BoundSearch, EstimateSearch, FrontierConfig, MoveOrderer, TaskSet};

/// One pass over the game graph above the `e2` frontier, collecting the
/// frontier positions (with the windows they are needed under) that the
/// dictionary does not yet settle.
pub struct Traversal<'a> {
    d: &'a BoundDictionary,
    e2: u32,
    bounds: BoundSearch<'a>,
    estimates: EstimateSearch<'a>,
    orderer: MoveOrderer,
    pub nodes: u64,
}

impl<'a> Traversal<'a> {
    pub fn new(d: &'a BoundDictionary, d_prime: &'a EstimateDictionary, cfg: &'a FrontierConfig) -> Self {
        Traversal {
            d,
            e2: cfg.e2,
            bounds: BoundSearch::new(d, cfg),
            estimates: EstimateSearch::new(d, d_prime, cfg),
            orderer: cfg.orderer(),
            nodes: 0,
        }
    }

    /// Estimated value of `p` under `(alpha, beta)`. Every position added to
    /// `tasks` is one whose exact solution may change the result; when none
    /// is added the returned value is proven from the dictionary.
    pub fn traverse(&mut self, p: &Position, mut alpha: Score, beta: Score, tasks: &mut TaskSet) -> Score {
        self.nodes += 1;
        let moves = p.moves_mask();
        if moves == 0 {
            let passed = p.pass();
            if !passed.has_moves() {
                return p.score_now();
            }
            return -self.traverse(&passed, -beta, -alpha, tasks);
        }
        let max = p.max_score();
        if p.empties() <= self.e2 {
            if p.has_wipeout_move() {
                return max;
            }
            if let Some(b) = self.d.get(p) {
                if b.is_exact() || b.lower >= beta {
                    return b.lower;
                }
                if b.upper <= alpha {
                    return b.upper;
                }
            }
            let e = self.estimates.search(p, alpha, beta);
            tasks.record(p, alpha, beta, e);
            return e;
        }

        let mut best = Score::MIN;
        let mut open: Vec<(Score, Square)> = Vec::new();
        for sq in self.orderer.order(p) {
            let child = p.play_unchecked(sq);
            let e_lower = -self.bounds.search(&child, BoundMode::Upper, -max, max);
            let e_upper = -self.bounds.search(&child, BoundMode::Lower, -max, max);
            if e_lower >= beta {
                return e_lower;
            }
            if e_upper <= alpha {
                best = best.max(e_upper);
                continue;
            }
            if alpha < e_lower && e_lower == e_upper && e_upper < beta {
                best = best.max(e_upper);
                alpha = e_upper;
                continue;
            }
            let e = -self.estimates.search(&child, -max, max);
            open.push((e, sq));
        }
        open.sort_by(|a, b| b.0.cmp(&a.0).then(self.orderer.rank(a.1).cmp(&self.orderer.rank(b.1))));
        for (_, sq) in open {
            let v = -self.traverse(&p.play_unchecked(sq), -beta, -alpha, tasks);
            best = best.max(v);
            if best >= beta {
                return best;
            }
            alpha = alpha.max(best);
        }
        best
    }
}

/// One-shot traversal; returns the estimate and adds needed positions to
/// `tasks`.
pub fn traverse(
    p: &Position,
    d: &BoundDictionary,
    d_prime: &EstimateDictionary,
    tasks: &mut TaskSet,
    alpha: Score,
    beta: Score,
    cfg: &FrontierConfig,
) -> Score {
    Traversal::new(d, d_prime, cfg).traverse(p, alpha, beta, tasks)
}
