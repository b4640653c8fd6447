use std::collections::HashMap;

use crate::board::{Position, Score};
use crate::eval::{estimate, EstimateDictionary};
use crate::frontier::{BoundDictionary, FrontierConfig, MoveOrderer};
use crate::search::SearchStats;
use crate::symmetry::canonical;

/// Alpha-beta down to the `e2` frontier that mixes proven bounds with
/// estimates: a frontier position contributes its exact value when known,
/// a stored bound when the bound already decides the comparison with the
/// window or the estimate, and the estimate otherwise.
pub struct EstimateSearch<'a> {
    d: &'a BoundDictionary,
    d_prime: &'a EstimateDictionary,
    cfg: &'a FrontierConfig,
    orderer: MoveOrderer,
    memo: HashMap<(Position, Score, Score), Score>,
    estimates: HashMap<Position, Score>,
    pub stats: SearchStats,
}

impl<'a> EstimateSearch<'a> {
    pub fn new(d: &'a BoundDictionary, d_prime: &'a EstimateDictionary, cfg: &'a FrontierConfig) -> Self {
        EstimateSearch {
            d,
            d_prime,
            cfg,
            orderer: cfg.orderer(),
            memo: HashMap::new(),
            estimates: HashMap::new(),
            stats: SearchStats::default(),
        }
    }

    /// Estimated value of a live frontier position, cached per canonical form.
    pub fn frontier_estimate(&mut self, p: &Position) -> Score {
        let key = canonical(p);
        if let Some(&e) = self.estimates.get(&key) {
            return e;
        }
        let e = estimate(p, self.d_prime, &self.cfg.weights, &self.cfg.estimate, &mut self.stats)
            .expect("frontier positions reaching the estimator are live");
        self.estimates.insert(key, e);
        e
    }

    pub fn search(&mut self, p: &Position, mut alpha: Score, beta: Score) -> Score {
        let moves = p.moves_mask();
        if moves == 0 {
            let passed = p.pass();
            if !passed.has_moves() {
                return p.score_now();
            }
            return -self.search(&passed, -beta, -alpha);
        }
        let max = p.max_score();
        if p.empties() <= self.cfg.e2 {
            if p.has_wipeout_move() {
                return max;
            }
            let e = self.frontier_estimate(p);
            return match self.d.get(p) {
                Some(b) if b.is_exact() => b.upper,
                Some(b) if beta.min(e) <= b.lower => b.lower,
                Some(b) if b.upper <= alpha.max(e) => b.upper,
                Some(_) => e,
                None if self.cfg.literal_sentinels => max,
                None => e,
            };
        }
        let key = (canonical(p), alpha, beta);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best = Score::MIN;
        for sq in self.orderer.order(p) {
            let v = -self.search(&p.play_unchecked(sq), -beta, -alpha);
            best = best.max(v);
            if best >= beta {
                break;
            }
            alpha = alpha.max(best);
        }
        self.memo.insert(key, best);
        best
    }
}

/// One-shot estimate search.
pub fn estimate_search(
    p: &Position,
    d: &BoundDictionary,
    d_prime: &EstimateDictionary,
    alpha: Score,
    beta: Score,
    cfg: &FrontierConfig,
) -> Score {
    EstimateSearch::new(d, d_prime, cfg).search(p, alpha, beta)
}
