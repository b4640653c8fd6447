use std::collections::HashMap;
use std::ops::Not;

use crate::board::{Position, Score};
use crate::frontier::{BoundDictionary, FrontierConfig, MoveOrderer};
use crate::symmetry::canonical;

/// Which side of the value a bound search proves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundMode {
    Upper,
    Lower,
}

impl Not for BoundMode {
    type Output = BoundMode;
    fn not(self) -> BoundMode {
        match self {
            BoundMode::Upper => BoundMode::Lower,
            BoundMode::Lower => BoundMode::Upper,
        }
    }
}

/// Values returned for frontier positions missing from the dictionary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sentinels {
    /// The weakest sound bounds: `+S` above, `-S` below.
    Sound,
    /// `+S` in both modes.
    Literal,
    /// One past the score range, so any dependence on a missing entry is
    /// visible in the result.
    Strict,
}

impl Sentinels {
    pub fn for_config(cfg: &FrontierConfig) -> Self {
        if cfg.literal_sentinels {
            Sentinels::Literal
        } else {
            Sentinels::Sound
        }
    }

    pub fn value(self, mode: BoundMode, max: Score) -> Score {
        match (self, mode) {
            (Sentinels::Sound, BoundMode::Upper) | (Sentinels::Literal, _) => max,
            (Sentinels::Sound, BoundMode::Lower) => -max,
            (Sentinels::Strict, BoundMode::Upper) => max + 1,
            (Sentinels::Strict, BoundMode::Lower) => -max - 1,
        }
    }
}

/// Alpha-beta over the game graph above the `e2` frontier using only the
/// bounds stored in a dictionary. In upper mode the result bounds the value
/// from above, in lower mode from below; the mode flips at every ply.
/// Results are memoised per position, mode and window for the lifetime of
/// the searcher, so it must not outlive changes to the dictionary.
pub struct BoundSearch<'a> {
    d: &'a BoundDictionary,
    e2: u32,
    sentinels: Sentinels,
    orderer: MoveOrderer,
    memo: HashMap<(Position, BoundMode, Score, Score), Score>,
    pub nodes: u64,
}

impl<'a> BoundSearch<'a> {
    pub fn new(d: &'a BoundDictionary, cfg: &FrontierConfig) -> Self {
        BoundSearch {
            d,
            e2: cfg.e2,
            sentinels: Sentinels::for_config(cfg),
            orderer: cfg.orderer(),
            memo: HashMap::new(),
            nodes: 0,
        }
    }

    pub fn with_sentinels(mut self, sentinels: Sentinels) -> Self {
        self.sentinels = sentinels;
        self.memo.clear();
        self
    }

    pub fn search(&mut self, p: &Position, mode: BoundMode, mut alpha: Score, beta: Score) -> Score {
        self.nodes += 1;
        let moves = p.moves_mask();
        if moves == 0 {
            let passed = p.pass();
            if !passed.has_moves() {
                return p.score_now();
            }
            return -self.search(&passed, !mode, -beta, -alpha);
        }
        let max = p.max_score();
        if p.empties() <= self.e2 {
            if let Some(b) = self.d.get(p) {
                return match mode {
                    BoundMode::Upper => b.upper,
                    BoundMode::Lower => b.lower,
                };
            }
            if p.has_wipeout_move() {
                return max;
            }
            return self.sentinels.value(mode, max);
        }
        let key = (canonical(p), mode, alpha, beta);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best = Score::MIN;
        for sq in self.orderer.order(p) {
            let v = -self.search(&p.play_unchecked(sq), !mode, -beta, -alpha);
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

/// One-shot bound search.
pub fn bound_search(
    p: &Position,
    d: &BoundDictionary,
    mode: BoundMode,
    alpha: Score,
    beta: Score,
    cfg: &FrontierConfig,
) -> Score {
    BoundSearch::new(d, cfg).search(p, mode, alpha, beta)
}

/// Both bound searches of a certification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyReport {
    pub lower: Score,
    pub upper: Score,
    pub certified: bool,
}

/// Checks, from `d` alone, that `claimed` is the fail-soft result of
/// searching `p` with window `(alpha, beta)`: an in-window claim must be
/// matched by equal lower and upper bounds, a claim at or below `alpha` by an
/// upper bound at or below `alpha`, and a claim at or above `beta` by a lower
/// bound at or above `beta`. Missing frontier entries evaluate outside the
/// score range, so they can never help a claim pass.
pub fn certify_report(
    p: &Position,
    claimed: Score,
    alpha: Score,
    beta: Score,
    d: &BoundDictionary,
    cfg: &FrontierConfig,
) -> CertifyReport {
    let mut search = BoundSearch::new(d, cfg).with_sentinels(Sentinels::Strict);
    let lower = search.search(p, BoundMode::Lower, alpha, beta);
    let upper = search.search(p, BoundMode::Upper, alpha, beta);
    let max = p.max_score();
    let in_range = |v: Score| (-max..=max).contains(&v);
    let certified = alpha < beta
        && if claimed <= alpha {
            in_range(upper) && upper <= alpha
        } else if claimed >= beta {
            in_range(lower) && lower >= beta
        } else {
            lower == claimed && upper == claimed
        };
    CertifyReport { lower, upper, certified }
}

pub fn certify(
    p: &Position,
    claimed: Score,
    alpha: Score,
    beta: Score,
    d: &BoundDictionary,
    cfg: &FrontierConfig,
) -> bool {
    certify_report(p, claimed, alpha, beta, d, cfg).certified
}
