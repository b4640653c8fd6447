//! Exact endgame solver: fail-soft negamax with optional nega-scout, a
//! symmetry-aware transposition table and iterative deepening.

pub mod oracle;
pub mod ordering;
pub mod stability;
pub mod tt;

use std::fmt;
use std::time::Instant;

use thiserror::Error;

use crate::board::{flips_mask, squares, Move, Position, Score, Square};
use crate::bounds::SolveBounds;
use crate::eval::{evaluate, EvalWeights};

pub use oracle::{naive_oracle, naive_oracle_with_cap};
pub use ordering::order_moves;
pub use tt::{TranspositionEntry, TranspositionTable};

/// At or below this many empties the solver drops move ordering.
const FAST_EMPTIES: u32 = 4;
/// At or below this many empties the solver drops the table and orders by
/// opponent mobility.
const MID_EMPTIES: u32 = 16;
/// Shallow iterations stop this many plies short of the full depth; past
/// that point an exact search is cheaper than another estimate.
const ID_EXACT_GAP: u32 = 10;
/// Exact nodes with at least this many empties order moves by a shallow
/// search instead of the static evaluation.
const SHALLOW_ORDER_EMPTIES: u32 = 17;
/// Half-width of the aspiration window used by shallow iterations.
const ASPIRATION_DELTA: Score = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Shallow iterative-deepening passes search a narrow window around the
    /// previous score and abandon the root move loop on the first fail-high.
    pub aspiration_enabled: bool,
    /// A cached best move is promoted only if it was searched to at least
    /// `current_depth - tt_ordering_min_relative_depth`.
    pub tt_ordering_min_relative_depth: u32,
    pub use_negascout: bool,
    /// `log2` of the table slot count; 0 disables the table.
    pub tt_size_log2: u32,
    /// Positions with more empties are refused.
    pub max_empties: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            aspiration_enabled: false,
            tt_ordering_min_relative_depth: 4,
            use_negascout: true,
            tt_size_log2: 18,
            max_empties: 40,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// One per position expanded, pass nodes included.
    pub nodes_visited: u64,
    pub tt_hits: u64,
    pub fail_highs: u64,
}

impl SearchStats {
    pub fn add(&mut self, other: &SearchStats) {
        self.nodes_visited += other.nodes_visited;
        self.tt_hits += other.tt_hits;
        self.fail_highs += other.fail_highs;
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid window ({alpha}, {beta}) for scores in [-{max}, {max}]")]
    InvalidWindow { alpha: Score, beta: Score, max: Score },
    #[error("{empties} empty squares exceeds the limit of {limit}")]
    TooManyEmpties { empties: u32, limit: u32 },
}

/// Outcome of a root search with window `(alpha, beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// Fail-soft value.
    pub value: Score,
    pub alpha: Score,
    pub beta: Score,
    /// What `value` proves about the true score.
    pub bounds: SolveBounds,
    /// `None` only for terminal positions.
    pub best_move: Option<Move>,
    pub stats: SearchStats,
    pub millis: u64,
}

impl SearchResult {
    pub const CSV_HEADER: &'static str = "position,window,value,nodes,millis";

    pub fn csv_row(&self, p: &Position) -> String {
        format!(
            "{},{}:{},{},{},{}",
            p.to_text(),
            self.alpha,
            self.beta,
            self.value,
            self.stats.nodes_visited,
            self.millis
        )
    }
}

impl fmt::Display for SearchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (window {}:{}, {} nodes)", self.bounds, self.alpha, self.beta, self.stats.nodes_visited)?;
        if let Some(mv) = self.best_move {
            write!(f, " best {mv}")?;
        }
        Ok(())
    }
}

/// A single-threaded solver owning its transposition table. The table
/// survives between calls, so a searcher can be reused across related
/// positions.
pub struct Searcher {
    cfg: SearchConfig,
    weights: EvalWeights,
    tt: TranspositionTable,
    stats: SearchStats,
}

impl Searcher {
    pub fn new(cfg: SearchConfig) -> Self {
        Searcher::with_weights(cfg, EvalWeights::default())
    }

    pub fn with_weights(cfg: SearchConfig, weights: EvalWeights) -> Self {
        Searcher {
            tt: TranspositionTable::new(cfg.tt_size_log2),
            cfg,
            weights,
            stats: SearchStats::default(),
        }
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn clear(&mut self) {
        self.tt.clear();
    }

    fn check(&self, p: &Position, alpha: Score, beta: Score) -> Result<(), SearchError> {
        let max = p.max_score();
        if alpha >= beta || alpha < -max || beta > max {
            return Err(SearchError::InvalidWindow { alpha, beta, max });
        }
        if p.empties() > self.cfg.max_empties {
            return Err(SearchError::TooManyEmpties {
                empties: p.empties(),
                limit: self.cfg.max_empties,
            });
        }
        Ok(())
    }

    /// Full-depth search of `p` with window `(alpha, beta)` under the
    /// fail-soft contract.
    pub fn solve_exact(&mut self, p: &Position, alpha: Score, beta: Score) -> Result<SearchResult, SearchError> {
        self.check(p, alpha, beta)?;
        let start = Instant::now();
        self.stats = SearchStats::default();
        self.tt.new_generation();
        let (value, best_move) = self.root(p, p.empties(), alpha, beta, false, None);
        Ok(self.finish(p, value, best_move, alpha, beta, start))
    }

    /// Iterative deepening in steps of two plies, finishing with a
    /// full-depth search of `(alpha, beta)`. Shallow passes only seed the
    /// table and the root move order.
    pub fn iterative_deepening_solve(
        &mut self,
        p: &Position,
        alpha: Score,
        beta: Score,
    ) -> Result<SearchResult, SearchError> {
        self.check(p, alpha, beta)?;
        let start = Instant::now();
        self.stats = SearchStats::default();
        self.tt.new_generation();
        let max = p.max_score();
        let full = p.empties();
        let mut hint: Option<Square> = None;
        let mut previous: Option<Score> = None;
        let mut depth = 2;
        while depth + ID_EXACT_GAP <= full && !p.is_terminal() {
            let (a, b, stop_on_fail_high) = match (self.cfg.aspiration_enabled, previous) {
                (true, Some(prev)) => (
                    (prev - ASPIRATION_DELTA).max(-max),
                    (prev + ASPIRATION_DELTA).min(max),
                    true,
                ),
                (true, None) => (alpha, beta, true),
                (false, _) => (-max, max, false),
            };
            let (a, b) = if a < b { (a, b) } else { (-max, max) };
            let (v, mv) = self.root(p, depth, a, b, stop_on_fail_high, hint);
            if let Some(Move::Place(sq)) = mv {
                hint = Some(sq);
            }
            previous = Some(v);
            depth += 2;
        }
        let (value, best_move) = self.root(p, full, alpha, beta, false, hint);
        Ok(self.finish(p, value, best_move, alpha, beta, start))
    }

    fn finish(
        &self,
        p: &Position,
        value: Score,
        best_move: Option<Move>,
        alpha: Score,
        beta: Score,
        start: Instant,
    ) -> SearchResult {
        SearchResult {
            value,
            alpha,
            beta,
            bounds: SolveBounds::from_fail_soft(value, alpha, beta, p.max_score()),
            best_move,
            stats: self.stats,
            millis: start.elapsed().as_millis() as u64,
        }
    }

    /// Root move loop. Returns the fail-soft value and the move achieving it.
    fn root(
        &mut self,
        p: &Position,
        depth: u32,
        mut alpha: Score,
        beta: Score,
        stop_on_fail_high: bool,
        hint: Option<Square>,
    ) -> (Score, Option<Move>) {
        self.stats.nodes_visited += 1;
        let moves = p.moves_mask();
        if moves == 0 {
            let passed = p.pass();
            if !passed.has_moves() {
                return (p.score_now(), None);
            }
            let v = -self.search(&passed, depth, -beta, -alpha);
            return (v, Some(Move::Pass));
        }
        let probe = self.tt.locate(p);
        let entry = self.tt.probe(&probe);
        let candidates: Vec<Square> = squares(moves).collect();
        let mut ordered = order_moves(p, &candidates, entry.as_ref(), depth, &self.cfg, &self.weights);
        if let Some(h) = hint.filter(|h| candidates.contains(h)) {
            ordered.retain(|&sq| sq != h);
            ordered.insert(0, h);
        }
        let alpha0 = alpha;
        let mut best = -p.max_score() - 1;
        let mut best_sq = ordered[0];
        for (i, &sq) in ordered.iter().enumerate() {
            let child = p.play_unchecked(sq);
            let v = self.child_value(&child, depth - 1, alpha, beta, i == 0);
            if v > best {
                best = v;
                best_sq = sq;
                if v > alpha {
                    alpha = v;
                }
                if v >= beta {
                    self.stats.fail_highs += 1;
                    if stop_on_fail_high || depth >= p.empties() {
                        break;
                    }
                }
            }
        }
        let bounds = SolveBounds::from_fail_soft(best, alpha0, beta, p.max_score());
        self.tt.store(&probe, depth.min(p.empties()), bounds, Some(Move::Place(best_sq)));
        (best, Some(Move::Place(best_sq)))
    }

    /// Value of a child from the parent's side, with a null-window probe
    /// first when nega-scout is on.
    #[inline]
    fn child_value(&mut self, child: &Position, depth: u32, alpha: Score, beta: Score, first: bool) -> Score {
        if !self.cfg.use_negascout || first || beta - alpha <= 1 {
            return -self.search(child, depth, -beta, -alpha);
        }
        let v = -self.search(child, depth, -alpha - 1, -alpha);
        if v > alpha && v < beta {
            -self.search(child, depth, -beta, -alpha)
        } else {
            v
        }
    }

    fn search(&mut self, p: &Position, depth: u32, mut alpha: Score, beta: Score) -> Score {
        let empties = p.empties();
        let exact = depth >= empties;
        if exact && empties <= MID_EMPTIES {
            return self.search_mid(p, alpha, beta);
        }
        self.stats.nodes_visited += 1;
        let moves = p.moves_mask();
        if moves == 0 {
            let passed = p.pass();
            if !passed.has_moves() {
                return p.score_now();
            }
            return -self.search(&passed, depth, -beta, -alpha);
        }
        if depth == 0 {
            return evaluate(p, &self.weights);
        }
        if depth >= empties {
            if let Some(ceiling) = self.stability_cutoff(p, alpha) {
                return ceiling;
            }
        }
        let depth = depth.min(empties);
        let probe = self.tt.locate(p);
        let entry = self.tt.probe(&probe);
        if let Some(e) = entry {
            if e.depth >= depth
                && (e.bounds.lower >= beta || e.bounds.upper <= alpha || e.bounds.is_exact()) {
                    self.stats.tt_hits += 1;
                    return if e.bounds.lower >= beta { e.bounds.lower } else { e.bounds.upper };
                }
        }
        let candidates: Vec<Square> = squares(moves).collect();
        let ordered = if depth >= empties && empties >= SHALLOW_ORDER_EMPTIES {
            self.order_by_shallow_search(p, &candidates, entry.as_ref(), depth)
        } else if depth >= empties {
            self.order_fastest_first(p, &candidates, entry.as_ref(), depth)
        } else {
            order_moves(p, &candidates, entry.as_ref(), depth, &self.cfg, &self.weights)
        };
        let alpha0 = alpha;
        let mut best = -p.max_score() - 1;
        let mut best_sq = ordered[0];
        for (i, &sq) in ordered.iter().enumerate() {
            let child = p.play_unchecked(sq);
            let v = self.child_value(&child, depth - 1, alpha, beta, i == 0);
            if v > best {
                best = v;
                best_sq = sq;
                if v > alpha {
                    alpha = v;
                    if v >= beta {
                        self.stats.fail_highs += 1;
                        break;
                    }
                }
            }
        }
        let bounds = SolveBounds::from_fail_soft(best, alpha0, beta, p.max_score());
        self.tt.store(&probe, depth, bounds, Some(Move::Place(best_sq)));
        best
    }

    /// The mover's best reachable score when it cannot exceed `alpha`.
    #[inline]
    fn stability_cutoff(&self, p: &Position, alpha: Score) -> Option<Score> {
        let max = p.max_score();
        if max - 2 * p.opponent().count_ones() as Score > alpha {
            return None;
        }
        let ceiling = stability::score_ceiling(p);
        (ceiling <= alpha).then_some(ceiling)
    }

    /// Orders moves by a shallow full-window search of each child; a usable
    /// cached move still goes first.
    fn order_by_shallow_search(
        &mut self,
        p: &Position,
        candidates: &[Square],
        entry: Option<&TranspositionEntry>,
        depth: u32,
    ) -> Vec<Square> {
        let max = p.max_score();
        let promoted = entry.and_then(|e| match e.best_move {
            Some(Move::Place(sq)) if ordering::tt_move_is_usable(e.depth, depth, &self.cfg) => Some(sq),
            _ => None,
        });
        let shallow = match p.empties() { e if e >= 20 => 6, e if e >= 16 => 4, _ => 2 };
        let mut scored: Vec<(Score, Square)> = candidates
            .iter()
            .filter(|&&sq| Some(sq) != promoted)
            .map(|&sq| (-self.search(&p.play_unchecked(sq), shallow - 1, -max, max), sq))
            .collect();
        scored.sort_unstable_by_key(|&(v, sq)| (std::cmp::Reverse(v), sq.bit_index()));
        promoted.into_iter().chain(scored.into_iter().map(|(_, sq)| sq)).collect()
    }

    /// A usable cached move, then the others by the opponent's reply count,
    /// corners first among equals.
    fn order_fastest_first(
        &self,
        p: &Position,
        candidates: &[Square],
        entry: Option<&TranspositionEntry>,
        depth: u32,
    ) -> Vec<Square> {
        let promoted = entry.and_then(|e| match e.best_move {
            Some(Move::Place(sq)) if ordering::tt_move_is_usable(e.depth, depth, &self.cfg) => Some(sq),
            _ => None,
        });
        let corners = corner_bits(p.size());
        let mut keyed: Vec<(u32, Square)> = candidates
            .iter()
            .filter(|&&sq| Some(sq) != promoted)
            .map(|&sq| {
                let replies = p.play_unchecked(sq).moves_mask().count_ones() * 4 + u32::from(sq.bit() & corners == 0);
                ((replies << 6) | sq.bit_index() as u32, sq)
            })
            .collect();
        keyed.sort_unstable_by_key(|e| e.0);
        promoted.into_iter().chain(keyed.into_iter().map(|(_, sq)| sq)).collect()
    }

    /// Exact fail-soft alpha-beta with fastest-first ordering: moves leaving
    /// the opponent fewest replies go first, corners break ties.
    fn search_mid(&mut self, p: &Position, mut alpha: Score, beta: Score) -> Score {
        let empties = p.empties();
        if empties <= FAST_EMPTIES {
            return self.search_small(p, alpha, beta);
        }
        self.stats.nodes_visited += 1;
        let moves = p.moves_mask();
        if moves == 0 {
            let passed = p.pass();
            if !passed.has_moves() {
                return p.score_now();
            }
            return -self.search_mid(&passed, -beta, -alpha);
        }
        if let Some(ceiling) = self.stability_cutoff(p, alpha) {
            return ceiling;
        }
        let corners = corner_bits(p.size());
        let mut list = [(0u32, Position::from_masks_unchecked(0, 0, p.size())); 32];
        let mut n = 0;
        for sq in squares(moves) {
            let child = p.play_unchecked(sq);
            let m = child.moves_mask();
            let replies = (m.count_ones() + (m & corners).count_ones()) * 4 + u32::from(sq.bit() & corners == 0);
            list[n] = ((replies << 6) | sq.bit_index() as u32, child);
            n += 1;
        }
        list[..n].sort_unstable_by_key(|e| e.0);
        let mut best = -p.max_score() - 1;
        for (_, child) in &list[..n] {
            let v = -self.search_mid(child, -beta, -alpha);
            if v > best {
                best = v;
                if v > alpha {
                    alpha = v;
                    if v >= beta {
                        self.stats.fail_highs += 1;
                        break;
                    }
                }
            }
        }
        best
    }

    /// Exact fail-soft alpha-beta near the end of the game: no table, moves
    /// in odd-region-first order, legality tested square by square.
    fn search_small(&mut self, p: &Position, mut alpha: Score, beta: Score) -> Score {
        let empty = p.empty_mask();
        if empty.count_ones() == 1 {
            return self.solve_last(p, empty);
        }
        self.stats.nodes_visited += 1;
        let odd = odd_regions(empty, p.size());
        let mut best = -p.max_score() - 1;
        let (mover, opponent) = (p.mover(), p.opponent());
        for mask in [empty & odd, empty & !odd] {
            for sq in squares(mask) {
                let flipped = flips_mask(mover, opponent, sq);
                if flipped == 0 {
                    continue;
                }
                let v = -self.search_small(&p.play_with_flips(sq, flipped), -beta, -alpha);
                if v > best {
                    best = v;
                    if v > alpha {
                        alpha = v;
                        if v >= beta {
                            self.stats.fail_highs += 1;
                            return best;
                        }
                    }
                }
            }
        }
        if best > -p.max_score() - 1 {
            return best;
        }
        if squares(empty).any(|sq| flips_mask(opponent, mover, sq) != 0) {
            return -self.search_small(&p.pass(), -beta, -alpha);
        }
        p.score_now()
    }

    /// Value of a position with one empty square, counted as one node.
    #[inline]
    fn solve_last(&mut self, p: &Position, empty: u64) -> Score {
        self.stats.nodes_visited += 1;
        let sq = Square::from_bit_index(empty.trailing_zeros() as u8);
        let total = p.max_score();
        let mine = p.mover().count_ones() as Score;
        let flipped = flips_mask(p.mover(), p.opponent(), sq);
        if flipped != 0 {
            let mine = mine + 1 + flipped.count_ones() as Score;
            return 2 * mine - total;
        }
        let flipped = flips_mask(p.opponent(), p.mover(), sq);
        if flipped != 0 {
            let mine = mine - flipped.count_ones() as Score;
            return 2 * mine - total;
        }
        p.score_now()
    }
}

const fn quadrants(size: u8) -> [u64; 4] {
    let half = size / 2;
    let mut out = [0u64; 4];
    let mut q = 0;
    while q < 4 {
        let (r, c) = ((q / 2) * half, (q % 2) * half);
        let mut i = 0;
        while i < half {
            out[q as usize] |= (((1u64 << half) - 1) << c) << (8 * (r + i) as u32);
            i += 1;
        }
        q += 1;
    }
    out
}

const QUADRANTS: [[u64; 4]; 3] = [quadrants(4), quadrants(6), quadrants(8)];

/// Empty squares lying in a quadrant with an odd number of empties.
#[inline]
fn odd_regions(empty: u64, size: u8) -> u64 {
    let mut odd = 0;
    for quadrant in QUADRANTS[(size as usize - 4) / 2] {
        if (empty & quadrant).count_ones() & 1 == 1 {
            odd |= empty & quadrant;
        }
    }
    odd
}

fn corner_bits(size: u8) -> u64 {
    let last = size - 1;
    Square::new(0, 0).bit() | Square::new(0, last).bit() | Square::new(last, 0).bit() | Square::new(last, last).bit()
}

/// One-shot exact solve with a fresh searcher.
pub fn solve_exact(p: &Position, alpha: Score, beta: Score, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    Searcher::new(*cfg).solve_exact(p, alpha, beta)
}

/// One-shot iterative-deepening solve with a fresh searcher.
pub fn iterative_deepening_solve(
    p: &Position,
    alpha: Score,
    beta: Score,
    cfg: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    Searcher::new(*cfg).iterative_deepening_solve(p, alpha, beta)
}
