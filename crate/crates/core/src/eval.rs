//! Heuristic evaluation and the shallow value estimator built on it.
//!
//! The evaluator is a linear combination of five mover-minus-opponent
//! features. Each feature is invariant under the board symmetries and
//! changes sign when the sides are swapped, so the evaluation inherits both
//! properties. Its accuracy only affects how quickly proofs are found; every
//! estimate it produces is later checked by exact search.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::board::{neighbours, squares, Position, Score, Square};
use crate::search::ordering::order_moves;
use crate::search::{SearchConfig, SearchStats};
use crate::symmetry::canonical;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("static evaluation is undefined for terminal positions")]
    Terminal,
    #[error("weight file line {line}: {reason}")]
    WeightFile { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Feature weights in score (disc) units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalWeights {
    pub corners: f64,
    pub mobility: f64,
    pub frontier: f64,
    pub discs: f64,
    pub stable_edges: f64,
}

impl Default for EvalWeights {
    fn default() -> Self {
        EvalWeights {
            corners: 6.0,
            mobility: 1.0,
            frontier: -0.5,
            discs: 0.25,
            stable_edges: 1.5,
        }
    }
}

impl EvalWeights {
    pub const FEATURES: [&'static str; 5] = ["corners", "mobility", "frontier", "discs", "stable_edges"];

    pub fn zero() -> Self {
        EvalWeights {
            corners: 0.0,
            mobility: 0.0,
            frontier: 0.0,
            discs: 0.0,
            stable_edges: 0.0,
        }
    }

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        match name {
            "corners" => Some(&mut self.corners),
            "mobility" => Some(&mut self.mobility),
            "frontier" => Some(&mut self.frontier),
            "discs" => Some(&mut self.discs),
            "stable_edges" => Some(&mut self.stable_edges),
            _ => None,
        }
    }

    fn values(&self) -> [f64; 5] {
        [self.corners, self.mobility, self.frontier, self.discs, self.stable_edges]
    }

    pub fn load(path: impl AsRef<Path>) -> Result<EvalWeights, EvalError> {
        let text = std::fs::read_to_string(path)?;
        text.parse()
    }
}

impl FromStr for EvalWeights {
    type Err = EvalError;

    /// One `feature_name value` pair per line; `#` starts a comment.
    /// Features that are not listed keep their default weight.
    fn from_str(text: &str) -> Result<EvalWeights, EvalError> {
        let mut weights = EvalWeights::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| EvalError::WeightFile { line: i + 1, reason };
            let mut parts = line.split_whitespace();
            let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(format!("expected `feature value`, got {line:?}")));
            };
            let value: f64 = value.parse().map_err(|_| err(format!("bad number {value:?}")))?;
            if !value.is_finite() {
                return Err(err(format!("weight for {name} is not finite")));
            }
            *weights.slot(name).ok_or_else(|| err(format!("unknown feature {name:?}")))? = value;
        }
        Ok(weights)
    }
}

impl fmt::Display for EvalWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, value) in EvalWeights::FEATURES.iter().zip(self.values()) {
            writeln!(f, "{name} {value}")?;
        }
        Ok(())
    }
}

fn corner_mask(size: u8) -> u64 {
    let last = size - 1;
    Square::new(0, 0).bit() | Square::new(0, last).bit() | Square::new(last, 0).bit() | Square::new(last, last).bit()
}

/// Edge stones connected to a corner of the same colour through an
/// unbroken run along that edge.
fn stable_edge_mask(own: u64, size: u8) -> u64 {
    let last = size as i32 - 1;
    let mut stable = 0u64;
    for (r0, c0) in [(0, 0), (0, last), (last, 0), (last, last)] {
        if own & Square::new(r0 as u8, c0 as u8).bit() == 0 {
            continue;
        }
        let dr = if r0 == 0 { 1 } else { -1 };
        let dc = if c0 == 0 { 1 } else { -1 };
        for (step_r, step_c) in [(dr, 0), (0, dc)] {
            let (mut r, mut c) = (r0, c0);
            while (0..=last).contains(&r) && (0..=last).contains(&c) {
                let bit = Square::new(r as u8, c as u8).bit();
                if own & bit == 0 {
                    break;
                }
                stable |= bit;
                r += step_r;
                c += step_c;
            }
        }
    }
    stable
}

/// Raw feature vector, mover minus opponent, in `EvalWeights::FEATURES` order.
pub fn features(p: &Position) -> [f64; 5] {
    let size = p.size();
    let (me, them) = (p.mover(), p.opponent());
    let corners = corner_mask(size);
    let empty = p.empty_mask();
    let near_empty = neighbours(empty);
    let diff = |a: u64, b: u64| a.count_ones() as f64 - b.count_ones() as f64;
    [
        diff(me & corners, them & corners),
        p.moves_mask().count_ones() as f64 - p.opponent_moves_mask().count_ones() as f64,
        diff(me & near_empty, them & near_empty),
        diff(me, them),
        diff(stable_edge_mask(me, size), stable_edge_mask(them, size)),
    ]
}

/// Evaluation without the terminal check; used where the caller already
/// knows the position is live.
#[inline]
pub fn evaluate(p: &Position, weights: &EvalWeights) -> Score {
    let raw: f64 = features(p).iter().zip(weights.values()).map(|(x, w)| x * w).sum();
    let max = p.max_score();
    (raw.round() as Score).clamp(-max, max)
}

/// Static evaluation of a live position, in `[-S, S]`.
pub fn static_eval(p: &Position, weights: &EvalWeights) -> Result<Score, EvalError> {
    if p.is_terminal() {
        return Err(EvalError::Terminal);
    }
    Ok(evaluate(p, weights))
}

/// Canonical position to estimated value.
#[derive(Clone, Debug, Default)]
pub struct EstimateDictionary {
    entries: HashMap<Position, Score>,
}

impl EstimateDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, p: &Position) -> Option<Score> {
        self.entries.get(&canonical(p)).copied()
    }

    pub fn insert(&mut self, p: &Position, value: Score) {
        let max = p.max_score();
        self.entries.insert(canonical(p), value.clamp(-max, max));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Position, &Score)> {
        self.entries.iter()
    }

    pub fn extend_from(&mut self, other: &EstimateDictionary) {
        for (p, v) in other.iter() {
            self.entries.insert(*p, *v);
        }
    }
}

/// Thresholds of the shallow estimator. Both are absolute score values and
/// are applied unchanged on every board size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimateParams {
    /// Evaluations with a larger magnitude are returned without search.
    pub decisive: Score,
    /// Half-width of the minimum search window around zero.
    pub window: Score,
    pub depth: u32,
}

impl Default for EstimateParams {
    fn default() -> Self {
        EstimateParams {
            decisive: 10,
            window: 3,
            depth: 2,
        }
    }
}

/// Estimated game-theoretic value of a live position.
///
/// A stored estimate wins outright. Otherwise a decisive static evaluation
/// is returned as is, and anything closer to a draw is refined by a shallow
/// alpha-beta search whose window always covers `[-window, window]`.
pub fn estimate(
    p: &Position,
    known: &EstimateDictionary,
    weights: &EvalWeights,
    params: &EstimateParams,
    stats: &mut SearchStats,
) -> Result<Score, EvalError> {
    if let Some(v) = known.get(p) {
        return Ok(v);
    }
    let v = static_eval(p, weights)?;
    if v.abs() > params.decisive {
        return Ok(v);
    }
    let alpha = v.min(-params.window);
    let beta = v.max(params.window);
    Ok(shallow_search(p, params.depth, alpha, beta, weights, stats))
}

/// Fixed-depth fail-soft alpha-beta with static leaves. A pass uses up one
/// ply, so a depth-`d` search visits at most `1 + b + ... + b^d` positions.
pub fn shallow_search(
    p: &Position,
    depth: u32,
    mut alpha: Score,
    beta: Score,
    weights: &EvalWeights,
    stats: &mut SearchStats,
) -> Score {
    stats.nodes_visited += 1;
    let moves = p.moves_mask();
    if moves == 0 && !p.pass().has_moves() {
        return p.score_now();
    }
    if depth == 0 {
        return evaluate(p, weights);
    }
    if moves == 0 {
        return -shallow_search(&p.pass(), depth - 1, -beta, -alpha, weights, stats);
    }
    let candidates: Vec<Square> = squares(moves).collect();
    let ordered = order_moves(p, &candidates, None, depth, &SearchConfig::default(), weights);
    let mut best = -p.max_score() - 1;
    for sq in ordered {
        let child = p.play_unchecked(sq);
        let v = -shallow_search(&child, depth - 1, -beta, -alpha, weights, stats);
        if v > best {
            best = v;
            if v > alpha {
                alpha = v;
                if v >= beta {
                    stats.fail_highs += 1;
                    break;
                }
            }
        }
    }
    best
}
