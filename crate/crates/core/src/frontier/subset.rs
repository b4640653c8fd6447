use std::collections::{BTreeSet, HashMap};

use crate::board::{squares, Position, Score, Square};
use crate::frontier::{FrontierConfig, FrontierError};
use crate::symmetry::canonical;

/// Predicted values of positions at the `e1` frontier, keyed canonically.
#[derive(Clone, Debug, Default)]
pub struct PredictionTable {
    values: HashMap<Position, Score>,
}

impl PredictionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, p: &Position, value: Score) {
        self.values.insert(canonical(p), value);
    }

    pub fn get(&self, p: &Position) -> Option<Score> {
        self.values.get(&canonical(p)).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// How often each canonical position occurs in a game collection.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<Position, u64>,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, p: &Position, n: u64) {
        *self.counts.entry(canonical(p)).or_insert(0) += n;
    }

    pub fn get(&self, p: &Position) -> u64 {
        self.counts.get(&canonical(p)).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Position, &u64)> {
        self.counts.iter()
    }
}

/// Minimax over predicted `e1` values, memoised by canonical position. Each
/// entry carries the popularity of the line it follows so equal scores can
/// be split in favour of frequently played positions.
struct Predictor<'a> {
    e1: u32,
    predictions: &'a PredictionTable,
    frequencies: Option<&'a FrequencyTable>,
    memo: HashMap<Position, (Score, u64)>,
}

impl Predictor<'_> {
    fn value(&mut self, p: &Position) -> Result<(Score, u64), FrontierError> {
        let moves = p.moves_mask();
        if moves == 0 {
            let passed = p.pass();
            if !passed.has_moves() {
                return Ok((p.score_now(), 0));
            }
            let (v, pop) = self.value(&passed)?;
            return Ok((-v, pop));
        }
        let key = canonical(p);
        if let Some(&hit) = self.memo.get(&key) {
            return Ok(hit);
        }
        let result = if p.empties() <= self.e1 {
            let v = self
                .predictions
                .get(p)
                .ok_or_else(|| FrontierError::MissingPrediction(p.to_text()))?;
            (v, self.frequencies.map_or(0, |f| f.get(p)))
        } else {
            let (_, v, pop) = self.best_move(p)?;
            (v, pop)
        };
        self.memo.insert(key, result);
        Ok(result)
    }

    /// Highest-scoring move; ties go to the more popular continuation, then
    /// to the lower square index.
    fn best_move(&mut self, p: &Position) -> Result<(Square, Score, u64), FrontierError> {
        let mut best: Option<(Square, Score, u64)> = None;
        for sq in squares(p.moves_mask()) {
            let (v, pop) = self.value(&p.play_unchecked(sq))?;
            let v = -v;
            let better = match best {
                None => true,
                Some((_, bv, bpop)) => v > bv || (v == bv && pop > bpop),
            };
            if better {
                best = Some((sq, v, pop));
            }
        }
        Ok(best.expect("caller checked that moves exist"))
    }
}

/// Positions at the `e1` frontier whose predicted values, once confirmed by
/// exact solving, establish the predicted sign of `p`'s value. Where the
/// mover is predicted to win only the best move is followed; elsewhere every
/// move is.
pub fn generate_frontier_subset(
    p: &Position,
    predictions: &PredictionTable,
    frequencies: Option<&FrequencyTable>,
    cfg: &FrontierConfig,
) -> Result<BTreeSet<Position>, FrontierError> {
    let mut predictor = Predictor {
        e1: cfg.e1,
        predictions,
        frequencies,
        memo: HashMap::new(),
    };
    let mut out = BTreeSet::new();
    let mut visited = BTreeSet::new();
    collect(p, &mut predictor, &mut out, &mut visited)?;
    Ok(out)
}

fn collect(
    p: &Position,
    predictor: &mut Predictor<'_>,
    out: &mut BTreeSet<Position>,
    visited: &mut BTreeSet<Position>,
) -> Result<(), FrontierError> {
    let moves = p.moves_mask();
    if moves == 0 {
        let passed = p.pass();
        if !passed.has_moves() {
            return Ok(());
        }
        return collect(&passed, predictor, out, visited);
    }
    if p.empties() <= predictor.e1 {
        out.insert(canonical(p));
        return Ok(());
    }
    if !visited.insert(canonical(p)) {
        return Ok(());
    }
    let (best, s, _) = predictor.best_move(p)?;
    if s > 0 {
        return collect(&p.play_unchecked(best), predictor, out, visited);
    }
    for sq in squares(moves) {
        collect(&p.play_unchecked(sq), predictor, out, visited)?;
    }
    Ok(())
}
