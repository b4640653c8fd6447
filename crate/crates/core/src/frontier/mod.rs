//! Two-level frontier decomposition of a weak solve.
//!
//! A position is proved by searching the game graph down to the `e2`
//! frontier, where bounds come from a [`BoundDictionary`] filled in by an
//! exact solver. [`traverse`] lists the frontier positions whose values are
//! still needed, [`prove_loop`] repeats that until nothing is missing, and
//! [`certify`] re-checks a finished dictionary with nothing but the rules
//! and the stored bounds. [`generate_frontier_subset`] picks, from predicted
//! values at the `e1` frontier, a set of positions whose solutions imply the
//! root's value.

mod bound;
mod dict;
mod estimate;
mod prove;
mod subset;
mod traverse;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::board::{squares, Position, Score, Square};
use crate::eval::{EstimateParams, EvalWeights};
use crate::search::ordering::move_score;
use crate::symmetry::canonical;

pub use bound::{bound_search, certify, certify_report, BoundMode, BoundSearch, CertifyReport, Sentinels};
pub use dict::{BoundDictionary, Task, TaskSet};
pub use estimate::{estimate_search, EstimateSearch};
pub use prove::{prove_loop, prove_loop_from, DirectSolver, ProofOutcome, TaskResult, TaskSolver};
pub use subset::{generate_frontier_subset, FrequencyTable, PredictionTable};
pub use traverse::{traverse, Traversal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontierError {
    #[error("invalid window ({alpha}, {beta})")]
    InvalidWindow { alpha: Score, beta: Score },
    #[error("invalid frontier configuration: {0}")]
    Config(String),
    #[error("no prediction for frontier position {0}")]
    MissingPrediction(String),
    #[error("conflicting bounds for {position}: stored {stored}, new {new}")]
    Conflict { position: String, stored: String, new: String },
    #[error("no proof after {0} iterations")]
    IterationCap(usize),
    #[error("task solver failed: {0}")]
    Solver(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrontierConfig {
    /// Empties at which predicted values are looked up when choosing
    /// sub-problems.
    pub e1: u32,
    /// Empties at which positions are handed to the exact solver.
    pub e2: u32,
    pub weights: EvalWeights,
    pub estimate: EstimateParams,
    /// Unknown frontier positions count as a win for the mover in both bound
    /// modes and in the estimate search, exactly as the pseudo-code reads.
    /// Unsound as a lower bound; kept for comparison runs only.
    pub literal_sentinels: bool,
    /// Reorders equally promising moves; `None` means ascending square order.
    pub tie_break_seed: Option<u64>,
    pub max_iterations: usize,
}

impl FrontierConfig {
    pub fn new(e1: u32, e2: u32) -> Self {
        FrontierConfig {
            e1,
            e2,
            weights: EvalWeights::default(),
            estimate: EstimateParams::default(),
            literal_sentinels: false,
            tie_break_seed: None,
            max_iterations: 1000,
        }
    }

    /// Frontiers at `empties - 4` and `empties - 6` plies below `p`.
    pub fn for_root(p: &Position) -> Self {
        let n = p.empties();
        FrontierConfig::new(n.saturating_sub(4), n.saturating_sub(6))
    }

    pub fn validate(&self, root: &Position) -> Result<(), FrontierError> {
        if self.e2 >= self.e1 {
            return Err(FrontierError::Config(format!("e2 ({}) must be below e1 ({})", self.e2, self.e1)));
        }
        if self.e1 > root.empties() {
            return Err(FrontierError::Config(format!(
                "e1 ({}) exceeds the root's {} empties",
                self.e1,
                root.empties()
            )));
        }
        if self.max_iterations == 0 {
            return Err(FrontierError::Config("max_iterations must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn orderer(&self) -> MoveOrderer {
        MoveOrderer::new(&self.weights, self.tie_break_seed)
    }
}

/// Canonical positions with at most `e` empties and a move available that
/// play from `p` reaches first, passing where forced.
pub fn enumerate_frontier(p: &Position, e: u32) -> HashSet<Position> {
    fn walk(p: &Position, e: u32, seen: &mut HashSet<Position>, out: &mut HashSet<Position>) {
        let moves = p.moves_mask();
        if moves == 0 {
            let passed = p.pass();
            if passed.has_moves() {
                walk(&passed, e, seen, out);
            }
            return;
        }
        if p.empties() <= e {
            out.insert(canonical(p));
            return;
        }
        if !seen.insert(canonical(p)) {
            return;
        }
        for sq in squares(moves) {
            walk(&p.play_unchecked(sq), e, seen, out);
        }
    }
    let mut out = HashSet::new();
    walk(p, e, &mut HashSet::new(), &mut out);
    out
}

pub(crate) fn check_window(p: &Position, alpha: Score, beta: Score) -> Result<(), FrontierError> {
    let s = p.max_score();
    if alpha >= beta || alpha < -s || beta > s {
        Err(FrontierError::InvalidWindow { alpha, beta })
    } else {
        Ok(())
    }
}

/// Deterministic move ordering for the frontier searches: heuristic score
/// first, then a fixed rank per square.
#[derive(Clone, Debug)]
pub(crate) struct MoveOrderer {
    weights: EvalWeights,
    rank: [u8; 64],
}

impl MoveOrderer {
    pub(crate) fn new(weights: &EvalWeights, seed: Option<u64>) -> Self {
        let mut rank: [u8; 64] = std::array::from_fn(|i| i as u8);
        if let Some(seed) = seed {
            rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        MoveOrderer {
            weights: *weights,
            rank,
        }
    }

    pub(crate) fn rank(&self, sq: Square) -> u8 {
        self.rank[sq.bit_index() as usize]
    }

    pub(crate) fn order(&self, p: &Position) -> Vec<Square> {
        let mut scored: Vec<(Score, u8, Square)> = squares(p.moves_mask())
            .map(|sq| (move_score(p, sq, &self.weights), self.rank(sq), sq))
            .collect();
        scored.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        scored.into_iter().map(|(_, _, sq)| sq).collect()
    }
}
