//! The never-losing player and the game-record verifier.
//!
//! Above the `e2` frontier the engine only plays moves whose value the
//! proof dictionary already guarantees; at or below it the exact solver
//! decides. Play is only covered from the initial position: a position the
//! proof never had to consider is reported as off-proof instead of being
//! guessed at.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::board::{parse_record, BoardError, Color, Move, Position, Score, Square};
use crate::bounds::SolveBounds;
use crate::frontier::{BoundDictionary, BoundMode, BoundSearch, FrontierConfig, Sentinels};
use crate::symmetry::canonicalize;
use crate::search::{SearchConfig, SearchError, SearchResult, Searcher};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlayerError {
    #[error("the game is over")]
    GameOver,
    #[error("it is {0}'s turn")]
    WrongTurn(Color),
    #[error(transparent)]
    Illegal(#[from] BoardError),
    #[error("position {position} with {empties} empties is not covered by the proof")]
    OffProof { position: String, empties: u32 },
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Positions with more empties are played from the dictionary.
    pub e2: u32,
    /// At or below this many empties the engine maximises the exact value
    /// instead of only preserving its guarantee.
    pub greedy_empties: u32,
    pub search: SearchConfig,
}

impl EngineConfig {
    pub fn new(e2: u32) -> Self {
        EngineConfig {
            e2,
            greedy_empties: 14,
            search: SearchConfig {
                tt_size_log2: 20,
                ..SearchConfig::default()
            },
        }
    }
}

/// Proven frontier bounds plus the settings every session shares.
pub struct Engine {
    dictionary: BoundDictionary,
    config: EngineConfig,
    frontier: FrontierConfig,
    /// Solver decisions below `e2`, keyed by canonical position and target,
    /// so every session facing the same position gets the same reply.
    decisions: Mutex<HashMap<(Position, Option<Score>), Move>>,
    /// One table for all sessions; games from the same start revisit the
    /// same subtrees.
    searcher: Mutex<Searcher>,
}

impl Engine {
    pub fn new(dictionary: BoundDictionary, config: EngineConfig) -> Arc<Engine> {
        let frontier = FrontierConfig::new(config.e2 + 1, config.e2);
        let search = config.search;
        Arc::new(Engine {
            dictionary,
            config,
            frontier,
            decisions: Mutex::default(),
            searcher: Mutex::new(Searcher::new(search)),
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn dictionary(&self) -> &BoundDictionary {
        &self.dictionary
    }

    fn solve(&self, p: &Position, alpha: Score, beta: Score) -> Result<SearchResult, SearchError> {
        self.searcher.lock().unwrap().solve_exact(p, alpha, beta)
    }

    fn bound_search(&self) -> BoundSearch<'_> {
        BoundSearch::new(&self.dictionary, &self.frontier).with_sentinels(Sentinels::Sound)
    }

    /// What the dictionary proves about `p` for its mover, or `None` above
    /// nothing but the trivial range.
    pub fn proven_bounds(&self, p: &Position) -> Option<SolveBounds> {
        let max = p.max_score();
        let mut search = self.bound_search();
        let lower = search.search(p, BoundMode::Lower, -max, max);
        let upper = search.search(p, BoundMode::Upper, -max, max);
        (lower > -max || upper < max).then_some(SolveBounds { lower, upper })
    }
}

/// Exact value or dictionary bounds of one candidate move, for the mover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveAnalysis {
    pub mv: Move,
    pub bounds: Option<SolveBounds>,
}

/// One game between the engine and an outside player.
pub struct PlaySession {
    engine: Arc<Engine>,
    engine_color: Color,
    start: Position,
    position: Position,
    history: Vec<Move>,
    /// Value the engine is guaranteed from the start position, in its own
    /// favour; `None` when nothing is proven.
    certified: Option<Score>,
}

impl PlaySession {
    /// A game from the standard start position on a `size` board. Forced
    /// passes are played automatically throughout.
    pub fn new(size: usize, engine_color: Color, engine: Arc<Engine>) -> Result<PlaySession, PlayerError> {
        let start = Position::initial(size)?;
        let max = start.max_score();
        let black = if start.empties() <= engine.config.e2 {
            let v = engine.solve(&start, -max, max)?.value;
            Some(SolveBounds::exact(v))
        } else {
            engine.proven_bounds(&start)
        };
        let certified = black.and_then(|b| match engine_color {
            Color::Black => (b.lower > -max).then_some(b.lower),
            Color::White => (b.upper < max).then_some(-b.upper),
        });
        Ok(PlaySession {
            engine,
            engine_color,
            start,
            position: start,
            history: Vec::new(),
            certified,
        })
    }

    pub fn position(&self) -> &Position {
        &self.position
    }

    pub fn history(&self) -> &[Move] {
        &self.history
    }

    pub fn engine_color(&self) -> Color {
        self.engine_color
    }

    pub fn certified_value(&self) -> Option<Score> {
        self.certified
    }

    pub fn to_move(&self) -> Color {
        Color::to_move_after(self.history.len())
    }

    pub fn is_over(&self) -> bool {
        self.position.is_terminal()
    }

    pub fn engine_to_move(&self) -> bool {
        !self.is_over() && self.to_move() == self.engine_color
    }

    /// Black's and White's disc counts.
    pub fn discs(&self) -> (u32, u32) {
        let (m, o) = (self.position.mover().count_ones(), self.position.opponent().count_ones());
        match self.to_move() {
            Color::Black => (m, o),
            Color::White => (o, m),
        }
    }

    /// Final score for `color`, once the game is over.
    pub fn final_score(&self, color: Color) -> Option<Score> {
        let s = self.position.final_score().ok()?;
        Some(if color == self.to_move() { s } else { -s })
    }

    /// The history as a record, passes left implicit.
    pub fn record(&self) -> String {
        let squares: Vec<Square> = self.history.iter().filter_map(|m| m.square()).collect();
        crate::board::format_record(&squares)
    }

    /// Plays `mv` for whoever is to move. The position is unchanged on error.
    pub fn play(&mut self, mv: Move) -> Result<(), PlayerError> {
        if self.is_over() {
            return Err(PlayerError::GameOver);
        }
        let next = self.position.apply_move(mv)?;
        self.position = next;
        self.history.push(mv);
        while !self.position.has_moves() && !self.position.is_terminal() {
            self.position = self.position.pass();
            self.history.push(Move::Pass);
        }
        Ok(())
    }

    /// Plays `mv` as the side not played by the engine.
    pub fn play_opponent(&mut self, mv: Move) -> Result<(), PlayerError> {
        if self.engine_to_move() {
            return Err(PlayerError::WrongTurn(self.engine_color));
        }
        self.play(mv)
    }

    /// Chooses and plays the engine's move.
    pub fn engine_move(&mut self) -> Result<Move, PlayerError> {
        if self.is_over() {
            return Err(PlayerError::GameOver);
        }
        if !self.engine_to_move() {
            return Err(PlayerError::WrongTurn(self.engine_color.opposite()));
        }
        let mv = self.perfect_move()?;
        self.play(mv)?;
        Ok(mv)
    }

    fn off_proof(&self) -> PlayerError {
        PlayerError::OffProof {
            position: self.position.to_text(),
            empties: self.position.empties(),
        }
    }

    /// A move for the side to move that keeps the certified value. Above
    /// `e2` it is the first move, in heuristic order, whose value the
    /// dictionary bounds at or above the target. Below that the solver
    /// proves the target with a null window, or maximises the exact value
    /// once few enough squares are left.
    pub fn perfect_move(&mut self) -> Result<Move, PlayerError> {
        let p = self.position;
        if p.is_terminal() {
            return Err(PlayerError::GameOver);
        }
        if !p.has_moves() {
            return Ok(Move::Pass);
        }
        let max = p.max_score();
        let cfg = &self.engine.config;
        let target = self.certified.map(|t| if self.to_move() == self.engine_color { t } else { -t });
        if p.empties() > cfg.e2 {
            let Some(t) = target else { return Err(self.off_proof()) };
            let engine = Arc::clone(&self.engine);
            let mut search = engine.bound_search();
            for sq in engine.frontier.orderer().order(&p) {
                let child = p.play_unchecked(sq);
                if search.search(&child, BoundMode::Upper, -t, -t + 1) <= -t {
                    return Ok(Move::Place(sq));
                }
            }
            return Err(self.off_proof());
        }
        let (image, transform) = canonicalize(&p);
        let n = p.size();
        let key = (image, target);
        if let Some(&mv) = self.engine.decisions.lock().unwrap().get(&key) {
            return Ok(transform.inverse().apply_move(mv, n));
        }
        let result = match target {
            Some(t) if t > -max && p.empties() > cfg.greedy_empties => {
                let r = self.engine.solve(&p, t - 1, t)?;
                if r.value < t {
                    return Err(self.off_proof());
                }
                r
            }
            _ => {
                let r = self.engine.solve(&p, -max, max)?;
                if target.is_some_and(|t| r.value < t) {
                    return Err(self.off_proof());
                }
                r
            }
        };
        let mv = transform.apply_move(result.best_move.expect("position with moves"), n);
        let stored = *self.engine.decisions.lock().unwrap().entry(key).or_insert(mv);
        Ok(transform.inverse().apply_move(stored, n))
    }

    /// Per-move values for the side to move: exact when the child has at
    /// most `exact_cap` empties, dictionary bounds above `e2`, `None`
    /// otherwise.
    pub fn analyze(&mut self, exact_cap: u32) -> Result<Vec<MoveAnalysis>, PlayerError> {
        let p = self.position;
        let mut out = Vec::new();
        let moves = if p.has_moves() || p.is_terminal() { p.legal_moves() } else { vec![Move::Pass] };
        for mv in moves {
            let child = p.apply_move(mv)?;
            let max = child.max_score();
            let bounds = if child.empties() <= exact_cap.min(self.engine.config.search.max_empties) {
                let v = self.engine.solve(&child, -max, max)?.value;
                Some(SolveBounds::exact(-v))
            } else if child.empties() >= self.engine.config.e2 {
                self.engine.proven_bounds(&child).map(|b| b.negate())
            } else {
                None
            };
            out.push(MoveAnalysis { mv, bounds });
        }
        Ok(out)
    }

    pub fn start(&self) -> &Position {
        &self.start
    }
}

/// Legality of one recorded move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveCheck {
    pub square: Square,
    pub color: Color,
    /// Forced passes played just before this move.
    pub passes_before: u32,
    pub legal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// Checks up to and including the first illegal move.
    pub moves: Vec<MoveCheck>,
    pub first_illegal: Option<usize>,
    pub black: u32,
    pub white: u32,
    pub empties: u32,
    /// Neither side can move after the last move.
    pub finished: bool,
    /// Black's score with empties going to the winner.
    pub score: Score,
    pub claimed: Option<Score>,
}

impl VerificationReport {
    pub fn legal_moves(&self) -> usize {
        self.moves.iter().filter(|m| m.legal).count()
    }

    pub fn full_board(&self) -> bool {
        self.empties == 0
    }

    pub fn claim_matches(&self) -> bool {
        self.claimed.is_none_or(|c| self.finished && c == self.score)
    }

    pub fn passed(&self) -> bool {
        self.first_illegal.is_none() && self.claim_matches()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_illegal {
            Some(i) => writeln!(f, "move {} ({}) is illegal", i + 1, self.moves[i].square)?,
            None => writeln!(f, "{} legal moves", self.legal_moves())?,
        }
        writeln!(
            f,
            "black {} white {} empty {}{}",
            self.black,
            self.white,
            self.empties,
            if self.finished { " (game over)" } else { "" }
        )?;
        write!(f, "score {:+} for black", self.score)?;
        if let Some(c) = self.claimed {
            write!(f, ", claimed {c:+}: {}", if self.claim_matches() { "match" } else { "MISMATCH" })?;
        }
        Ok(())
    }
}

/// Replays `record` from the initial position of a `size` board, passing
/// where forced, and stops at the first illegal move.
pub fn verify_record(record: &str, size: usize, claimed: Option<Score>) -> Result<VerificationReport, BoardError> {
    let mut p = Position::initial(size)?;
    let squares = parse_record(record, p.size())?;
    let mut plies = 0usize;
    let mut moves = Vec::with_capacity(squares.len());
    let mut first_illegal = None;
    for (i, sq) in squares.into_iter().enumerate() {
        let mut passes_before = 0;
        if !p.has_moves() && !p.is_terminal() {
            p = p.pass();
            plies += 1;
            passes_before = 1;
        }
        let color = Color::to_move_after(plies);
        let legal = p.is_legal(sq);
        moves.push(MoveCheck {
            square: sq,
            color,
            passes_before,
            legal,
        });
        if !legal {
            first_illegal = Some(i);
            break;
        }
        p = p.play_unchecked(sq);
        plies += 1;
    }
    let (mine, theirs) = (p.mover().count_ones(), p.opponent().count_ones());
    let (black, white, score) = match Color::to_move_after(plies) {
        Color::Black => (mine, theirs, p.score_now()),
        Color::White => (theirs, mine, -p.score_now()),
    };
    Ok(VerificationReport {
        moves,
        first_illegal,
        black,
        white,
        empties: p.empties(),
        finished: p.is_terminal(),
        score,
        claimed,
    })
}
