use std::collections::BTreeMap;

use crate::board::{Position, Score};
use crate::bounds::SolveBounds;
use crate::eval::EstimateDictionary;
use crate::frontier::{check_window, BoundDictionary, FrontierConfig, FrontierError, Task, TaskSet, Traversal};
use crate::search::{SearchConfig, Searcher};

/// Solver outcome for one frontier task.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaskResult {
    pub position: Position,
    pub alpha: Score,
    pub beta: Score,
    /// Fail-soft value of the search.
    pub value: Score,
    pub bounds: SolveBounds,
    pub nodes: u64,
}

/// Anything that turns a batch of frontier tasks into proven bounds.
pub trait TaskSolver {
    fn solve_batch(&mut self, tasks: &TaskSet) -> Result<Vec<TaskResult>, FrontierError>;
}

/// Solves every task in turn with one shared searcher.
pub struct DirectSolver {
    searcher: Searcher,
    pub nodes: u64,
    pub solved: usize,
}

impl DirectSolver {
    pub fn new(cfg: SearchConfig) -> Self {
        DirectSolver {
            searcher: Searcher::new(cfg),
            nodes: 0,
            solved: 0,
        }
    }
}

impl TaskSolver for DirectSolver {
    fn solve_batch(&mut self, tasks: &TaskSet) -> Result<Vec<TaskResult>, FrontierError> {
        let mut out = Vec::with_capacity(tasks.len());
        for (p, t) in tasks.iter() {
            let r = self
                .searcher
                .solve_exact(p, t.alpha, t.beta)
                .map_err(|e| FrontierError::Solver(e.to_string()))?;
            self.nodes += r.stats.nodes_visited;
            self.solved += 1;
            out.push(TaskResult {
                position: *p,
                alpha: t.alpha,
                beta: t.beta,
                value: r.value,
                bounds: r.bounds,
                nodes: r.stats.nodes_visited,
            });
        }
        Ok(out)
    }
}

/// Per-iteration accounting of a proof run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationRecord {
    pub tasks: usize,
    pub estimate: Score,
    pub dictionary_size: usize,
}

#[derive(Clone, Debug)]
pub struct ProofOutcome {
    /// Fail-soft value of the root under the requested window.
    pub value: Score,
    pub alpha: Score,
    pub beta: Score,
    pub bounds: BoundDictionary,
    pub estimates: EstimateDictionary,
    pub iterations: Vec<IterationRecord>,
    pub solver_calls: usize,
    /// Every task result in the order received.
    pub results: Vec<TaskResult>,
}

impl ProofOutcome {
    pub fn proven_bounds(&self, max: Score) -> SolveBounds {
        SolveBounds::from_fail_soft(self.value, self.alpha, self.beta, max)
    }
}

/// Repeats the frontier traversal, solving the positions it asks for, until
/// a traversal needs nothing new. The returned dictionary alone proves the
/// returned value.
pub fn prove_loop<S: TaskSolver + ?Sized>(
    p: &Position,
    alpha: Score,
    beta: Score,
    solver: &mut S,
    cfg: &FrontierConfig,
) -> Result<ProofOutcome, FrontierError> {
    prove_loop_from(p, alpha, beta, solver, cfg, BoundDictionary::new(), EstimateDictionary::new())
}

/// [`prove_loop`] starting from existing dictionaries.
pub fn prove_loop_from<S: TaskSolver + ?Sized>(
    p: &Position,
    alpha: Score,
    beta: Score,
    solver: &mut S,
    cfg: &FrontierConfig,
    mut d: BoundDictionary,
    mut d_prime: EstimateDictionary,
) -> Result<ProofOutcome, FrontierError> {
    check_window(p, alpha, beta)?;
    if cfg.e2 >= cfg.e1 || cfg.max_iterations == 0 {
        return Err(FrontierError::Config(format!("unusable frontiers e1={} e2={}", cfg.e1, cfg.e2)));
    }
    let mut requested: BTreeMap<Position, (Score, Score)> = BTreeMap::new();
    let mut iterations = Vec::new();
    let mut results = Vec::new();
    for solver_calls in 0..cfg.max_iterations {
        let mut tasks = TaskSet::new();
        let v = Traversal::new(&d, &d_prime, cfg).traverse(p, alpha, beta, &mut tasks);
        iterations.push(IterationRecord {
            tasks: tasks.len(),
            estimate: v,
            dictionary_size: d.len(),
        });
        if tasks.is_empty() {
            return Ok(ProofOutcome {
                value: v,
                alpha,
                beta,
                bounds: d,
                estimates: d_prime,
                iterations,
                solver_calls,
                results,
            });
        }
        widen_with_history(&mut tasks, &mut requested);
        let batch = solver.solve_batch(&tasks)?;
        for r in batch {
            d.merge(&r.position, r.bounds)?;
            d_prime.insert(&r.position, r.value);
            results.push(r);
        }
    }
    Err(FrontierError::IterationCap(cfg.max_iterations))
}

/// A position asked for again is solved under the union of every window
/// requested for it so far.
fn widen_with_history(tasks: &mut TaskSet, requested: &mut BTreeMap<Position, (Score, Score)>) {
    for (p, t) in tasks.iter_mut() {
        let w = requested.entry(*p).or_insert((t.alpha, t.beta));
        w.0 = w.0.min(t.alpha);
        w.1 = w.1.max(t.beta);
        *t = Task {
            alpha: w.0,
            beta: w.1,
            estimate: t.estimate,
        };
    }
}
