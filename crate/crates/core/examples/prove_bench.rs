//! Times a proof of the initial position through the job runner.
//!
//! `prove_bench SIZE GAP ALPHA BETA [WORKERS] [BOOK]`

use std::time::Instant;

use othello_core::frontier::{certify, prove_loop, FrontierConfig, FrontierError, TaskResult, TaskSet, TaskSolver};
use othello_core::jobs::{JobSolver, ShardPolicy};
use othello_core::search::SearchConfig;
use othello_core::store::{save_book, Book};
use othello_core::Position;

struct Verbose(JobSolver, Instant);

impl TaskSolver for Verbose {
    fn solve_batch(&mut self, tasks: &TaskSet) -> Result<Vec<TaskResult>, FrontierError> {
        let r = self.0.solve_batch(tasks)?;
        let exact = r.iter().filter(|r| r.bounds.is_exact()).count();
        println!("batch {} tasks ({exact} exact), total nodes {} at {:?}", tasks.len(), self.0.nodes, self.1.elapsed());
        Ok(r)
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize| args.get(i).map(|s| s.parse::<i64>().unwrap());
    let size = arg(1).unwrap_or(6) as usize;
    let gap = arg(2).unwrap_or(6) as u32;
    let max = (size * size) as i32;
    let alpha = arg(3).map_or(-max, |v| v as i32);
    let beta = arg(4).map_or(max, |v| v as i32);
    let workers = arg(5).unwrap_or(1) as usize;
    let p = Position::initial(size).unwrap();
    let n = p.empties();
    let cfg = FrontierConfig::new(n - gap + 2, n - gap);
    let solver = JobSolver::new(ShardPolicy::task_windows_only(), SearchConfig::default(), workers);
    let mut solver = Verbose(solver, Instant::now());
    let out = prove_loop(&p, alpha, beta, &mut solver, &cfg).unwrap();
    println!(
        "value {} iterations {:?} tasks {} nodes {} in {:?}",
        out.value,
        out.iterations.iter().map(|i| i.tasks).collect::<Vec<_>>(),
        out.results.len(),
        solver.0.nodes,
        solver.1.elapsed()
    );
    println!("certified {}", certify(&p, out.value, alpha, beta, &out.bounds, &cfg));
    if let Some(path) = args.get(6) {
        save_book(path.as_ref(), &Book::from_outcome(&out, None)).unwrap();
    }
}
