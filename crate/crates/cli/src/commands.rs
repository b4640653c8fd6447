use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use othello_core::board::parse_record;
use othello_core::eval::EvalWeights;
use othello_core::frontier::{certify, enumerate_frontier, prove_loop, traverse, BoundDictionary, FrontierConfig, TaskSet};
use othello_core::jobs::{self, JobManifest, JobSolver, RunOptions, ShardPolicy};
use othello_core::player::{verify_record, Engine, EngineConfig, PlaySession};
use othello_core::search::{SearchConfig, Searcher};
use othello_core::store::{self, export_stats, Book, BookEntry, Source, StatRow};
use othello_core::{Color, Move, Position, Score};

use crate::api;

#[derive(Debug, Parser)]
#[command(name = "othello", version, about = "Weak solving and perfect play for small-board Othello")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Board size: 4, 6 or 8.
    #[arg(long, global = true)]
    pub size: Option<usize>,
    /// Frontier for choosing sub-problems.
    #[arg(long, global = true, visible_alias = "empties")]
    pub e1: Option<u32>,
    /// Frontier handed to the exact solver.
    #[arg(long, global = true)]
    pub e2: Option<u32>,
    /// Book of proven bounds.
    #[arg(long, global = true)]
    pub book: Option<PathBuf>,
    /// Search window as `alpha:beta`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// Seed for every random choice, including move-order tie breaks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count the canonical positions first reached at the e1 frontier.
    Enumerate,
    /// Prove the value of the initial position.
    Prove {
        /// Evaluation weights file (`name = value` lines).
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Keep every round's manifest and journal here.
        #[arg(long)]
        jobs_dir: Option<PathBuf>,
        /// Write per-task node counts for `stats`.
        #[arg(long)]
        runs: Option<PathBuf>,
        /// Solve each task under its own window only.
        #[arg(long)]
        task_windows: bool,
    },
    /// Batch solving in separate steps.
    Jobs {
        #[command(subcommand)]
        action: JobsAction,
    },
    /// Solve a single position exactly.
    Solve {
        /// Position text: cells row by row, then the side to move.
        #[arg(long, conflicts_with = "record")]
        position: Option<String>,
        /// Moves from the initial position.
        #[arg(long)]
        record: Option<String>,
    },
    /// Replay a game record and report legality and the final score.
    Verify {
        #[arg(required = true, num_args = 1..)]
        record: Vec<String>,
        /// Black's claimed final score.
        #[arg(long, allow_hyphen_values = true)]
        claim: Option<Score>,
    },
    /// Play against the engine on the terminal.
    Play {
        /// Colour the engine takes.
        #[arg(long, default_value = "white")]
        engine: String,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Export task statistics as CSV.
    Stats {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum JobsAction {
    /// Write a manifest of the tasks the next traversal needs.
    Shard {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "run")]
        run_id: String,
        #[arg(long)]
        task_windows: bool,
    },
    /// Solve a manifest, resuming from its journal if there is one.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        journal: Option<PathBuf>,
    },
    /// Fold a finished manifest into the book.
    Merge {
        #[arg(long)]
        manifest: PathBuf,
    },
    Status {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        journal: Option<PathBuf>,
    },
}

fn parse_window(text: &str) -> Result<(Score, Score)> {
    let (a, b) = text.split_once(':').ok_or_else(|| anyhow!("window must look like alpha:beta"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

impl Common {
    fn size_or(&self, default: usize) -> usize {
        self.size.unwrap_or(default)
    }

    fn root(&self) -> Result<Position> {
        Ok(Position::initial(self.size_or(6))?)
    }

    fn window(&self, p: &Position) -> Result<(Score, Score)> {
        let max = p.max_score();
        let (a, b) = match &self.window {
            Some(w) => parse_window(w)?,
            None => (-max, max),
        };
        if a >= b || a < -max || b > max {
            bail!("window {a}:{b} is not inside -{max}:{max}");
        }
        Ok((a, b))
    }

    fn frontier(&self, p: &Position) -> Result<FrontierConfig> {
        let mut cfg = FrontierConfig::for_root(p);
        if let Some(e1) = self.e1 {
            cfg.e1 = e1;
        }
        if let Some(e2) = self.e2 {
            cfg.e2 = e2;
        }
        cfg.tie_break_seed = self.seed;
        cfg.validate(p)?;
        Ok(cfg)
    }

    fn load_book(&self) -> Result<Option<Book>> {
        match &self.book {
            Some(path) if path.exists() => Ok(Some(
                store::load_book(path).with_context(|| format!("reading {}", path.display()))?,
            )),
            _ => Ok(None),
        }
    }
}

fn search_config() -> SearchConfig {
    SearchConfig {
        tt_size_log2: 20,
        max_empties: 64,
        ..SearchConfig::default()
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Runs one command. `Ok(false)` reports a negative verdict (a failed
/// verification or certification) rather than an error.
pub fn execute(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<bool> {
    let c = &cli.common;
    match cli.command {
        Command::Enumerate => {
            let p = c.root()?;
            let e = c.e1.unwrap_or(p.empties().saturating_sub(4));
            let count = enumerate_frontier(&p, e).len();
            writeln!(out, "{count} canonical positions with {e} empties")?;
            Ok(true)
        }
        Command::Prove {
            weights,
            jobs_dir,
            runs,
            task_windows,
        } => prove(c, weights, jobs_dir, runs, task_windows, out),
        Command::Jobs { action } => jobs_command(c, action, out),
        Command::Solve { position, record } => solve(c, position, record, out),
        Command::Verify { record, claim } => {
            let report = verify_record(&record.join(" "), c.size_or(8), claim)?;
            writeln!(out, "{report}")?;
            Ok(report.passed())
        }
        Command::Play { engine } => play(c, &engine, input, out),
        Command::Serve { port } => {
            let state = api::AppState::new(engines(c)?);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
                writeln!(out, "listening on http://127.0.0.1:{port}")?;
                axum::serve(listener, api::router(state)).await?;
                Ok::<_, anyhow::Error>(())
            })?;
            Ok(true)
        }
        Command::Stats { runs, out: dir } => {
            let rows = store::rows_from_text(&std::fs::read_to_string(&runs)?)?;
            let stats = export_stats(&rows);
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("by_cost.csv"), &stats.by_cost)?;
            std::fs::write(dir.join("by_estimate.csv"), &stats.by_estimate)?;
            writeln!(out, "{} tasks, {} nodes", rows.len(), rows.iter().map(|r| r.nodes).sum::<u64>())?;
            Ok(true)
        }
    }
}

fn prove(
    c: &Common,
    weights: Option<PathBuf>,
    jobs_dir: Option<PathBuf>,
    runs: Option<PathBuf>,
    task_windows: bool,
    out: &mut dyn Write,
) -> Result<bool> {
    let p = c.root()?;
    let (alpha, beta) = c.window(&p)?;
    let mut cfg = c.frontier(&p)?;
    if let Some(w) = weights {
        cfg.weights = EvalWeights::load(&w).with_context(|| format!("reading {}", w.display()))?;
    }
    let policy = if task_windows { ShardPolicy::task_windows_only() } else { ShardPolicy::default() };
    let mut solver = JobSolver::new(policy, search_config(), c.workers.max(1));
    if let Some(dir) = jobs_dir {
        solver = solver.with_dir(dir);
    }
    let start = Instant::now();
    let outcome = prove_loop(&p, alpha, beta, &mut solver, &cfg)?;
    let proven = outcome.proven_bounds(p.max_score());
    let certified = certify(&p, outcome.value, alpha, beta, &outcome.bounds, &cfg);
    writeln!(
        out,
        "value {} ({proven}) with window {alpha}:{beta}, e1 {} e2 {}",
        outcome.value, cfg.e1, cfg.e2
    )?;
    writeln!(
        out,
        "{} rounds, {} tasks, {} nodes, {:.1}s",
        solver.rounds,
        outcome.results.len(),
        solver.nodes,
        start.elapsed().as_secs_f64()
    )?;
    writeln!(out, "certified {certified}")?;
    if let Some(path) = &c.book {
        let mut book = c.load_book()?.unwrap_or_default();
        book.merge(&Book::from_outcome(&outcome, Some(now())))?;
        store::save_book(path, &book)?;
        writeln!(out, "book {} ({} entries)", path.display(), book.len())?;
    }
    if let Some(path) = runs {
        std::fs::write(&path, store::rows_to_text(&StatRow::from_outcome(&outcome)))?;
    }
    Ok(certified)
}

fn jobs_command(c: &Common, action: JobsAction, out: &mut dyn Write) -> Result<bool> {
    match action {
        JobsAction::Shard {
            manifest,
            run_id,
            task_windows,
        } => {
            let p = c.root()?;
            let (alpha, beta) = c.window(&p)?;
            let cfg = c.frontier(&p)?;
            let book = c.load_book()?.unwrap_or_default();
            let (d, d_prime) = (book.bound_dictionary(), book.estimate_dictionary());
            let mut tasks = TaskSet::new();
            let v = traverse(&p, &d, &d_prime, &mut tasks, alpha, beta, &cfg);
            if tasks.is_empty() {
                let ok = certify(&p, v, alpha, beta, &d, &cfg);
                writeln!(out, "no tasks left: value {v}, certified {ok}")?;
                return Ok(ok);
            }
            let policy = if task_windows { ShardPolicy::task_windows_only() } else { ShardPolicy::default() };
            let m = jobs::shard(&tasks, &policy, search_config(), &run_id)?;
            m.save(&manifest)?;
            writeln!(out, "{} tasks (estimate {v}) written to {}", m.tasks.len(), manifest.display())?;
            Ok(true)
        }
        JobsAction::Run { manifest, journal } => {
            let journal = journal.unwrap_or_else(|| manifest.with_extension("journal"));
            let m = if journal.exists() {
                jobs::resume(&manifest, &journal, c.workers)?
            } else {
                let mut m = JobManifest::load(&manifest)?;
                let opts = RunOptions {
                    journal: Some(journal.clone()),
                    ..RunOptions::with_workers(c.workers)
                };
                jobs::run(&mut m, &opts)?;
                m.save(&manifest)?;
                m
            };
            writeln!(out, "{}", m.counts())?;
            Ok(true)
        }
        JobsAction::Merge { manifest } => {
            let path = c.book.clone().ok_or_else(|| anyhow!("--book is required"))?;
            let m = JobManifest::load(&manifest)?;
            let mut book = c.load_book()?.unwrap_or_default();
            let (mut d, mut d_prime) = (book.bound_dictionary(), book.estimate_dictionary());
            let report = jobs::merge(&m, &mut d, &mut d_prime)?;
            let stamp = now();
            for t in &m.tasks {
                let bounds = t.result.expect("merge checked every task is finished");
                book.insert(
                    &t.position,
                    BookEntry {
                        bounds,
                        source: Source::Proved,
                        nodes: t.nodes,
                        timestamp: Some(stamp),
                    },
                )?;
            }
            store::save_book(&path, &book)?;
            writeln!(
                out,
                "merged {} ({} exact, {} bounds only, {} against prediction); book has {} entries",
                report.merged,
                report.exact,
                report.widened.len(),
                report.mismatches.len(),
                book.len()
            )?;
            Ok(true)
        }
        JobsAction::Status { manifest, journal } => {
            let mut m = JobManifest::load(&manifest)?;
            if let Some(j) = journal.filter(|j| j.exists()) {
                jobs::replay_journal(&mut m, &j)?;
            }
            writeln!(out, "{} {}", m.run_id, m.counts())?;
            Ok(true)
        }
    }
}

fn solve(c: &Common, position: Option<String>, record: Option<String>, out: &mut dyn Write) -> Result<bool> {
    let p = match (position, record) {
        (Some(text), _) => text.parse::<Position>()?,
        (None, Some(r)) => {
            let mut p = c.root()?;
            for sq in parse_record(&r, p.size())? {
                if !p.has_moves() && !p.is_terminal() {
                    p = p.pass();
                }
                p = p.apply_move(Move::Place(sq))?;
            }
            p
        }
        (None, None) => c.root()?,
    };
    let (alpha, beta) = c.window(&p)?;
    let r = Searcher::new(search_config()).solve_exact(&p, alpha, beta)?;
    writeln!(out, "value {} {}", r.value, r)?;
    Ok(true)
}

/// The book's engine, plus an exact engine for 4x4.
fn engines(c: &Common) -> Result<HashMap<u8, Arc<Engine>>> {
    let mut map = HashMap::new();
    map.insert(4u8, Engine::new(BoundDictionary::new(), EngineConfig::new(12)));
    let book = c.load_book()?;
    let size = c.size.or_else(|| book.as_ref().and_then(|b| b.iter().next().map(|(p, _)| p.size() as usize)));
    if let Some(size) = size.filter(|&s| s != 4) {
        let root = Position::initial(size)?;
        let dict = book.as_ref().map(Book::bound_dictionary).unwrap_or_default();
        let e2 = c
            .e2
            .or_else(|| dict.iter().map(|(p, _)| p.empties()).max())
            .unwrap_or(root.empties().saturating_sub(6));
        map.insert(size as u8, Engine::new(dict, EngineConfig::new(e2)));
    }
    Ok(map)
}

fn play(c: &Common, engine: &str, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<bool> {
    let color = match engine.to_ascii_lowercase().as_str() {
        "black" | "b" => Color::Black,
        "white" | "w" => Color::White,
        other => bail!("unknown colour {other:?}"),
    };
    let size = c.size_or(4);
    let engine = engines(c)?
        .remove(&(size as u8))
        .ok_or_else(|| anyhow!("no engine for size {size}; pass --book"))?;
    let mut s = PlaySession::new(size, color, engine)?;
    if let Some(v) = s.certified_value() {
        writeln!(out, "engine plays {color}, certified to reach {v:+}")?;
    }
    let mut line = String::new();
    while !s.is_over() {
        writeln!(out, "{}", s.position().diagram(s.to_move()))?;
        if s.engine_to_move() {
            let mv = s.engine_move()?;
            writeln!(out, "engine plays {mv}")?;
            continue;
        }
        write!(out, "{} to move> ", s.to_move())?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(true);
        }
        match line.trim() {
            "" => continue,
            "quit" | "q" => return Ok(true),
            text => match Move::parse(text, s.position().size()).map_err(anyhow::Error::from).and_then(|mv| {
                s.play_opponent(mv)?;
                Ok(())
            }) {
                Ok(()) => {}
                Err(e) => writeln!(out, "{e}")?,
            },
        }
    }
    writeln!(out, "{}", s.position().diagram(s.to_move()))?;
    let score = s.final_score(Color::Black).unwrap_or(0);
    writeln!(out, "game over: {} ({score:+} for black)", s.record())?;
    Ok(true)
}

pub fn parse_and_execute<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<bool>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    execute(Cli::try_parse_from(args)?, input, out)
}
