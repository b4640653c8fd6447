//! Sharding, execution and merging of frontier solve tasks.
//!
//! A [`TaskSet`] becomes a [`JobManifest`]: one [`TaskRecord`] per frontier
//! position with the window it will be solved under and the lane it runs
//! in. [`run`] solves pending records on a pool of threads, each task with
//! its own [`Searcher`], and can append every status change to a journal so
//! an interrupted run resumes without solving anything twice. [`merge`]
//! folds finished records into the proof dictionaries.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Mutex};
use std::time::Instant;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::board::{Position, Score};
use crate::bounds::SolveBounds;
use crate::eval::EstimateDictionary;
use crate::frontier::{BoundDictionary, FrontierError, TaskResult, TaskSet, TaskSolver};
use crate::search::{SearchConfig, SearchError, Searcher};

#[derive(Debug, Error)]
pub enum JobError {
    #[error("no tasks to shard")]
    EmptyTaskSet,
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("journal belongs to run {found}, expected {expected}")]
    ForeignJournal { expected: String, found: String },
    #[error("task {index} finished twice with different results")]
    DuplicateConflict { index: usize },
    #[error("run interrupted after {completed} completed tasks")]
    Interrupted { completed: usize },
    #[error("{0} tasks are not finished")]
    Unfinished(usize),
    #[error(transparent)]
    Frontier(#[from] FrontierError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lane {
    /// Tasks expected to be close; solved on the worker pool.
    Parallel,
    /// Tasks expected to be one-sided; solved one at a time in manifest order.
    Serial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShardPolicy {
    /// Predictions with a magnitude below this go to the parallel lane.
    pub threshold: Score,
    /// Window every serial task covers in addition to its own.
    pub serial_window: Option<(Score, Score)>,
    /// Window every parallel task covers in addition to its own.
    pub parallel_window: Option<(Score, Score)>,
}

impl Default for ShardPolicy {
    fn default() -> Self {
        ShardPolicy {
            threshold: 30,
            serial_window: Some((-3, 3)),
            parallel_window: Some((-1, 1)),
        }
    }
}

impl ShardPolicy {
    /// Tasks are solved under exactly the window the traversal asked for.
    pub fn task_windows_only() -> Self {
        ShardPolicy {
            serial_window: None,
            parallel_window: None,
            ..ShardPolicy::default()
        }
    }

    pub fn lane(&self, prediction: Score) -> Lane {
        if prediction.abs() < self.threshold {
            Lane::Parallel
        } else {
            Lane::Serial
        }
    }

    /// Union of the lane window with `(alpha, beta)`, clipped to the score
    /// range.
    pub fn window(&self, lane: Lane, alpha: Score, beta: Score, max: Score) -> (Score, Score) {
        let extra = match lane {
            Lane::Parallel => self.parallel_window,
            Lane::Serial => self.serial_window,
        };
        let (a, b) = match extra {
            Some((la, lb)) => (alpha.min(la), beta.max(lb)),
            None => (alpha, beta),
        };
        (a.max(-max), b.min(max))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TaskStatus {
    Pending,
    Running,
    /// Exact value found.
    Solved,
    /// Only a bound found; the next round asks again with a wider window.
    Widened,
}

impl TaskStatus {
    pub fn is_finished(self) -> bool {
        matches!(self, TaskStatus::Solved | TaskStatus::Widened)
    }
}

impl fmt::Display for TaskStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskStatus::Pending => "pending",
            TaskStatus::Running => "running",
            TaskStatus::Solved => "solved",
            TaskStatus::Widened => "widened",
        })
    }
}

impl FromStr for TaskStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pending" => Ok(TaskStatus::Pending),
            "running" => Ok(TaskStatus::Running),
            "solved" => Ok(TaskStatus::Solved),
            "widened" => Ok(TaskStatus::Widened),
            _ => Err(format!("unknown status {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskRecord {
    pub position: Position,
    pub alpha: Score,
    pub beta: Score,
    pub prediction: Score,
    pub status: TaskStatus,
    pub result: Option<SolveBounds>,
    pub nodes: u64,
    pub millis: u64,
    pub worker: Option<usize>,
}

impl TaskRecord {
    /// The fail-soft search value the stored bounds came from.
    pub fn value(&self) -> Option<Score> {
        let b = self.result?;
        Some(if b.is_exact() || b.lower >= self.beta {
            b.lower
        } else {
            b.upper
        })
    }

    fn finish(&mut self, outcome: &Outcome) {
        self.result = Some(outcome.bounds);
        self.nodes = outcome.nodes;
        self.millis = outcome.millis;
        self.worker = Some(outcome.worker);
        self.status = if outcome.bounds.is_exact() {
            TaskStatus::Solved
        } else {
            TaskStatus::Widened
        };
    }
}

/// Result of solving one record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Outcome {
    bounds: SolveBounds,
    nodes: u64,
    millis: u64,
    worker: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobManifest {
    pub run_id: String,
    pub policy: ShardPolicy,
    pub search: SearchConfig,
    pub tasks: Vec<TaskRecord>,
}

/// Turns a task set into a manifest, in the task set's (canonical) order.
pub fn shard(
    tasks: &TaskSet,
    policy: &ShardPolicy,
    search: SearchConfig,
    run_id: &str,
) -> Result<JobManifest, JobError> {
    if tasks.is_empty() {
        return Err(JobError::EmptyTaskSet);
    }
    if run_id.is_empty() || run_id.contains(char::is_whitespace) {
        return Err(JobError::Parse {
            line: 0,
            message: format!("run id {run_id:?} must be one non-empty word"),
        });
    }
    let records = tasks
        .iter()
        .map(|(p, t)| {
            let lane = policy.lane(t.estimate);
            let (alpha, beta) = policy.window(lane, t.alpha, t.beta, p.max_score());
            TaskRecord {
                position: *p,
                alpha,
                beta,
                prediction: t.estimate,
                status: TaskStatus::Pending,
                result: None,
                nodes: 0,
                millis: 0,
                worker: None,
            }
        })
        .collect();
    Ok(JobManifest {
        run_id: run_id.to_string(),
        policy: *policy,
        search,
        tasks: records,
    })
}

fn window_text(w: Option<(Score, Score)>) -> String {
    match w {
        Some((a, b)) => format!("{a}:{b}"),
        None => "task".to_string(),
    }
}

fn parse_window(s: &str) -> Result<Option<(Score, Score)>, String> {
    if s == "task" {
        return Ok(None);
    }
    let (a, b) = s.split_once(':').ok_or_else(|| format!("bad window {s:?}"))?;
    let a: Score = a.parse().map_err(|_| format!("bad window {s:?}"))?;
    let b: Score = b.parse().map_err(|_| format!("bad window {s:?}"))?;
    if a >= b {
        return Err(format!("empty window {s:?}"));
    }
    Ok(Some((a, b)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StatusCounts {
    pub pending: usize,
    pub running: usize,
    pub solved: usize,
    pub widened: usize,
    pub nodes: u64,
}

impl fmt::Display for StatusCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pending {} running {} solved {} widened {} nodes {}",
            self.pending, self.running, self.solved, self.widened, self.nodes
        )
    }
}

impl JobManifest {
    pub fn lane(&self, index: usize) -> Lane {
        self.policy.lane(self.tasks[index].prediction)
    }

    fn config_line(&self) -> String {
        format!(
            "threshold={} serial={} parallel={} tt={} negascout={} aspiration={} ttorder={} max_empties={}",
            self.policy.threshold,
            window_text(self.policy.serial_window),
            window_text(self.policy.parallel_window),
            self.search.tt_size_log2,
            self.search.use_negascout as u8,
            self.search.aspiration_enabled as u8,
            self.search.tt_ordering_min_relative_depth,
            self.search.max_empties,
        )
    }

    /// First 16 hex digits of the SHA-256 of the configuration and the
    /// task list as sharded, so a journal can be matched to its manifest.
    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.config_line().as_bytes());
        for t in &self.tasks {
            h.update(format!("{} {} {} {}\n", t.position.to_text(), t.alpha, t.beta, t.prediction).as_bytes());
        }
        hex::encode(h.finalize())[..16].to_string()
    }

    pub fn counts(&self) -> StatusCounts {
        let mut c = StatusCounts::default();
        for t in &self.tasks {
            match t.status {
                TaskStatus::Pending => c.pending += 1,
                TaskStatus::Running => c.running += 1,
                TaskStatus::Solved => c.solved += 1,
                TaskStatus::Widened => c.widened += 1,
            }
            c.nodes += t.nodes;
        }
        c
    }

    /// Header line, then `position alpha beta prediction status lower upper
    /// nodes millis worker` per task with `-` for missing fields.
    pub fn to_text(&self) -> String {
        let mut out = format!("#manifest {} {} {}\n", self.run_id, self.config_hash(), self.config_line());
        for t in &self.tasks {
            let (lower, upper) = match t.result {
                Some(b) => (b.lower.to_string(), b.upper.to_string()),
                None => ("-".to_string(), "-".to_string()),
            };
            let worker = t.worker.map_or("-".to_string(), |w| w.to_string());
            let _ = writeln!(
                out,
                "{} {} {} {} {} {} {} {} {} {}",
                t.position.to_text(),
                t.alpha,
                t.beta,
                t.prediction,
                t.status,
                lower,
                upper,
                t.nodes,
                t.millis,
                worker
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<JobManifest, JobError> {
        let err = |line: usize, message: String| JobError::Parse { line, message };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty manifest".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() < 3 || fields[0] != "#manifest" {
            return Err(err(1, "missing #manifest header".into()));
        }
        let run_id = fields[1].to_string();
        let hash = fields[2].to_string();
        let mut policy = ShardPolicy::default();
        let mut search = SearchConfig::default();
        for kv in &fields[3..] {
            let (k, v) = kv.split_once('=').ok_or_else(|| err(1, format!("bad setting {kv:?}")))?;
            let num = |v: &str| v.parse::<i64>().map_err(|_| err(1, format!("bad value in {kv:?}")));
            match k {
                "threshold" => policy.threshold = num(v)? as Score,
                "serial" => policy.serial_window = parse_window(v).map_err(|m| err(1, m))?,
                "parallel" => policy.parallel_window = parse_window(v).map_err(|m| err(1, m))?,
                "tt" => search.tt_size_log2 = num(v)? as u32,
                "negascout" => search.use_negascout = num(v)? != 0,
                "aspiration" => search.aspiration_enabled = num(v)? != 0,
                "ttorder" => search.tt_ordering_min_relative_depth = num(v)? as u32,
                "max_empties" => search.max_empties = num(v)? as u32,
                _ => return Err(err(1, format!("unknown setting {k:?}"))),
            }
        }
        let mut tasks = Vec::new();
        for (i, line) in lines {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            tasks.push(parse_record(line).map_err(|m| err(line_no, m))?);
        }
        let manifest = JobManifest {
            run_id,
            policy,
            search,
            tasks,
        };
        if manifest.config_hash() != hash {
            return Err(err(1, format!("config hash {hash} does not match contents")));
        }
        Ok(manifest)
    }

    /// Writes to a temporary file next to `path`, then renames it over
    /// `path`.
    pub fn save(&self, path: &Path) -> Result<(), JobError> {
        write_atomic(path, self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<JobManifest, JobError> {
        JobManifest::from_text(&fs::read_to_string(path)?)
    }
}

fn parse_record(line: &str) -> Result<TaskRecord, String> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != 11 {
        return Err(format!("expected 11 fields, found {}", f.len()));
    }
    let position: Position = format!("{} {}", f[0], f[1]).parse().map_err(|e| format!("{e}"))?;
    let int = |s: &str| s.parse::<i64>().map_err(|_| format!("bad number {s:?}"));
    let opt = |s: &str| if s == "-" { Ok(None) } else { int(s).map(Some) };
    let (alpha, beta, prediction) = (int(f[2])? as Score, int(f[3])? as Score, int(f[4])? as Score);
    let max = position.max_score();
    if alpha >= beta || alpha < -max || beta > max {
        return Err(format!("invalid window ({alpha}, {beta})"));
    }
    let status: TaskStatus = f[5].parse()?;
    let result = match (opt(f[6])?, opt(f[7])?) {
        (Some(l), Some(u)) => {
            let b = SolveBounds::new(l as Score, u as Score).ok_or("lower above upper")?;
            if !b.is_within(max) {
                return Err("bounds out of range".into());
            }
            Some(b)
        }
        (None, None) => None,
        _ => return Err("half a result".into()),
    };
    if status.is_finished() != result.is_some() || (status == TaskStatus::Solved) != result.is_some_and(|b| b.is_exact()) {
        return Err(format!("status {status} does not match result"));
    }
    Ok(TaskRecord {
        position,
        alpha,
        beta,
        prediction,
        status,
        result,
        nodes: int(f[8])? as u64,
        millis: int(f[9])? as u64,
        worker: opt(f[10])?.map(|w| w as usize),
    })
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Append-only log of status transitions: `run index running worker` when
/// a task is picked up and `run index done lower upper nodes millis worker`
/// when it finishes.
pub struct Journal {
    run_id: String,
    file: File,
}

impl Journal {
    pub fn open(path: &Path, run_id: &str) -> Result<Journal, JobError> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Journal {
            run_id: run_id.to_string(),
            file,
        })
    }

    fn append(&mut self, line: String) -> io::Result<()> {
        self.file.write_all(format!("{} {}\n", self.run_id, line).as_bytes())?;
        self.file.flush()
    }

    fn running(&mut self, index: usize, worker: usize) -> io::Result<()> {
        self.append(format!("{index} running {worker}"))
    }

    fn done(&mut self, index: usize, o: &Outcome) -> io::Result<()> {
        self.append(format!(
            "{index} done {} {} {} {} {}",
            o.bounds.lower, o.bounds.upper, o.nodes, o.millis, o.worker
        ))
    }
}

/// What replaying a journal did to a manifest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReplaySummary {
    pub restored: usize,
    /// Completions recorded more than once with identical results.
    pub duplicates: usize,
    /// Tasks picked up but never finished, now pending again.
    pub requeued: usize,
}

/// Applies the journal at `path` to `manifest`. A missing journal is
/// treated as empty.
pub fn replay_journal(manifest: &mut JobManifest, path: &Path) -> Result<ReplaySummary, JobError> {
    let mut summary = ReplaySummary::default();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(summary),
        Err(e) => return Err(e.into()),
    };
    let err = |line: usize, message: String| JobError::Parse { line, message };
    let mut finished = vec![false; manifest.tasks.len()];
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        if f[0] != manifest.run_id {
            return Err(JobError::ForeignJournal {
                expected: manifest.run_id.clone(),
                found: f[0].to_string(),
            });
        }
        let num = |s: &str| s.parse::<i64>().map_err(|_| err(i + 1, format!("bad number {s:?}")));
        let index = f.get(1).ok_or_else(|| err(i + 1, "missing index".into())).and_then(|s| num(s))? as usize;
        if index >= manifest.tasks.len() {
            return Err(err(i + 1, format!("task {index} not in manifest")));
        }
        match (f.get(2).copied(), f.len()) {
            (Some("running"), 4) => {
                if !finished[index] {
                    manifest.tasks[index].status = TaskStatus::Running;
                }
            }
            (Some("done"), 8) => {
                let bounds = SolveBounds::new(num(f[3])? as Score, num(f[4])? as Score)
                    .ok_or_else(|| err(i + 1, "lower above upper".into()))?;
                let outcome = Outcome {
                    bounds,
                    nodes: num(f[5])? as u64,
                    millis: num(f[6])? as u64,
                    worker: num(f[7])? as usize,
                };
                let task = &mut manifest.tasks[index];
                if finished[index] {
                    if task.result != Some(bounds) {
                        return Err(JobError::DuplicateConflict { index });
                    }
                    summary.duplicates += 1;
                    continue;
                }
                finished[index] = true;
                task.finish(&outcome);
                summary.restored += 1;
            }
            _ => return Err(err(i + 1, format!("malformed journal line {line:?}"))),
        }
    }
    for t in &mut manifest.tasks {
        if t.status == TaskStatus::Running {
            t.status = TaskStatus::Pending;
            summary.requeued += 1;
        }
    }
    Ok(summary)
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Threads in the parallel lane; serial tasks always use one.
    pub workers: usize,
    pub journal: Option<PathBuf>,
    /// Stop abruptly after this many completions, leaving the tasks picked
    /// up since then unfinished. Used to exercise resumption.
    pub crash_after: Option<usize>,
}

impl RunOptions {
    pub fn with_workers(workers: usize) -> Self {
        RunOptions {
            workers,
            ..RunOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub completed: usize,
    pub nodes: u64,
    pub millis: u64,
}

fn solve_task(search: &SearchConfig, t: &TaskRecord, worker: usize) -> Result<Outcome, SearchError> {
    let start = Instant::now();
    let r = Searcher::new(*search).solve_exact(&t.position, t.alpha, t.beta)?;
    Ok(Outcome {
        bounds: r.bounds,
        nodes: r.stats.nodes_visited,
        millis: start.elapsed().as_millis() as u64,
        worker,
    })
}

/// Solves every unfinished record of `manifest`. Serial-lane tasks run one
/// after another on worker 0 in manifest order; parallel-lane tasks are
/// shared out among `workers` threads. Each task gets a fresh searcher, so
/// its value and node count do not depend on scheduling.
pub fn run(manifest: &mut JobManifest, opts: &RunOptions) -> Result<RunSummary, JobError> {
    let start = Instant::now();
    let workers = opts.workers.max(1);
    let mut serial = VecDeque::new();
    let mut parallel = VecDeque::new();
    for (i, t) in manifest.tasks.iter().enumerate() {
        if t.status.is_finished() {
            continue;
        }
        match manifest.lane(i) {
            Lane::Serial => serial.push_back(i),
            Lane::Parallel => parallel.push_back(i),
        }
    }
    let journal = match &opts.journal {
        Some(path) => Some(Mutex::new(Journal::open(path, &manifest.run_id)?)),
        None => None,
    };
    let queues = [Mutex::new(serial), Mutex::new(parallel)];
    let stop = AtomicBool::new(false);
    let tasks = manifest.tasks.clone();
    let search = manifest.search;
    let (tx, rx) = mpsc::channel::<(usize, Result<Outcome, SearchError>)>();
    let mut summary = RunSummary::default();
    let mut failure: Option<JobError> = None;

    std::thread::scope(|scope| {
        for worker in 0..workers {
            let tx = tx.clone();
            let (queues, stop, tasks, search, journal) = (&queues, &stop, &tasks, &search, &journal);
            scope.spawn(move || {
                // Worker 0 drains the serial lane before helping with the rest.
                let lanes: &[usize] = if worker == 0 { &[0, 1] } else { &[1] };
                for &lane in lanes {
                    loop {
                        if stop.load(Ordering::SeqCst) {
                            return;
                        }
                        let Some(index) = queues[lane].lock().unwrap().pop_front() else {
                            break;
                        };
                        if let Some(j) = journal {
                            let _ = j.lock().unwrap().running(index, worker);
                        }
                        if stop.load(Ordering::SeqCst) {
                            return;
                        }
                        let outcome = solve_task(search, &tasks[index], worker);
                        if tx.send((index, outcome)).is_err() {
                            return;
                        }
                    }
                }
            });
        }
        drop(tx);
        for (index, outcome) in rx {
            if failure.is_some() || stop.load(Ordering::SeqCst) {
                continue;
            }
            let outcome = match outcome {
                Ok(o) => o,
                Err(e) => {
                    failure = Some(e.into());
                    stop.store(true, Ordering::SeqCst);
                    continue;
                }
            };
            if let Some(j) = &journal {
                if let Err(e) = j.lock().unwrap().done(index, &outcome) {
                    failure = Some(e.into());
                    stop.store(true, Ordering::SeqCst);
                    continue;
                }
            }
            manifest.tasks[index].finish(&outcome);
            summary.completed += 1;
            summary.nodes += outcome.nodes;
            if opts.crash_after.is_some_and(|n| summary.completed >= n) {
                stop.store(true, Ordering::SeqCst);
                failure = Some(JobError::Interrupted {
                    completed: summary.completed,
                });
            }
        }
    });
    summary.millis = start.elapsed().as_millis() as u64;
    match failure {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}

/// Loads a manifest, applies its journal and finishes the remaining tasks,
/// journaling to the same file.
pub fn resume(manifest_path: &Path, journal_path: &Path, workers: usize) -> Result<JobManifest, JobError> {
    let mut manifest = JobManifest::load(manifest_path)?;
    replay_journal(&mut manifest, journal_path)?;
    let opts = RunOptions {
        workers,
        journal: Some(journal_path.to_path_buf()),
        crash_after: None,
    };
    run(&mut manifest, &opts)?;
    manifest.save(manifest_path)?;
    Ok(manifest)
}

/// A finished task whose proof excludes its prediction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub position: Position,
    pub prediction: Score,
    pub result: SolveBounds,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergeReport {
    pub merged: usize,
    pub exact: usize,
    /// Indices of tasks that only produced a bound.
    pub widened: Vec<usize>,
    pub mismatches: Vec<Mismatch>,
}

/// Folds every finished record into `d` (bounds) and `d_prime` (fail-soft
/// values). Disjoint bounds for one position abort the merge.
pub fn merge(
    manifest: &JobManifest,
    d: &mut BoundDictionary,
    d_prime: &mut EstimateDictionary,
) -> Result<MergeReport, JobError> {
    let unfinished = manifest.tasks.iter().filter(|t| !t.status.is_finished()).count();
    if unfinished > 0 {
        return Err(JobError::Unfinished(unfinished));
    }
    let mut report = MergeReport::default();
    for (i, t) in manifest.tasks.iter().enumerate() {
        let bounds = t.result.expect("finished tasks carry a result");
        d.merge(&t.position, bounds)?;
        d_prime.insert(&t.position, t.value().expect("finished"));
        report.merged += 1;
        if bounds.is_exact() {
            report.exact += 1;
        } else {
            report.widened.push(i);
        }
        if !bounds.contains(t.prediction) {
            report.mismatches.push(Mismatch {
                position: t.position,
                prediction: t.prediction,
                result: bounds,
            });
        }
    }
    Ok(report)
}

/// [`TaskSolver`] that shards each batch and runs it on a worker pool,
/// optionally keeping every round's manifest and journal in `dir`.
pub struct JobSolver {
    pub policy: ShardPolicy,
    pub search: SearchConfig,
    pub workers: usize,
    pub dir: Option<PathBuf>,
    pub rounds: usize,
    pub nodes: u64,
}

impl JobSolver {
    pub fn new(policy: ShardPolicy, search: SearchConfig, workers: usize) -> Self {
        JobSolver {
            policy,
            search,
            workers,
            dir: None,
            rounds: 0,
            nodes: 0,
        }
    }

    pub fn with_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.dir = Some(dir.into());
        self
    }
}

impl TaskSolver for JobSolver {
    fn solve_batch(&mut self, tasks: &TaskSet) -> Result<Vec<TaskResult>, FrontierError> {
        let solver_err = |e: JobError| FrontierError::Solver(e.to_string());
        self.rounds += 1;
        let run_id = format!("round-{}", self.rounds);
        let mut manifest = shard(tasks, &self.policy, self.search, &run_id).map_err(solver_err)?;
        let mut opts = RunOptions::with_workers(self.workers);
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir).map_err(|e| solver_err(e.into()))?;
            manifest.save(&dir.join(format!("{run_id}.manifest"))).map_err(solver_err)?;
            opts.journal = Some(dir.join(format!("{run_id}.journal")));
        }
        let summary = run(&mut manifest, &opts).map_err(solver_err)?;
        self.nodes += summary.nodes;
        if let Some(dir) = &self.dir {
            manifest.save(&dir.join(format!("{run_id}.manifest"))).map_err(solver_err)?;
        }
        Ok(manifest
            .tasks
            .iter()
            .map(|t| TaskResult {
                position: t.position,
                alpha: t.alpha,
                beta: t.beta,
                value: t.value().expect("run finished every task"),
                bounds: t.result.expect("run finished every task"),
                nodes: t.nodes,
            })
            .collect())
    }
}
