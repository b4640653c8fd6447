//! One line per acceptance criterion, each with a pinned time budget.
//!
//! Runs without the libtest harness so the verdicts always reach the
//! terminal. `ACCEPTANCE_ONLY=rules_oracle,job_runner` restricts the run to the named
//! criteria; a criterion that needs the 6×6 book builds it when asked for
//! alone.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::time::{Duration, Instant};

use common::{grid_value, naive, oracle_dictionary, rng, unique_principal_frontier};
use othello_core::eval::EvalWeights;
use othello_core::frontier::{bound_search, certify, prove_loop, BoundDictionary, BoundMode, FrontierConfig, ProofOutcome};
use othello_core::gen::{random_live_position, random_position};
use othello_core::jobs::{resume, run, shard, JobError, JobSolver, RunOptions, ShardPolicy};
use othello_core::player::{verify_record, Engine, EngineConfig, PlaySession};
use othello_core::search::oracle::naive_oracle;
use othello_core::search::{iterative_deepening_solve, solve_exact, SearchConfig};
use othello_core::store::{parse_wthor, wthor, WthorFile};
use othello_core::symmetry::{canonical, SymmetryTransform};
use othello_core::{Color, Move, Position, Score, Square};
use rand::seq::SliceRandom;
use rand::Rng;

const DRAWN_RECORD: &str = "F5D6C3D3 C4F4F6F3 E6E7D7C5 B6D8C6C7 D2B5A5A6 A7G5E3B4 C8G6G4C2 E8D1F7E2 \
                       G3H4F1E1 F2G1B1F8 G8B3H3B2 H5B7A3A4 A1A2C1H2 H1G2B8A8 G7H8H7H6";

/// 6×6 proof window around the known value -4.
const WINDOW_6X6: (Score, Score) = (-5, -3);

type Check = Result<String, String>;

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

fn rules_oracle() -> Check {
    let mut checked = 0;
    for size in [4usize, 6, 8] {
        let mut r = rng(1000 + size as u64);
        for i in 0..10_000 {
            let p = random_position(&mut r, size, 0..=(size * size - 4));
            let g = naive::grid(&p);
            let mut got: Vec<(usize, usize)> = p
                .legal_moves()
                .iter()
                .filter_map(|m| m.square())
                .map(|s| (s.row() as usize, s.col() as usize))
                .collect();
            got.sort_unstable();
            let want = naive::moves(&g);
            ensure(got == want, || format!("{size}x{size} #{i} {p}: moves {got:?} vs {want:?}"))?;
            if want.is_empty() {
                let passed = p.apply_move(Move::Pass).map_err(|e| format!("{p}: {e}"))?;
                ensure(naive::grid(&passed) == naive::swap_sides(&g), || format!("{p}: pass"))?;
            }
            for (row, col) in want {
                let next = p.apply_move(Move::Place(Square::new(row as u8, col as u8))).map_err(|e| e.to_string())?;
                ensure(next == naive::position(&naive::play(&g, row, col)), || format!("{p}: apply ({row},{col})"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} positions, 0 mismatches"))
}

fn endgame_soundness() -> Check {
    let mut r = rng(2000);
    let cfg = SearchConfig::default();
    for i in 0..1000 {
        let p = random_position(&mut r, 8, 0..=10);
        let truth = naive_oracle(&p).map_err(|e| e.to_string())?;
        let got = solve_exact(&p, -64, 64, &cfg).map_err(|e| e.to_string())?.value;
        ensure(got == truth, || format!("#{i} {p}: {got} vs {truth}"))?;
    }
    Ok("1000 positions, 0 mismatches".into())
}

fn four_by_four() -> Check {
    let p = Position::initial(4).unwrap();
    let truth = grid_value(&naive::grid(&p));
    ensure(naive_oracle(&p) == Ok(truth), || "oracles disagree".into())?;
    let cfg = FrontierConfig::for_root(&p);
    let mut solver = JobSolver::new(ShardPolicy::default(), SearchConfig::default(), 2);
    let out = prove_loop(&p, -16, 16, &mut solver, &cfg).map_err(|e| e.to_string())?;
    ensure(out.value == truth, || format!("value {} vs {truth}", out.value))?;
    ensure(certify(&p, out.value, -16, 16, &out.bounds, &cfg), || "certify failed".into())?;
    Ok(format!("value {truth}, {} frontier entries certified", out.bounds.len()))
}

struct SixBySix {
    outcome: ProofOutcome,
    cfg: FrontierConfig,
}

fn prove_6x6(weights: EvalWeights, workers: usize) -> Result<(SixBySix, u64), String> {
    let p = Position::initial(6).unwrap();
    let mut cfg = FrontierConfig::for_root(&p);
    cfg.weights = weights;
    let mut solver = JobSolver::new(ShardPolicy::task_windows_only(), SearchConfig::default(), workers);
    let (a, b) = WINDOW_6X6;
    let outcome = prove_loop(&p, a, b, &mut solver, &cfg).map_err(|e| e.to_string())?;
    Ok((SixBySix { outcome, cfg }, solver.nodes))
}

fn six_by_six(proof: &mut Option<SixBySix>) -> Check {
    let p = Position::initial(6).unwrap();
    let (a, b) = WINDOW_6X6;
    let started = Instant::now();
    let (first, nodes_a) = prove_6x6(EvalWeights::default(), 1)?;
    let first_secs = started.elapsed().as_secs();
    let perturbed = EvalWeights {
        corners: 4.0,
        mobility: 1.5,
        frontier: -1.0,
        discs: 0.0,
        stable_edges: 2.5,
    };
    let (second, nodes_b) = prove_6x6(perturbed, 2)?;
    let (va, vb) = (first.outcome.value, second.outcome.value);
    ensure(va == vb, || format!("values differ: {va} vs {vb}"))?;
    for run in [&first, &second] {
        ensure(certify(&p, run.outcome.value, a, b, &run.outcome.bounds, &run.cfg), || "certify failed".into())?;
    }
    let detail = format!(
        "value {va} in ({a},{b}), e2 {}, nodes {nodes_a} / {nodes_b}, first run {first_secs}s",
        first.cfg.e2
    );
    *proof = Some(first);
    Ok(detail)
}

fn drawn_record() -> Check {
    let report = verify_record(DRAWN_RECORD, 8, Some(0)).map_err(|e| e.to_string())?;
    ensure(report.legal_moves() == 60, || format!("{} legal moves", report.legal_moves()))?;
    ensure(report.full_board(), || "board not full".into())?;
    ensure(report.score == 0 && report.passed(), || format!("{report}"))?;
    Ok("60 legal moves, full board, draw".into())
}

/// Runs every aspiration and table-ordering setting over `corpus` and
/// returns node totals per setting.
fn differential_nodes(corpus: &[Position]) -> Result<Vec<String>, String> {
    let truth: Vec<Score> = corpus
        .iter()
        .map(|p| solve_exact(p, -p.max_score(), p.max_score(), &SearchConfig::default()).map(|r| r.value))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut log = Vec::new();
    for aspiration in [false, true] {
        for depth in [0u32, 2, 4, 8] {
            let cfg = SearchConfig {
                aspiration_enabled: aspiration,
                tt_ordering_min_relative_depth: depth,
                ..SearchConfig::default()
            };
            let mut nodes = 0;
            for (p, &t) in corpus.iter().zip(&truth) {
                let s = p.max_score();
                let res = iterative_deepening_solve(p, -s, s, &cfg).map_err(|e| e.to_string())?;
                ensure(res.value == t, || format!("aspiration {aspiration} depth {depth} {p}: {} vs {t}", res.value))?;
                nodes += res.stats.nodes_visited;
            }
            log.push(format!("{}{depth}:{nodes}", if aspiration { "a" } else { "n" }));
        }
    }
    Ok(log)
}

/// The 12-empty corpus sits below the table tier, so a 20-empty 6×6 corpus
/// where both settings change the search is checked as well.
fn differentials() -> Check {
    let mut r = rng(3000);
    let shallow: Vec<Position> = (0..100).map(|_| random_live_position(&mut r, 8, 12)).collect();
    let deep: Vec<Position> = (0..12).map(|_| random_live_position(&mut r, 6, 20)).collect();
    let a = differential_nodes(&shallow)?;
    let b = differential_nodes(&deep)?;
    Ok(format!("identical values; nodes at 12 empties {}; at 20 empties {}", a.join(" "), b.join(" ")))
}

fn quiet_position(seed: u64, empties: u32) -> Position {
    let mut r = rng(seed);
    loop {
        let p = random_live_position(&mut r, 6, empties);
        if !p.has_wipeout_move() {
            return p;
        }
    }
}

fn bracketing() -> Check {
    let e2 = 6;
    let c = FrontierConfig::new(e2 + 2, e2);
    for seed in 0..500u64 {
        let p = quiet_position(4000 + seed, 9 + (seed % 2) as u32);
        let truth = naive_oracle(&p).map_err(|e| e.to_string())?;
        let full = oracle_dictionary(&p, e2);
        let mut r = rng(seed);
        let mut partial = BoundDictionary::new();
        for (f, b) in full.iter() {
            match r.gen_range(0..3) {
                0 => partial.set(f, *b),
                1 => {
                    let lo = (b.lower - r.gen_range(0..8)).max(-36);
                    let hi = (b.upper + r.gen_range(0..8)).min(36);
                    partial.set(f, othello_core::SolveBounds::new(lo, hi).unwrap());
                }
                _ => {}
            }
        }
        for d in [&full, &partial] {
            let lower = bound_search(&p, d, BoundMode::Lower, -36, 36, &c);
            let upper = bound_search(&p, d, BoundMode::Upper, -36, 36, &c);
            ensure(lower <= truth && truth <= upper, || format!("seed {seed}: {lower} <= {truth} <= {upper}"))?;
        }
        ensure(certify(&p, truth, -36, 36, &full, &c), || format!("seed {seed}: oracle dictionary rejected"))?;
    }
    let mut mutations = 0;
    let mut seed = 5000;
    while mutations < 50 {
        seed += 1;
        let p = quiet_position(seed, 10);
        let Some((f, _)) = unique_principal_frontier(&p, e2) else { continue };
        if f.has_wipeout_move() {
            continue;
        }
        let truth = naive_oracle(&p).unwrap();
        let mut d = oracle_dictionary(&p, e2);
        d.remove(&f).ok_or_else(|| format!("seed {seed}: principal entry missing"))?;
        ensure(!certify(&p, truth, -36, 36, &d, &c), || format!("seed {seed}: deletion certified"))?;
        mutations += 1;
    }
    Ok(format!("500 positions bracketed, {mutations} deletions rejected"))
}

fn jobs() -> Check {
    let mut r = rng(6000);
    let mut tasks = othello_core::frontier::TaskSet::new();
    while tasks.len() < 12 {
        let p = random_live_position(&mut r, 6, 16);
        let prediction = [0, 35, -2, -40][tasks.len() % 4];
        tasks.record(&p, -1, 1, prediction);
    }
    let base = shard(&tasks, &ShardPolicy::default(), SearchConfig::default(), "acceptance").map_err(|e| e.to_string())?;
    let mut reruns = Vec::new();
    for _ in 0..3 {
        let mut m = base.clone();
        run(&mut m, &RunOptions::with_workers(1)).map_err(|e| e.to_string())?;
        reruns.push(m.tasks.iter().map(|t| (t.result, t.nodes)).collect::<Vec<_>>());
    }
    ensure(reruns.iter().all(|x| *x == reruns[0]), || "serial node counts differ".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (manifest, journal) = (dir.path().join("m"), dir.path().join("j"));
    base.save(&manifest).map_err(|e| e.to_string())?;
    let mut crashed = base.clone();
    let opts = RunOptions {
        workers: 2,
        journal: Some(journal.clone()),
        crash_after: Some(5),
    };
    ensure(matches!(run(&mut crashed, &opts), Err(JobError::Interrupted { .. })), || "no crash".into())?;
    let finished = resume(&manifest, &journal, 2).map_err(|e| e.to_string())?;
    let results: Vec<_> = finished.tasks.iter().map(|t| t.result).collect();
    ensure(results == reruns[0].iter().map(|x| x.0).collect::<Vec<_>>(), || "resumed results differ".into())?;
    let text = fs::read_to_string(&journal).map_err(|e| e.to_string())?;
    let mut done: Vec<&str> = text.lines().filter_map(|l| {
        let f: Vec<&str> = l.split_whitespace().collect();
        (f.get(2) == Some(&"done")).then(|| f[1])
    }).collect();
    let total = done.len();
    done.sort_unstable();
    done.dedup();
    ensure(total == base.tasks.len() && done.len() == total, || format!("{total} done lines for {} tasks", base.tasks.len()))?;
    Ok(format!("3 identical serial reruns, {total} tasks finished exactly once after a crash"))
}

fn wthor_conformance() -> Check {
    let bytes = fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/sample.wtb")).map_err(|e| e.to_string())?;
    let file = parse_wthor(&bytes).map_err(|e| e.to_string())?;
    ensure(file.to_bytes() == bytes, || "fixture does not round-trip".into())?;
    let start = Position::initial(8).unwrap();
    let transforms: Vec<SymmetryTransform> =
        SymmetryTransform::ALL.into_iter().filter(|t| t.apply(&start) == start).collect();
    for e1 in [55, 50, 40] {
        let (base, _) = wthor::frequencies(&file, e1);
        let base: BTreeSet<(Position, u64)> = base.iter().map(|(p, n)| (*p, *n)).collect();
        for t in &transforms {
            let games = file
                .games
                .iter()
                .map(|g| {
                    let mut moved = *g;
                    for b in moved.moves.iter_mut() {
                        if let Some(sq) = wthor::decode_move(*b) {
                            *b = wthor::encode_move(t.apply_move(Move::Place(sq), 8).square().unwrap());
                        }
                    }
                    moved
                })
                .collect();
            let (table, _) = wthor::frequencies(&WthorFile::new(2020, games), e1);
            let got: BTreeSet<(Position, u64)> = table.iter().map(|(p, n)| (*p, *n)).collect();
            ensure(got == base && got.iter().all(|(p, _)| canonical(p) == *p), || format!("{t:?} at {e1}"))?;
        }
    }
    Ok(format!("{} games round-trip, {} transforms agree", file.games.len(), transforms.len()))
}

fn never_lose(proof: &Option<SixBySix>) -> Check {
    let proof = proof.as_ref().ok_or("no 6x6 proof")?;
    let engine = Engine::new(proof.outcome.bounds.clone(), EngineConfig::new(proof.cfg.e2));
    let mut worst = i32::MAX;
    for g in 0..10_000u64 {
        let color = if g % 2 == 0 { Color::Black } else { Color::White };
        let mut r = rng(7000 + g);
        let mut s = PlaySession::new(6, color, engine.clone()).map_err(|e| e.to_string())?;
        let certified = s.certified_value().ok_or("nothing certified")?;
        while !s.is_over() {
            if s.engine_to_move() {
                s.engine_move().map_err(|e| format!("game {g} {}: {e}", s.record()))?;
            } else {
                let mv = *s.position().legal_moves().choose(&mut r).unwrap();
                s.play_opponent(mv).map_err(|e| e.to_string())?;
            }
        }
        let score = s.final_score(color).unwrap();
        ensure(score >= certified, || format!("game {g}: {score} < {certified}: {}", s.record()))?;
        worst = worst.min(score - certified);
    }
    Ok(format!("10000 games, smallest margin over the certified value {worst}"))
}

type Criterion = fn(&mut Option<SixBySix>) -> Check;

const CRITERIA: [(&str, u64, Criterion); 10] = [
    ("rules_oracle", 60, |_| rules_oracle()),
    ("endgame_soundness", 600, |_| endgame_soundness()),
    ("weak_solve_4x4", 60, |_| four_by_four()),
    ("drawn_8x8_record", 1, |_| drawn_record()),
    ("search_differentials", 600, |_| differentials()),
    ("bound_bracketing", 900, |_| bracketing()),
    ("job_runner", 600, |_| jobs()),
    ("wthor_conformance", 60, |_| wthor_conformance()),
    ("pipeline_6x6", 7200, six_by_six),
    ("never_lose_6x6", 1800, |p| never_lose(p)),
];

fn main() {
    let only: Option<Vec<String>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').map(|s| s.trim().to_string()).collect());
    let mut proof: Option<SixBySix> = None;
    let mut failed = 0;
    for (name, budget, criterion) in CRITERIA {
        if only.as_ref().is_some_and(|o| !o.iter().any(|x| x == name)) {
            continue;
        }
        if name == "never_lose_6x6" && proof.is_none() {
            match prove_6x6(EvalWeights::default(), 1) {
                Ok((p, _)) => proof = Some(p),
                Err(e) => println!("6x6 proof for the player failed: {e}"),
            }
        }
        let start = Instant::now();
        let result = criterion(&mut proof);
        let elapsed = start.elapsed();
        let verdict = match result {
            Ok(d) if elapsed <= Duration::from_secs(budget) => Ok(d),
            Ok(d) => Err(format!("{d}; over budget")),
            Err(e) => Err(e),
        };
        let (tag, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(e) => {
                failed += 1;
                ("FAIL", e)
            }
        };
        println!("{tag} {name} [{:.1}s / {budget}s] {detail}", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
