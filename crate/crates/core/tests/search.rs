mod common;

use common::{grid_value, naive, rng};
use othello_core::gen::{random_live_position, random_position};
use othello_core::search::oracle::{naive_move_values, naive_oracle, naive_oracle_with_cap};
use othello_core::search::{
    iterative_deepening_solve, solve_exact, SearchConfig, SearchError, SearchResult, Searcher,
};
use othello_core::{Move, Position, SolveBounds};
use proptest::prelude::*;
use rand::Rng;

fn corpus(seed: u64, size: usize, empties: std::ops::RangeInclusive<usize>, count: usize) -> Vec<Position> {
    let mut r = rng(seed);
    (0..count).map(|_| random_position(&mut r, size, empties.clone())).collect()
}

#[test]
fn naive_oracle_agrees_with_grid_minimax() {
    for p in corpus(1, 4, 0..=10, 300).into_iter().chain(corpus(2, 6, 0..=7, 100)) {
        assert_eq!(naive_oracle(&p).unwrap(), grid_value(&naive::grid(&p)), "{p}");
    }
}

#[test]
fn four_by_four_initial_value() {
    let p = Position::initial(4).unwrap();
    let truth = naive_oracle(&p).unwrap();
    assert_eq!(truth, grid_value(&naive::grid(&p)));
    assert_eq!(truth, -10);
    let r = solve_exact(&p, -16, 16, &SearchConfig::default()).unwrap();
    assert_eq!(r.value, truth);
    assert!(r.bounds.is_exact());
}

#[test]
fn exact_search_matches_oracle() {
    let cfg = SearchConfig::default();
    for (seed, size, hi) in [(3u64, 4usize, 12usize), (4, 6, 11), (5, 8, 10)] {
        for p in corpus(seed, size, 0..=hi, 150) {
            let s = p.max_score();
            let r = solve_exact(&p, -s, s, &cfg).unwrap();
            assert_eq!(r.value, naive_oracle(&p).unwrap(), "{p}");
        }
    }
}

#[test]
fn fail_soft_contract_on_random_windows() {
    let mut r = rng(6);
    let cfg = SearchConfig::default();
    for p in corpus(7, 6, 0..=11, 300) {
        let s = p.max_score();
        let truth = naive_oracle(&p).unwrap();
        let a = r.gen_range(-s..s);
        let b = r.gen_range(a + 1..=s);
        let res = solve_exact(&p, a, b, &cfg).unwrap();
        if res.value <= a {
            assert!(truth <= res.value, "{p} ({a},{b}) {} vs {truth}", res.value);
        } else if res.value >= b {
            assert!(truth >= res.value, "{p} ({a},{b}) {} vs {truth}", res.value);
        } else {
            assert_eq!(truth, res.value, "{p} ({a},{b})");
        }
        assert_eq!(res.bounds, SolveBounds::from_fail_soft(res.value, a, b, s));
    }
}

#[test]
fn table_is_transparent() {
    let with = SearchConfig::default();
    let without = SearchConfig { tt_size_log2: 0, ..SearchConfig::default() };
    for p in corpus(8, 8, 8..=14, 40).into_iter().chain(corpus(9, 6, 10..=16, 40)) {
        let s = p.max_score();
        let a = solve_exact(&p, -s, s, &with).unwrap();
        let b = solve_exact(&p, -s, s, &without).unwrap();
        assert_eq!(a.value, b.value, "{p}");
    }
}

#[test]
fn runs_are_deterministic() {
    let cfg = SearchConfig::default();
    for p in corpus(10, 6, 14..=18, 10) {
        let a = solve_exact(&p, -3, 3, &cfg).unwrap();
        let b = solve_exact(&p, -3, 3, &cfg).unwrap();
        assert_eq!((a.value, a.stats), (b.value, b.stats), "{p}");
        let c = iterative_deepening_solve(&p, -3, 3, &cfg).unwrap();
        let d = iterative_deepening_solve(&p, -3, 3, &cfg).unwrap();
        assert_eq!((c.value, c.stats, c.best_move), (d.value, d.stats, d.best_move), "{p}");
    }
}

#[test]
fn narrowing_keeps_in_window_results() {
    let cfg = SearchConfig::default();
    for p in corpus(11, 6, 8..=14, 60) {
        let s = p.max_score();
        let v = solve_exact(&p, -s, s, &cfg).unwrap().value;
        for (a, b) in [(v - 1, v + 1), (v - 3, v + 1), (v - 1, v + 5)] {
            if a < -s || b > s {
                continue;
            }
            assert_eq!(solve_exact(&p, a, b, &cfg).unwrap().value, v, "{p} ({a},{b})");
        }
    }
}

#[test]
fn terminal_position_costs_one_node() {
    let p: Position = "XXXXXXXXXXXXXXOO X".parse().unwrap();
    let r = solve_exact(&p, -16, 16, &SearchConfig::default()).unwrap();
    assert_eq!(r.value, p.final_score().unwrap());
    assert_eq!(r.stats.nodes_visited, 1);
    assert_eq!(r.best_move, None);
}

#[test]
fn forced_passes_are_searched_through() {
    let mut r = rng(12);
    let mut found = 0;
    while found < 50 {
        let p = random_position(&mut r, 6, 1..=10);
        if p.has_moves() || p.is_terminal() {
            continue;
        }
        found += 1;
        let s = p.max_score();
        let res = solve_exact(&p, -s, s, &SearchConfig::default()).unwrap();
        assert_eq!(res.value, naive_oracle(&p).unwrap(), "{p}");
        assert_eq!(res.best_move, Some(Move::Pass));
    }
}

#[test]
fn invalid_requests_are_errors() {
    let p = Position::initial(6).unwrap();
    let cfg = SearchConfig::default();
    assert!(matches!(solve_exact(&p, 3, 3, &cfg), Err(SearchError::InvalidWindow { .. })));
    assert!(matches!(solve_exact(&p, -37, 0, &cfg), Err(SearchError::InvalidWindow { .. })));
    assert!(matches!(iterative_deepening_solve(&p, 0, 40, &cfg), Err(SearchError::InvalidWindow { .. })));
    let capped = SearchConfig { max_empties: 20, ..SearchConfig::default() };
    assert!(matches!(solve_exact(&p, -3, 3, &capped), Err(SearchError::TooManyEmpties { .. })));
    assert!(matches!(naive_oracle(&p), Err(SearchError::TooManyEmpties { .. })));
    assert!(naive_oracle_with_cap(&Position::initial(4).unwrap(), 11).is_err());
}

#[test]
fn best_move_reaches_the_value() {
    let cfg = SearchConfig::default();
    for p in corpus(13, 6, 4..=11, 100) {
        if p.is_terminal() {
            continue;
        }
        let s = p.max_score();
        let r = solve_exact(&p, -s, s, &cfg).unwrap();
        let values = naive_move_values(&p, 12).unwrap();
        let mv = r.best_move.expect("live position has a best move");
        let (_, v) = values.iter().find(|(m, _)| *m == mv).expect("best move is legal");
        assert_eq!(*v, r.value, "{p}");
    }
}

#[test]
fn iterative_deepening_agrees_with_direct_search() {
    for aspiration in [false, true] {
        for depth in [0u32, 2, 4, 8] {
            let cfg = SearchConfig {
                aspiration_enabled: aspiration,
                tt_ordering_min_relative_depth: depth,
                ..SearchConfig::default()
            };
            for p in corpus(14, 6, 12..=16, 12) {
                let s = p.max_score();
                let id = iterative_deepening_solve(&p, -s, s, &cfg).unwrap();
                let direct = solve_exact(&p, -s, s, &SearchConfig::default()).unwrap();
                assert_eq!(id.value, direct.value, "{p}");
                if let Some(Move::Place(sq)) = id.best_move {
                    assert!(p.is_legal(sq));
                }
            }
        }
    }
}

#[test]
fn reused_searcher_gives_fresh_results() {
    let mut searcher = Searcher::new(SearchConfig::default());
    for p in corpus(15, 6, 8..=12, 40) {
        let s = p.max_score();
        let reused = searcher.solve_exact(&p, -s, s).unwrap();
        let fresh = solve_exact(&p, -s, s, &SearchConfig::default()).unwrap();
        assert_eq!(reused.value, fresh.value, "{p}");
    }
}

#[test]
fn csv_row_layout() {
    let p = Position::initial(4).unwrap();
    let r = solve_exact(&p, -3, 3, &SearchConfig::default()).unwrap();
    let row = r.csv_row(&p);
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(SearchResult::CSV_HEADER.split(',').count(), 5);
    assert_eq!(fields.len(), 5);
    assert_eq!(fields[0], p.to_text());
    assert_eq!(fields[1], "-3:3");
    assert_eq!(fields[2].parse::<i32>().unwrap(), r.value);
    assert_eq!(fields[3].parse::<u64>().unwrap(), r.stats.nodes_visited);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn null_windows_classify_correctly(seed in any::<u64>(), empties in 1u32..=10, split in -20i32..=20) {
        let p = random_live_position(&mut rng(seed), 6, empties);
        let truth = naive_oracle(&p).unwrap();
        let r = solve_exact(&p, split - 1, split, &SearchConfig::default()).unwrap();
        prop_assert_eq!(r.value >= split, truth >= split);
    }
}
