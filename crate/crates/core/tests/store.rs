mod common;

use std::collections::BTreeSet;

use othello_core::board::{format_record, parse_record};
use othello_core::frontier::{prove_loop, DirectSolver, FrontierConfig};
use othello_core::gen::random_playout_to;
use othello_core::search::SearchConfig;
use othello_core::store::{
    export_stats, import_wthor, load_book, parse_wthor, save_book, wthor, Book, BookEntry, Source, StatRow, StoreError,
    WthorFile, WthorGame,
};
use othello_core::symmetry::{canonical, SymmetryTransform};
use othello_core::{Move, Position, SolveBounds, Square};
use rand::Rng;

const DRAWN_RECORD: &str = "F5D6C3D3 C4F4F6F3 E6E7D7C5 B6D8C6C7 D2B5A5A6 A7G5E3B4 C8G6G4C2 E8D1F7E2 \
                       G3H4F1E1 F2G1B1F8 G8B3H3B2 H5B7A3A4 A1A2C1H2 H1G2B8A8 G7H8H7H6";

fn fixture() -> Vec<u8> {
    std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/sample.wtb")).unwrap()
}

fn proved(lower: i32, upper: i32, nodes: u64) -> BookEntry {
    BookEntry {
        bounds: SolveBounds::new(lower, upper).unwrap(),
        source: Source::Proved,
        nodes,
        timestamp: None,
    }
}

fn random_book(seed: u64, entries: usize) -> Book {
    let mut rng = common::rng(seed);
    let mut book = Book::new();
    while book.len() < entries {
        let size = [4, 6, 8][rng.gen_range(0..3)];
        let max = (size * size) as i32;
        let empties = rng.gen_range(1..=(max as u32 - 5));
        let Some(p) = random_playout_to(&mut rng, size, empties) else { continue };
        if book.get(&p).is_some() {
            continue;
        }
        let a = rng.gen_range(-max..=max);
        let b = rng.gen_range(-max..=max);
        let entry = if rng.gen_bool(0.2) {
            BookEntry {
                bounds: SolveBounds::exact(a),
                source: Source::Estimated,
                nodes: 0,
                timestamp: None,
            }
        } else {
            BookEntry {
                timestamp: rng.gen_bool(0.5).then(|| rng.gen()),
                ..proved(a.min(b), a.max(b), rng.gen_range(0..1 << 40))
            }
        };
        book.insert(&p, entry).unwrap();
    }
    book
}

#[test]
fn book_round_trips_ten_thousand_entries() {
    let book = random_book(1, 10_000);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("book.txt");
    save_book(&path, &book).unwrap();
    let loaded = load_book(&path).unwrap();
    assert_eq!(loaded.len(), 10_000);
    assert_eq!(loaded.to_text(), book.to_text());
    assert!(loaded.iter().zip(book.iter()).all(|(a, b)| a == b));
}

#[test]
fn corrupted_lines_fail_at_their_number() {
    let text = random_book(2, 50).to_text();
    let lines: Vec<&str> = text.lines().collect();
    let corrupt = |target: usize, edit: &dyn Fn(&mut Vec<String>)| {
        let mut broken: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        let mut fields: Vec<String> = broken[target].split_whitespace().map(String::from).collect();
        edit(&mut fields);
        broken[target] = fields.join(" ");
        match Book::from_text(&broken.join("\n")) {
            Err(StoreError::Line { line, .. }) => assert_eq!(line, target + 1),
            other => panic!("line {target}: {other:?}"),
        }
    };
    corrupt(0, &|f| f[2] = "nine".into());
    corrupt(17, &|f| {
        f[2] = "5".into();
        f[3] = "4".into();
    });
    corrupt(30, &|f| f[3] = "65".into());
    corrupt(42, &|f| f[4] = "guessed".into());
    corrupt(49, &|f| f.truncate(4));
}

#[test]
fn merging_runs_intersects_bounds() {
    let mut rng = common::rng(3);
    let positions: Vec<Position> = (0..200).filter_map(|_| random_playout_to(&mut rng, 6, 20)).collect();
    let (mut a, mut b) = (Book::new(), Book::new());
    let mut expected = Vec::new();
    for p in &positions {
        if a.get(p).is_some() {
            continue;
        }
        let truth = rng.gen_range(-36..=36);
        let (l1, u1) = (truth - rng.gen_range(0..5), truth + rng.gen_range(0..5));
        let (l2, u2) = (truth - rng.gen_range(0..5), truth + rng.gen_range(0..5));
        a.insert(p, proved(l1.max(-36), u1.min(36), 10)).unwrap();
        b.insert(p, proved(l2.max(-36), u2.min(36), 5)).unwrap();
        expected.push((*p, l1.max(l2).max(-36), u1.min(u2).min(36)));
    }
    let only_b = random_playout_to(&mut rng, 6, 10).unwrap();
    b.insert(&only_b, proved(-2, 2, 1)).unwrap();
    a.merge(&b).unwrap();
    for (p, lo, hi) in expected {
        let e = a.get(&p).unwrap();
        assert_eq!((e.bounds.lower, e.bounds.upper, e.nodes), (lo, hi, 15));
    }
    assert_eq!(a.proved(&only_b), SolveBounds::new(-2, 2));

    let mut c = Book::new();
    c.insert(&positions[0], proved(30, 36, 1)).unwrap();
    let mut d = Book::new();
    d.insert(&positions[0], proved(-36, 29, 1)).unwrap();
    assert!(matches!(c.merge(&d), Err(StoreError::Conflict { .. })));
}

#[test]
fn estimates_never_displace_proofs() {
    let p = Position::initial(6).unwrap();
    let mut book = Book::new();
    book.insert(&p, proved(-4, -4, 9)).unwrap();
    let estimate = BookEntry {
        bounds: SolveBounds::exact(10),
        source: Source::Estimated,
        nodes: 0,
        timestamp: None,
    };
    book.insert(&p, estimate).unwrap();
    assert_eq!(book.proved(&p), Some(SolveBounds::exact(-4)));
    let mut est_only = Book::new();
    est_only.insert(&p, estimate).unwrap();
    assert!(est_only.bound_dictionary().is_empty());
    assert_eq!(est_only.proved(&p), None);
}

#[test]
fn book_keys_are_canonical() {
    let p = Position::initial(8).unwrap().play_unchecked(Square::parse("f5", 8).unwrap());
    let mut book = Book::new();
    book.insert(&p, proved(0, 0, 1)).unwrap();
    for t in SymmetryTransform::ALL {
        assert_eq!(book.proved(&t.apply(&p)), Some(SolveBounds::exact(0)));
    }
}

#[test]
fn book_from_a_four_by_four_proof() {
    let root = Position::initial(4).unwrap();
    let cfg = FrontierConfig::new(10, 6);
    let mut solver = DirectSolver::new(SearchConfig::default());
    let out = prove_loop(&root, -16, 16, &mut solver, &cfg).unwrap();
    let book = Book::from_outcome(&out, Some(7));
    assert_eq!(book.bound_dictionary().len(), out.bounds.len());
    let text = book.to_text();
    assert_eq!(Book::from_text(&text).unwrap().to_text(), text);
    let rows = StatRow::from_outcome(&out);
    let stats = export_stats(&rows);
    let total: u64 = rows.iter().map(|r| r.nodes).sum();
    let binned: u64 = stats.by_estimate.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(binned, total);
    let cumulative: Vec<u64> = stats.by_cost.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(cumulative.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(cumulative.last().copied().unwrap_or(0), total);
}

#[test]
fn stats_examples() {
    let a = Position::initial(6).unwrap();
    let b = a.play_unchecked(Square::parse("c2", 6).unwrap());
    let row = |p, nodes, estimate| StatRow { position: p, estimate, nodes };
    let single = export_stats(&[row(a, 17, 0)]);
    assert_eq!(single.by_cost.lines().nth(1).unwrap().rsplit(',').next(), Some("17"));
    let two = export_stats(&[row(a, 10, -2), row(b, 30, 4)]);
    let nodes: Vec<&str> = two.by_cost.lines().skip(1).map(|l| l.split(',').nth(4).unwrap()).collect();
    let cumulative: Vec<&str> = two.by_cost.lines().skip(1).map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(nodes, ["30", "10"]);
    assert_eq!(cumulative, ["30", "40"]);
    assert_eq!(two.by_estimate, "estimate,tasks,nodes\n-2,1,10\n4,1,30\n");
}

#[test]
fn identical_games_count_twice() {
    let moves = parse_record(DRAWN_RECORD, 8).unwrap();
    let file = WthorFile::new(2020, vec![WthorGame::from_squares(&moves); 2]);
    let positions = file.games[0].replay().unwrap();
    for e1 in [59, 50, 36, 20, 5] {
        let (table, illegal) = wthor::frequencies(&file, e1);
        assert!(illegal.is_empty());
        assert_eq!(table.len(), 1);
        let visited = positions.iter().find(|p| p.empties() == e1 && p.has_moves()).unwrap();
        assert_eq!(table.get(visited), 2);
    }
}

#[test]
fn optimal_record_replays_to_a_full_board() {
    let moves = parse_record(DRAWN_RECORD, 8).unwrap();
    let game = WthorGame::from_squares(&moves);
    assert_eq!(game.squares().unwrap(), moves);
    let positions = game.replay().unwrap();
    let last = positions.last().unwrap();
    assert_eq!(last.empties(), 0);
    assert_eq!(last.final_score(), Ok(0));
    assert_eq!(format_record(&game.squares().unwrap()), format_record(&moves));
}

#[test]
fn zero_byte_ends_the_game() {
    let moves = parse_record(DRAWN_RECORD, 8).unwrap();
    let mut game = WthorGame::from_squares(&moves[..12]);
    game.moves[13] = 255;
    game.moves[20] = 44;
    assert_eq!(game.squares().unwrap(), moves[..12].to_vec());
    let positions = game.replay().unwrap();
    assert_eq!(positions.last().unwrap().empties(), 48);
}

#[test]
fn fixture_round_trips_and_flags_the_swapped_game() {
    let bytes = fixture();
    let file = parse_wthor(&bytes).unwrap();
    assert_eq!(file.to_bytes(), bytes);
    assert_eq!(file.header.game_count, 23);
    assert_eq!((file.header.year, file.header.board_size), (2020, 8));
    assert_eq!(file.games[0].squares().unwrap(), parse_record(DRAWN_RECORD, 8).unwrap());
    assert_eq!(file.games[2].squares().unwrap().len(), 24);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sample.wtb");
    std::fs::write(&path, &bytes).unwrap();
    let import = import_wthor(&path, 50).unwrap();
    assert_eq!(import.illegal, vec![1]);
    let counted: u64 = import.frequencies.iter().map(|(_, n)| n).sum();
    assert_eq!(counted, 22);
    let first_ten = Position::initial(8).unwrap();
    let first_ten = parse_record(DRAWN_RECORD, 8).unwrap()[..10].iter().fold(first_ten, |p, &sq| p.play_unchecked(sq));
    assert_eq!(import.frequencies.get(&first_ten), 2);
}

#[test]
fn broken_files_are_rejected() {
    let bytes = fixture();
    assert!(matches!(parse_wthor(&bytes[..15]), Err(StoreError::Truncated(_))));
    assert!(matches!(parse_wthor(&bytes[..bytes.len() - 30]), Err(StoreError::Truncated(_))));
    assert!(matches!(
        parse_wthor(&bytes[..bytes.len() - 68]),
        Err(StoreError::GameCount { header: 23, found: 22 })
    ));
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(import_wthor(&dir.path().join("missing.wtb"), 50), Err(StoreError::Io(_))));
}

/// The four symmetries that map the 8x8 start position onto itself.
fn start_preserving() -> Vec<SymmetryTransform> {
    let start = Position::initial(8).unwrap();
    SymmetryTransform::ALL.into_iter().filter(|t| t.apply(&start) == start).collect()
}

#[test]
fn frequencies_ignore_board_symmetry_of_the_games() {
    let file = parse_wthor(&fixture()).unwrap();
    let transforms = start_preserving();
    assert_eq!(transforms.len(), 4);
    for e1 in [55, 50, 40] {
        let (base, base_illegal) = wthor::frequencies(&file, e1);
        let base: BTreeSet<(Position, u64)> = base.iter().map(|(p, n)| (*p, *n)).collect();
        for t in &transforms {
            let games = file
                .games
                .iter()
                .map(|g| {
                    let mut moved = *g;
                    for b in moved.moves.iter_mut().filter(|b| **b != 0) {
                        if let Some(sq) = wthor::decode_move(*b) {
                            *b = wthor::encode_move(t.apply_move(Move::Place(sq), 8).square().unwrap());
                        }
                    }
                    moved
                })
                .collect();
            let (table, illegal) = wthor::frequencies(&WthorFile::new(2020, games), e1);
            assert_eq!(illegal, base_illegal);
            let got: BTreeSet<(Position, u64)> = table.iter().map(|(p, n)| (*p, *n)).collect();
            assert_eq!(got, base, "{t:?} at {e1}");
            assert!(got.iter().all(|(p, _)| canonical(p) == *p));
        }
    }
}
