//! Writes `tests/fixtures/sample.wtb`: the optimal record, a copy with two
//! moves swapped, one record cut after 24 moves and 20 seeded random games.

use othello_core::board::parse_record;
use othello_core::store::{WthorFile, WthorGame};
use othello_core::{Move, Position, Square};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const RECORD: &str = "F5D6C3D3 C4F4F6F3 E6E7D7C5 B6D8C6C7 D2B5A5A6 A7G5E3B4 C8G6G4C2 E8D1F7E2 \
                      G3H4F1E1 F2G1B1F8 G8B3H3B2 H5B7A3A4 A1A2C1H2 H1G2B8A8 G7H8H7H6";

fn random_game(rng: &mut ChaCha8Rng) -> Vec<Square> {
    let mut p = Position::initial(8).unwrap();
    let mut moves = Vec::new();
    while !p.is_terminal() {
        let legal = p.legal_moves();
        match legal.choose(rng) {
            Some(&Move::Place(sq)) => {
                moves.push(sq);
                p = p.play_unchecked(sq);
            }
            _ => p = p.pass(),
        }
    }
    moves
}

fn main() {
    let optimal = parse_record(RECORD, 8).unwrap();
    let mut swapped = optimal.clone();
    swapped.swap(10, 11);
    let mut games = vec![
        WthorGame::from_squares(&optimal),
        WthorGame::from_squares(&swapped),
        WthorGame::from_squares(&optimal[..24]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2020);
    for i in 0..20u16 {
        let mut g = WthorGame::from_squares(&random_game(&mut rng));
        g.tournament = 1 + i % 3;
        g.black = 100 + i;
        g.white = 200 + i;
        games.push(g);
    }
    let mut file = WthorFile::new(2020, games);
    file.header.created = [20, 20, 12, 31];
    let out = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/sample.wtb");
    std::fs::create_dir_all(std::path::Path::new(out).parent().unwrap()).unwrap();
    std::fs::write(out, file.to_bytes()).unwrap();
    println!("wrote {} games to {out}", file.games.len());
}
