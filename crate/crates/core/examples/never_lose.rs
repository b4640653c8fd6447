//! Plays the engine against seeded random opponents.
//!
//! Usage: `never_lose BOOK GAMES [SEED]`

use std::time::Instant;

use othello_core::player::{Engine, EngineConfig, PlaySession};
use othello_core::store::load_book;
use othello_core::Color;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let book = load_book(std::path::Path::new(&args[1])).expect("book");
    let games: u64 = args[2].parse().unwrap();
    let seed: u64 = args.get(3).map_or(0, |s| s.parse().unwrap());
    let dict = book.bound_dictionary();
    let e2 = dict.iter().map(|(p, _)| p.empties()).max().unwrap();
    let engine = Engine::new(dict, EngineConfig::new(e2));
    let start = Instant::now();
    let mut worst = i32::MAX;
    for g in 0..games {
        let color = if g % 2 == 0 { Color::Black } else { Color::White };
        let mut rng = ChaCha8Rng::seed_from_u64(seed + g);
        let mut s = PlaySession::new(6, color, engine.clone()).unwrap();
        let certified = s.certified_value().unwrap();
        while !s.is_over() {
            if s.engine_to_move() {
                s.engine_move().unwrap();
            } else {
                let mv = *s.position().legal_moves().choose(&mut rng).unwrap();
                s.play_opponent(mv).unwrap();
            }
        }
        let score = s.final_score(color).unwrap();
        assert!(score >= certified, "game {g}: {score} < {certified}: {}", s.record());
        worst = worst.min(score - certified);
        if (g + 1) % 100 == 0 {
            println!("{} games, worst margin {worst}, {:.1}s", g + 1, start.elapsed().as_secs_f64());
        }
    }
}
