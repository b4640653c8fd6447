use othello_core::gen::random_live_position;
use othello_core::search::{SearchConfig, Searcher};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let size: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(6);
    let empties: u32 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(24);
    let count: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut nodes, mut ms, mut hits) = (0, 0, 0);
    for _ in 0..count {
        let p = random_live_position(&mut rng, size, empties);
        let mut s = Searcher::new(SearchConfig { tt_size_log2: std::env::var("TT").map(|v| v.parse().unwrap()).unwrap_or(16), use_negascout: std::env::var("NS").is_err(), ..SearchConfig::default() });
        let r = if std::env::var("ID").is_ok() { s.iterative_deepening_solve(&p, -3, 3) } else { s.solve_exact(&p, -3, 3) }.unwrap();
        nodes += r.stats.nodes_visited; hits += r.stats.tt_hits;
        ms += r.millis;
        println!("{} {r} {}ms", p.to_text(), r.millis);
    }
    println!("total {nodes} nodes {hits} hits {ms}ms");
}
