use othello_core::eval::EstimateDictionary;
use othello_core::frontier::{traverse, BoundDictionary, FrontierConfig, TaskSet};
use othello_core::search::{SearchConfig, Searcher};
use othello_core::Position;

fn main() {
    let n: usize = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(5);
    let shared = std::env::var("SHARED").is_ok();
    let p = Position::initial(6).unwrap();
    let cfg = FrontierConfig::new(28, 26);
    let mut tasks = TaskSet::new();
    traverse(&p, &BoundDictionary::new(), &EstimateDictionary::new(), &mut tasks, -5, -3, &cfg);
    let mut total = 0;
    let mut nodes = 0;
    let mut s = Searcher::new(SearchConfig { tt_size_log2: 20, ..SearchConfig::default() });
    for (q, t) in tasks.iter().take(n) {
        if !shared {
            s = Searcher::new(SearchConfig { tt_size_log2: 20, ..SearchConfig::default() });
        }
        let r = s.solve_exact(q, t.alpha, t.beta).unwrap();
        total += r.millis;
        nodes += r.stats.nodes_visited;
        println!("{} ({},{}) est {} -> {r} {}ms", q.to_text(), t.alpha, t.beta, t.estimate, r.millis);
    }
    println!("total {nodes} nodes {total}ms");
}
