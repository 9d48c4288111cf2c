// Follow the cluster of a site on the lazily sampled line.

use arches::stats::closure_report;
use arches::{Budget, LazyLine};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget::new(10_000, 1_000_000);
    let mut line = LazyLine::new(42);
    for origin in [0, 1, 2, 3] {
        let t = line.trace_cluster(origin, budget);
        let record = t.to_record(42, t.len() <= 8);
        println!("{}", serde_json::to_string(&record)?);
    }
    let seeds: Vec<u64> = (0..200).collect();
    let r = closure_report(&seeds, 0, budget);
    println!(
        "closed within budget: {} of {} (longest closed cluster {} sites)",
        r.closed, r.seeds, r.longest_closed
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
