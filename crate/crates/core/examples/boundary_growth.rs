// Dangling ends of [1, N] grow like the range of a simple walk, so their
// share of N vanishes.

use arches::stats::boundary_growth;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let seeds: Vec<u64> = (0..16).collect();
    let rows = boundary_growth(&[1, 10, 100, 1000, 10_000, 100_000], &seeds);
    println!(
        "{:>8} {:>10} {:>9} {:>9} {:>9}",
        "N", "mean ends", "ratio", "q10", "q90"
    );
    for r in &rows {
        println!(
            "{:>8} {:>10.1} {:>9.5} {:>9.5} {:>9.5}",
            r.n, r.mean_n_tot, r.mean_ratio, r.q10_ratio, r.q90_ratio
        );
        assert!(r.methods_agree);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
