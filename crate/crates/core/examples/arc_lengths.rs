// Law of the distance from a site to its partner, empirical against exact.

use arches::stats::{arc_length_pmf, arc_length_pmf_exact, empirical_arc_lengths};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let kmax = 8;
    let emp = empirical_arc_lengths(2024, 200_000, kmax);
    println!(
        "{:>6} {:>10} {:>12} {:>10}",
        "length", "exact", "as fraction", "empirical"
    );
    for (k, e) in emp.iter().enumerate() {
        println!(
            "{:>6} {:>10.6} {:>12} {:>10.6}",
            2 * k + 1,
            arc_length_pmf(k),
            arc_length_pmf_exact(k).to_string(),
            e
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
