// Finite clusters are meanders: counts by enumeration and a sampled one.

use arches::meander::{component_histogram, count_meanders, sample_meander};
use arches::noncrossing::catalan;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=6 {
        let c = catalan(n)?;
        let m = count_meanders(n, false)?;
        println!("order {n}: {m:>5} connected of {:>6} pairs", c * c);
    }
    println!("components at order 4: {:?}", component_histogram(4));
    let s = sample_meander(5, 99, 100_000)?;
    println!(
        "sample of order 5 after {} tries: upper {} lower {} cycle {:?}",
        s.tries,
        s.diagram.upper,
        s.diagram.lower,
        s.diagram.cycle()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
