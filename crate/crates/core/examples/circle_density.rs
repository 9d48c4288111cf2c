// Density of circles (clusters of two sites) per vertex: the exact series
// next to a Monte Carlo estimate.

use arches::stats::{circle_density_mc, circle_density_series, circle_series_tail, DEFAULT_MARGIN};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let target = 1.0 / (2.0 * std::f64::consts::PI);
    for kmax in [0, 10, 1000, 1_000_000] {
        let s = circle_density_series(kmax);
        println!(
            "series kmax={kmax:>8}  value={:.8}  gap={:.2e}  tail~{:.2e}",
            s.value,
            target - s.value,
            circle_series_tail(kmax)
        );
    }
    let seeds: Vec<u64> = (1..=4).collect();
    let mc = circle_density_mc(&seeds, 200_000, 0, DEFAULT_MARGIN);
    println!(
        "monte carlo  value={:.5} ± {:.5} over {} seeds",
        mc.value, mc.stderr, mc.n_samples
    );
    println!("1/(2 pi)     value={target:.8}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
