// A configuration built by the realizer that puts a trifurcation point at
// the origin, and scans of the random line.

use arches::stats::{trifurcation_scan, witness_request, witness_window, ScanEnv};
use arches::{decompose, Budget, LazyLine};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    // Three paths meet near 0: the one through 0 and the two whose arcs pass
    // over and under it. The generic realizer places them from the end
    // profile and the pairing of ends alone.
    let (req, lo) = witness_request();
    let w = witness_window();
    println!(
        "request len={} profile={} sigma={} at lo={lo}",
        req.len, req.profile, req.sigma
    );
    println!("window {w}  paths={}", decompose(&w).boundary_paths.len());
    let r = trifurcation_scan(ScanEnv::Frozen(&w), w.lo, w.hi(), Budget::new(1000, 1000));
    for a in &r.audit {
        println!("point {}: {}", a.site, serde_json::to_string(a)?);
    }

    let budget = Budget::new(100_000, 100_000);
    for seed in 0..5 {
        let mut line = LazyLine::new(seed);
        let r = trifurcation_scan(ScanEnv::Line(&mut line), 0, 9_999, budget);
        println!(
            "seed {seed}: {} points, {} escaping clusters, bound holds: {}",
            r.points.len(),
            r.escaping_cluster_count,
            r.counting_bound_holds
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
