// Build a window with prescribed dangling ends and boundary matching, then
// read both back.

use arches::realizer::{construction_cost, realize, RealizeRequest};
use arches::{decompose, EndProfile};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (10, "2,0,1,1", "1-4,2-3"),
        (10, "2,0,1,1", "1-2,3-4"),
        (9, "1,1,0,1", ""),
        (16, "2,2,2,2", "1-8,2-3,4-5,6-7"),
    ];
    for (len, profile, sigma) in cases {
        let profile: EndProfile = profile.parse()?;
        let sigma = sigma.parse()?;
        if sigma == arches::NcMatching::empty() && profile.total() > 0 {
            // nothing to pair: show the parity rejection instead
            let odd = RealizeRequest::new(len, profile, sigma);
            println!("len={len} profile={profile}: {}", odd.unwrap_err());
            continue;
        }
        let req = RealizeRequest::new(len, profile, sigma)?;
        let w = realize(&req)?;
        let d = decompose(&w);
        println!(
            "len={len} profile={profile} sigma={}  cost={}  window {w}  ->  profile={} sigma={} cycles={}",
            req.sigma,
            construction_cost(&req.profile, &req.sigma),
            d.profile(),
            d.sigma,
            d.internal_cycles.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
