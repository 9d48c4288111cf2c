// Reconnect two dangling ends while keeping every end in place.

use arches::realizer::{realize, rewire, RealizeRequest};
use arches::{decompose, EndProfile};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let req = RealizeRequest::new(12, EndProfile::new(2, 0, 1, 1), "1-2,3-4".parse()?)?;
    let w = realize(&req)?;
    println!("before {w}  sigma={}", decompose(&w).sigma);
    let out = rewire(&w, 0, 3)?;
    let d = decompose(&out);
    println!("after  {out}  sigma={}  profile={}", d.sigma, d.profile());
    match rewire(&w, 0, 2) {
        Ok(_) => println!("ends 1 and 3 rewired as well"),
        Err(e) => println!("ends 1 and 3: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
