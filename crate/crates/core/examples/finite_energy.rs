// Exhaustive check that overriding the sites of S costs at most a factor
// 4^|S| in probability.

use arches::realizer::{verify_finite_energy, FiniteEnergyCase};
use arches::window::SiteState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    // force sites 2 and 3 into a short loop whenever site 1 opens upwards
    let phi = |_: &[(i64, SiteState)]| vec![SiteState::PLUS_PLUS, SiteState::MINUS_MINUS];
    let event = |w: &arches::Window| w.sites[0].upper == arches::Sign::Plus;
    let r = verify_finite_energy(4, &[2, 3], &phi, &event)?;
    println!(
        "P(C)={}  P(C~)={}  4^-|S|={}  holds={}",
        r.p_event, r.p_modified, r.factor, r.bound_ok
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = None;
    for _ in 0..20 {
        let case = FiniteEnergyCase::sample(4, &mut rng)?;
        let r = case.verify()?;
        assert!(r.bound_ok);
        if r.p_event > num::Zero::zero() {
            let slack = r.p_modified / (r.factor * r.p_event);
            if worst.is_none_or(|w| slack < w) {
                worst = Some(slack);
            }
        }
    }
    println!(
        "20 random instances hold; smallest P(C~) / (4^-|S| P(C)) = {}",
        worst.unwrap()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
