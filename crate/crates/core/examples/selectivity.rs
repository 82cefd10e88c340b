//! What red, green and blue light do to each defect charge state.

use spinbus::photophysics::{selectivity_check, ChargeStateRules, Defect, Outcome};
use spinbus::protocol::{BLUE_BAND, BLUE_DEFAULT_EV, GREEN_BAND, GREEN_DEFAULT_EV, RED_BAND, RED_DEFAULT_EV};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rules = ChargeStateRules::default();
    for e in [RED_DEFAULT_EV, GREEN_DEFAULT_EV, BLUE_DEFAULT_EV, 3.3] {
        let band = [("red", RED_BAND), ("green", GREEN_BAND), ("blue", BLUE_BAND)]
            .into_iter()
            .find(|(_, (lo, hi))| (*lo..=*hi).contains(&e))
            .map_or("outside every band", |(name, _)| name);
        println!("{e} eV ({band}):");
        for r in selectivity_check(e, &Defect::ALL, &rules)? {
            let tag = match r.outcome {
                Outcome::Ionizes if r.spin_conserving => "ionizes, spin kept",
                Outcome::Ionizes => "ionizes, spin lost",
                Outcome::Excites => "excites",
                Outcome::Converts => "converts",
                Outcome::Untouched => "-",
            };
            println!("  {:<5} {tag}", r.defect.to_string());
        }
    }
    Ok(())
}
