//! Which (width, field) pairs keep enough density at the far end of a
//! nanowire, plus a steady-state check at one operating point.

use spinbus::transport::{feasibility_region, NanowireSteadyState};
use spinbus::PhysicalParameters;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::default();
    let widths: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let fields: Vec<f64> = (0..=60).map(|k| 10f64.powf(-3.0 + k as f64 / 15.0)).collect();
    let map = feasibility_region(&widths, &fields, 50.0, p.mu_n, p.d_n)?;
    for b in &map.boundaries {
        match (b.lower, b.upper) {
            (Some(lo), Some(hi)) => println!("l = {:.1} um: {lo:.4} .. {hi:.4} V/um (peak {:.0} um^-3)", b.width, b.peak_density),
            _ => println!("l = {:.1} um: infeasible (peak {:.1} um^-3)", b.width, b.peak_density),
        }
    }
    let ss = NanowireSteadyState::new(0.2, 2.0, 0.063, p.mu_n, p.d_n)?;
    let v = ss.validity();
    println!(
        "l = 0.2, L = 2, E = 0.063: rho(capturer) = {:.2} um^-3, Peclet {:.1}, settles in {:.3} ns",
        ss.density_at_capturer(),
        v.peclet,
        v.equilibration_time
    );
    Ok(())
}
