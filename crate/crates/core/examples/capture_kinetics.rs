//! Capture rates by donor density, recharge waits and the stray-electron
//! budget of an ensemble.

use spinbus::photophysics::{capture_rate, excitation_volume, recharge_time, spurious_electron_estimate};
use spinbus::PhysicalParameters;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::default();
    println!("v_th = {:.2} um/ns", p.thermal_velocity());
    println!("{:>10} {:>12} {:>12} {:>14}", "rho um^-3", "Gamma MHz", "t_cap ns", "t(99%) ns");
    for rho in [1.0, 5.0, 50.0, 500.0, 5000.0] {
        let c = capture_rate(rho, p.sigma_cap, p.temperature, p.m_eff)?;
        let t99 = recharge_time(rho, p.sigma_cap, p.temperature, p.m_eff, 0.99)?;
        println!("{rho:>10} {:>12.3} {:>12.1} {t99:>14.1}", c.rate * 1e3, c.capture_time);
    }
    let v = excitation_volume(p.spurious_spot_diameter, p.spurious_depth);
    for n in [1.0, 10.0, 100.0] {
        let s = spurious_electron_estimate(n, v, 0.5)?;
        println!("n = {n:>5} um^-3: {:.2} stray electrons, P(>=1) = {:.3}", s.expected, s.probability_at_least_one);
    }
    Ok(())
}
