//! Full versus secular ¹⁴N_S Hamiltonian over field, with the residual
//! nuclear-flip terms that survive the secular approximation.

use spinbus::params::Isotope;
use spinbus::spin::{donor_hamiltonian, donor_secular_hamiltonian, max_eigenvalue_deviation_mhz, tetrahedral_angle};
use spinbus::PhysicalParameters;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::default();
    let n14 = p.donor(Isotope::N14);
    let theta = tetrahedral_angle();
    println!("{:>7} {:>10} {:>12} {:>12} {:>6}", "B (G)", "dev (MHz)", "quad (MHz)", "zeeman", "weak");
    for b in [500.0, 1000.0, 2000.0, 5000.0, 10000.0, 20000.0] {
        let full = donor_hamiltonian(n14, b, theta)?;
        let sec = donor_secular_hamiltonian(n14, b, false)?;
        let dev = max_eigenvalue_deviation_mhz(&full, &sec.hamiltonian);
        println!(
            "{b:>7} {dev:>10.4} {:>12.4} {:>12.5} {:>6}",
            sec.flip_terms.quadrupole_mhz, sec.flip_terms.nuclear_zeeman_mhz, sec.weak_field
        );
    }
    let sec = donor_secular_hamiltonian(n14, 5000.0, false)?;
    println!("alpha = {:.5} rad, chi = {:.5}", sec.alpha, sec.chi);
    Ok(())
}
