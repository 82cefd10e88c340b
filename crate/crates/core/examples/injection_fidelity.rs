//! Ionization-versus-excitation fidelity from the bundled cross-section
//! tables, plus NV⁻ photoionization rate under a focused laser.
//!
//! Pass two table files to use your own: `cargo run --example
//! injection_fidelity -- ion.txt opt.txt`.

use spinbus::photophysics::{fidelity_curve, photoionization_rate, CrossSectionTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (ion, opt) = match args.as_slice() {
        [a, b] => (CrossSectionTable::load(a)?, CrossSectionTable::load(b)?),
        _ => (CrossSectionTable::bundled_ionization(), CrossSectionTable::bundled_absorption()),
    };
    for (lambda, f) in fidelity_curve(&ion, &opt, 10.0)? {
        let bar = "#".repeat((f * 40.0).round() as usize);
        println!("{lambda:>5} nm {f:.3} {bar}");
    }
    // 1 mW at 450 nm, σ ≈ 1e-3 Å²
    let k = photoionization_rate(1e-3, 1.0, 450.0, None)?;
    println!("ionization rate at 1 mW, 450 nm: {k:.3e} /ns ({:.1} ns)", 1.0 / k);
    Ok(())
}
