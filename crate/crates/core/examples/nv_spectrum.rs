//! NV ground-state levels against axial field, up to the m_s = −1 / 0
//! crossing.

use spinbus::spin::{nv_hamiltonian, nv_level_anticrossing_field};
use spinbus::PhysicalParameters;

fn main() {
    let p = PhysicalParameters::default();
    let crossing = nv_level_anticrossing_field(p.d_gs);
    println!("m_s = -1 meets m_s = 0 at {crossing:.1} G");
    println!("{:>8} {:>10} {:>10} {:>10}", "B (G)", "E0 (GHz)", "E1", "E2");
    for k in 0..=8 {
        let b = crossing * k as f64 / 8.0;
        let e = nv_hamiltonian(p.d_gs, b).eigenvalues();
        println!("{b:>8.1} {:>10.4} {:>10.4} {:>10.4}", e[0], e[1], e[2]);
    }
}
