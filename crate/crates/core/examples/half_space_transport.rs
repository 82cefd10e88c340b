//! A photoelectron released under a planar electrode: finite-volume
//! drift-diffusion next to the closed-form image solution.

use spinbus::transport::{DriftDiffusionSolver, HalfSpaceSolution, InitialCondition, SolverConfig, TransportDomain};
use spinbus::PhysicalParameters;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::default();
    let (depth, width, field) = (18.0, 4.0, 0.0005);
    let domain = TransportDomain::half_space(depth, field, 90.0, 90.0, (-45.0, 45.0), [32; 3])?;
    let mut cfg = SolverConfig::from_parameters(&p);
    cfg.capture = false;
    cfg.initial = InitialCondition::Gaussian { width };
    let mut solver = DriftDiffusionSolver::new(domain, cfg)?;
    println!("dt = {:.3e} ns", solver.dt());
    let exact = HalfSpaceSolution::new(depth, width, field, p.mu_n, p.d_n)?;
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "t ns", "<z> pde", "<z> exact", "spread", "cons err");
    for q in solver.run(5.0, 6)? {
        println!(
            "{:>5.1} {:>10.4} {:>10.4} {:>10.3} {:>10.1e}",
            q.t,
            q.mean[2],
            exact.mean_position(q.t)[2],
            q.spread,
            q.conservation_error
        );
    }
    Ok(())
}
