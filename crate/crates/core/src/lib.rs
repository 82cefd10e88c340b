//! Simulation toolkit for a room-temperature spin quantum bus in diamond.
//!
//! An electron spin prepared on a donor (or NV) center is photoionized into
//! the conduction band, drifts and diffuses along a nanowire, and is captured
//! and read out at a distant NV–¹⁴N_S pair. The crate covers each stage:
//!
//! - [`params`]: material constants and the μm–ns–V–eV–GHz–G–K unit system
//! - [`spin`]: NV and donor spin Hamiltonians, secular reduction, evolution
//! - [`photophysics`]: cross-section tables, injection fidelity, ionization,
//!   capture and recharge kinetics, photon-energy selectivity
//! - [`transport`]: finite-volume drift-diffusion solver with capture
//!   kinetics, closed-form half-space and nanowire solutions, feasibility maps
//! - [`protocol`]: injection / detection / entanglement timelines and their
//!   timing budgets
//! - [`cli`]: configuration files and the commands behind the `spinbus` binary

pub mod cli;
pub mod params;
pub mod photophysics;
pub mod protocol;
pub mod spin;
pub mod transport;

pub use params::{load_parameters, thermal_velocity, PhysicalParameters};
