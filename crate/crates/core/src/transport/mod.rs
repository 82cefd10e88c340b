//! Electron transport in the conduction band: the drift-diffusion solver,
//! closed-form oracles and the nanowire feasibility region.

mod analytic;
mod domain;
mod io;
mod solver;

use thiserror::Error;

pub use analytic::{
    capturer_density, feasibility_region, feasibility_roots, spread_radius, transport_distance,
    DriftReport, FeasibilityBoundary, FeasibilityMap, HalfSpaceSolution, NanowireSteadyState,
    NanowireValidity, PECLET_VALIDITY_THRESHOLD,
};
pub use domain::{Geometry, Grid, TransportDomain};
pub use io::{read_grid_dump, write_grid_dump, write_trajectory_csv, TRAJECTORY_HEADER};
pub use solver::{
    solve_drift_diffusion, DriftDiffusionSolver, InitialCondition, PulseProfile, SolverConfig,
    TrajectoryPoint, TransportRun, TransportState, NEGATIVE_DENSITY_GUARD,
};

#[derive(Debug, Error, PartialEq)]
pub enum TransportError {
    #[error("time step {dt} ns exceeds the stability limit {limit} ns")]
    Cfl { dt: f64, limit: f64 },
    #[error("density fell to {value} at t = {t} ns")]
    NegativeDensity { t: f64, value: f64 },
    #[error("{0} lies outside the grid")]
    OffGrid(&'static str),
    #[error("injector and capturer are only {0:.2} cells apart; need at least 8")]
    Resolution(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid dump: {0}")]
    Format(String),
}
