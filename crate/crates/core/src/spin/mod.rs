//! Spin Hamiltonians of the NV and donor centers, their reduction to the
//! high-field secular form, unitary evolution and dephasing estimates.

mod dynamics;
mod hamiltonian;
mod operators;

use thiserror::Error;

pub use dynamics::{
    evolve, expectation, ionization_dephasing, nuclear_flip_dephasing, phase_averaged_coherence,
    product_state_expansion, separated_nv_hamiltonian, transport_dephasing, DephasingEstimate,
    DephasingMechanism, StateVector,
};
pub use hamiltonian::{
    donor_hamiltonian, donor_secular_hamiltonian, max_eigenvalue_deviation_mhz,
    misalignment_angle, nv_hamiltonian, nv_level_anticrossing_field, tetrahedral_angle,
    BasisLabel, FlipTerms, SecularHamiltonian, SpinHamiltonian, Spectrum, EIGEN_TOLERANCE,
};
pub use operators::{hermiticity_error, CMatrix, SpinOperators, C64};

#[derive(Debug, Error, PartialEq)]
pub enum SpinError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state is not normalized (norm {0})")]
    Unnormalized(f64),
    #[error("matrix is not Hermitian (relative error {0:e})")]
    NonHermitian(f64),
    #[error("misalignment angle is undefined: zero denominator")]
    DegenerateGeometry,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
}
