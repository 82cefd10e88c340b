//! Optical spin injection: cross-section tables, injection fidelity,
//! photoionization / capture / recharge kinetics and photon-energy
//! selectivity between defect charge states.

mod cross_section;
mod kinetics;
mod selectivity;

use thiserror::Error;

pub use cross_section::{fidelity_curve, injection_fidelity, CrossSectionTable, TableKind, UnitsFlag};
pub use kinetics::{
    capture_rate, default_spot_area, excitation_volume, photoionization_rate, recharge_time,
    spurious_electron_estimate, two_photon_verdict, CaptureRate, SpuriousEstimate,
    TwoPhotonVerdict, THERMAL_FREE_ELECTRONS,
};
pub use selectivity::{
    photon_energy_ev, selectivity_check, ChargeStateRules, Defect, DefectReport, Outcome,
};

#[derive(Debug, Error, PartialEq)]
pub enum PhotoError {
    #[error("cross-section table: {0}")]
    Table(String),
    #[error("wavelength {lambda} nm outside table range [{lo}, {hi}] nm")]
    OutOfRange { lambda: f64, lo: f64, hi: f64 },
    #[error("both cross-sections vanish at {0} nm; fidelity undefined")]
    UndefinedFidelity(f64),
    #[error("tables must both be absolute or share a relative normalization")]
    IncompatibleUnits,
    #[error("zero ensemble density: the donor never recharges")]
    NeverRecharges,
    #[error("domain error: {0}")]
    Domain(String),
}
