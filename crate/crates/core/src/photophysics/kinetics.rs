use std::f64::consts::PI;

use super::PhotoError;
use crate::params::{self, ELEMENTARY_CHARGE_C, HC_EV_NM};

/// Equilibrium conduction-band electron count. The shallowest donor sits
/// 1.7 eV below the band edge, so at room temperature this is zero.
pub const THERMAL_FREE_ELECTRONS: f64 = 0.0;

const MW_TO_J_PER_NS: f64 = 1e-12;
const ANGSTROM2_TO_UM2: f64 = 1e-8;
const NM2_TO_UM2: f64 = 1e-6;

/// Diffraction-limited spot area π(λ/2)² in μm².
pub fn default_spot_area(wavelength_nm: f64) -> f64 {
    let r_um = wavelength_nm * 1e-3 / 2.0;
    PI * r_um * r_um
}

/// Single-photon ionization rate σ·Φ (1/ns) for a cross-section in Å² under
/// `power_mw` focused into `spot_area_um2` (default: diffraction limited).
pub fn photoionization_rate(
    sigma_a2: f64,
    power_mw: f64,
    wavelength_nm: f64,
    spot_area_um2: Option<f64>,
) -> Result<f64, PhotoError> {
    let area = spot_area_um2.unwrap_or_else(|| default_spot_area(wavelength_nm));
    if !(sigma_a2 > 0.0 && wavelength_nm > 0.0 && area > 0.0) || !(power_mw >= 0.0) {
        return Err(PhotoError::Domain(format!(
            "photoionization needs σ, λ, area > 0 and P ≥ 0 (σ = {sigma_a2}, P = {power_mw}, λ = {wavelength_nm}, A = {area})"
        )));
    }
    let photon_energy_j = HC_EV_NM / wavelength_nm * ELEMENTARY_CHARGE_C;
    let flux = power_mw * MW_TO_J_PER_NS / photon_energy_j / area;
    Ok(sigma_a2 * ANGSTROM2_TO_UM2 * flux)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureRate {
    /// 1/ns
    pub rate: f64,
    /// ns; infinite when the density vanishes.
    pub capture_time: f64,
}

/// Γ = ρ·σ_cap·√(k_B T/m) for a density in μm⁻³ and σ_cap in nm².
pub fn capture_rate(
    rho: f64,
    sigma_cap_nm2: f64,
    temperature: f64,
    m_eff: f64,
) -> Result<CaptureRate, PhotoError> {
    if !(rho >= 0.0) || !(sigma_cap_nm2 >= 0.0) {
        return Err(PhotoError::Domain(format!(
            "capture needs ρ ≥ 0 and σ_cap ≥ 0 (ρ = {rho}, σ = {sigma_cap_nm2})"
        )));
    }
    let v = params::thermal_velocity(temperature, m_eff)
        .map_err(|e| PhotoError::Domain(e.to_string()))?;
    let rate = rho * sigma_cap_nm2 * NM2_TO_UM2 * v;
    Ok(CaptureRate {
        rate,
        capture_time: 1.0 / rate,
    })
}

/// Time (ns) after which an ionized donor has recaptured an electron from a
/// photoionized ensemble of density ρ with probability p.
pub fn recharge_time(
    rho_ensemble: f64,
    sigma_cap_nm2: f64,
    temperature: f64,
    m_eff: f64,
    target_probability: f64,
) -> Result<f64, PhotoError> {
    if !(target_probability > 0.0 && target_probability < 1.0) {
        return Err(PhotoError::Domain(format!(
            "target probability must lie in (0, 1), got {target_probability}"
        )));
    }
    let gamma = capture_rate(rho_ensemble, sigma_cap_nm2, temperature, m_eff)?.rate;
    if gamma == 0.0 {
        return Err(PhotoError::NeverRecharges);
    }
    Ok(-(1.0 - target_probability).ln() / gamma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpuriousEstimate {
    /// Expected number of stray photoelectrons, n·V·p.
    pub expected: f64,
    /// Poisson probability of at least one, 1 − e^(−expected).
    pub probability_at_least_one: f64,
}

pub fn spurious_electron_estimate(
    n_donor: f64,
    excitation_volume_um3: f64,
    ionization_probability: f64,
) -> Result<SpuriousEstimate, PhotoError> {
    if !(n_donor >= 0.0 && excitation_volume_um3 >= 0.0) {
        return Err(PhotoError::Domain("density and volume must be non-negative".into()));
    }
    if !(0.0..=1.0).contains(&ionization_probability) {
        return Err(PhotoError::Domain(format!(
            "ionization probability must lie in [0, 1], got {ionization_probability}"
        )));
    }
    let expected = n_donor * excitation_volume_um3 * ionization_probability;
    Ok(SpuriousEstimate {
        expected,
        probability_at_least_one: -(-expected).exp_m1(),
    })
}

/// Cylinder of the given spot diameter and depth, in μm³.
pub fn excitation_volume(spot_diameter_um: f64, depth_um: f64) -> f64 {
    PI * (spot_diameter_um / 2.0).powi(2) * depth_um
}

/// Outcome of two-photon NV⁻ ionization under green light. Only a verdict
/// is modeled: the intermediate excited state scrambles the spin, capping
/// the injection probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonVerdict {
    pub coherent_injection_disqualified: bool,
    pub max_injection_probability: f64,
}

pub fn two_photon_verdict() -> TwoPhotonVerdict {
    TwoPhotonVerdict {
        coherent_injection_disqualified: true,
        max_injection_probability: 0.66,
    }
}
