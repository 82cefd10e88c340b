use std::fmt;

use super::PhotoError;

/// Optically addressed charge states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Defect {
    NvMinus,
    NvZero,
    NsNeutral,
    PsNeutral,
    NsPlus,
    PsPlus,
}

impl Defect {
    pub const ALL: [Defect; 6] = [
        Defect::NvMinus,
        Defect::NvZero,
        Defect::NsNeutral,
        Defect::PsNeutral,
        Defect::NsPlus,
        Defect::PsPlus,
    ];
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Defect::NvMinus => "NV-",
            Defect::NvZero => "NV0",
            Defect::NsNeutral => "N_S0",
            Defect::PsNeutral => "P_S0",
            Defect::NsPlus => "N_S+",
            Defect::PsPlus => "P_S+",
        })
    }
}

/// Single-photon energy thresholds in eV.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeStateRules {
    pub nv_minus_ionization: f64,
    pub nv_minus_excitation: f64,
    pub nv_zero_conversion: f64,
    pub ns_neutral_ionization: f64,
    pub ps_neutral_ionization: f64,
    pub ns_plus_restore: f64,
    pub ps_plus_restore: f64,
    /// Above-threshold window in which the conduction electron keeps its spin.
    pub spin_conserving_window: f64,
}

impl Default for ChargeStateRules {
    fn default() -> Self {
        Self {
            nv_minus_ionization: 2.6,
            nv_minus_excitation: 1.946,
            nv_zero_conversion: 2.94,
            ns_neutral_ionization: 1.7,
            ps_neutral_ionization: 0.6,
            ns_plus_restore: 3.8,
            ps_plus_restore: 4.9,
            spin_conserving_window: 0.5,
        }
    }
}

impl ChargeStateRules {
    /// Threshold of the charge-changing transition of a defect.
    pub fn threshold(&self, defect: Defect) -> f64 {
        match defect {
            Defect::NvMinus => self.nv_minus_ionization,
            Defect::NvZero => self.nv_zero_conversion,
            Defect::NsNeutral => self.ns_neutral_ionization,
            Defect::PsNeutral => self.ps_neutral_ionization,
            Defect::NsPlus => self.ns_plus_restore,
            Defect::PsPlus => self.ps_plus_restore,
        }
    }

    pub fn spin_conserving_limit(&self, defect: Defect) -> f64 {
        self.threshold(defect) + self.spin_conserving_window
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Electron ejected into the conduction band.
    Ionizes,
    /// Internal optical excitation without charge change.
    Excites,
    /// Charge restored by capturing a valence electron.
    Converts,
    Untouched,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectReport {
    pub defect: Defect,
    pub outcome: Outcome,
    /// Only meaningful for [`Outcome::Ionizes`]; false otherwise.
    pub spin_conserving: bool,
}

pub fn selectivity_check(
    photon_energy_ev: f64,
    targets: &[Defect],
    rules: &ChargeStateRules,
) -> Result<Vec<DefectReport>, PhotoError> {
    if !(photon_energy_ev > 0.0) {
        return Err(PhotoError::Domain(format!(
            "photon energy must be positive, got {photon_energy_ev}"
        )));
    }
    let e = photon_energy_ev;
    Ok(targets
        .iter()
        .map(|&defect| {
            let above = e > rules.threshold(defect);
            let outcome = match defect {
                Defect::NvMinus if above => Outcome::Ionizes,
                Defect::NvMinus if e >= rules.nv_minus_excitation => Outcome::Excites,
                Defect::NsNeutral | Defect::PsNeutral if above => Outcome::Ionizes,
                Defect::NvZero | Defect::NsPlus | Defect::PsPlus if above => Outcome::Converts,
                _ => Outcome::Untouched,
            };
            DefectReport {
                defect,
                outcome,
                spin_conserving: outcome == Outcome::Ionizes
                    && e <= rules.spin_conserving_limit(defect),
            }
        })
        .collect())
}

/// Convert a vacuum wavelength (nm) to photon energy (eV).
pub fn photon_energy_ev(wavelength_nm: f64) -> f64 {
    crate::params::HC_EV_NM / wavelength_nm
}
