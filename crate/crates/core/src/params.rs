//! Physical constants, material parameters and the unit system.
//!
//! Every quantity in the crate is expressed in one fixed system:
//! micrometres, nanoseconds, volts, electronvolts, gigahertz (spin
//! Hamiltonians), gauss and kelvin. Hyperfine constants are stored in MHz
//! as tabulated and converted to GHz at the Hamiltonian boundary.

use std::fmt;

use thiserror::Error;

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV_PER_K: f64 = 8.617_333_262e-5;
/// Boltzmann constant in J/K.
pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;
/// Free-electron mass in kg.
pub const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;
/// Elementary charge in C (also J per eV).
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;
/// h·c in eV·nm.
pub const HC_EV_NM: f64 = 1_239.841_984;
/// e/(4πε₀) in V·μm.
pub const COULOMB_V_UM: f64 = 1.439_964_548e-3;
/// Nuclear magneton over Planck constant in MHz/G.
pub const NUCLEAR_MAGNETON_MHZ_PER_G: f64 = 7.622_593_229e-4;
/// Free-electron gyromagnetic ratio in MHz/G (g ≈ 2.0023).
pub const GAMMA_E_MHZ_PER_G: f64 = 2.8025;

/// Fixed unit system of the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UnitSystem;

impl UnitSystem {
    pub const LENGTH: &'static str = "um";
    pub const TIME: &'static str = "ns";
    pub const VOLTAGE: &'static str = "V";
    pub const ENERGY: &'static str = "eV";
    pub const FREQUENCY: &'static str = "GHz";
    pub const MAGNETIC_FIELD: &'static str = "G";
    pub const TEMPERATURE: &'static str = "K";
}

/// Unit tag carried by every registry entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Mobility,
    Diffusivity,
    Nanosecond,
    SquareNanometre,
    SquareAngstrom,
    ElectronMass,
    Dimensionless,
    Kelvin,
    Gigahertz,
    MegahertzPerGauss,
    Micrometre,
}

impl Unit {
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Mobility => "um^2/(V*ns)",
            Unit::Diffusivity => "um^2/ns",
            Unit::Nanosecond => "ns",
            Unit::SquareNanometre => "nm^2",
            Unit::SquareAngstrom => "A^2",
            Unit::ElectronMass => "m_e",
            Unit::Dimensionless => "1",
            Unit::Kelvin => "K",
            Unit::Gigahertz => "GHz",
            Unit::MegahertzPerGauss => "MHz/G",
            Unit::Micrometre => "um",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A value tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("malformed parameter document: {0}")]
    Malformed(String),
    #[error("unknown parameter key `{0}`")]
    UnknownKey(String),
    #[error("parameter `{key}` = {value} out of range: {reason}")]
    OutOfRange {
        key: String,
        value: f64,
        reason: &'static str,
    },
    #[error("parameter `{key}` given in `{found}`, expected `{expected}`")]
    UnitMismatch {
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("domain error: {0}")]
    Domain(String),
}

/// Nuclear isotope of a donor record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Isotope {
    N14,
    N15,
    P31,
}

impl Isotope {
    pub fn from_name(name: &str) -> Result<Self, ParamError> {
        match name.trim() {
            "14N" | "N14" | "14N_S" => Ok(Isotope::N14),
            "15N" | "N15" | "15N_S" => Ok(Isotope::N15),
            "31P" | "P31" | "P" | "P_S" => Ok(Isotope::P31),
            other => Err(ParamError::UnknownKey(format!("isotope {other}"))),
        }
    }
}

/// Crystallographic orientation of the defect distortion / hyperfine axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Trigonal111,
    Tetragonal100,
}

/// Spin parameters of a neutral donor center.
#[derive(Debug, Clone, PartialEq)]
pub struct DonorRecord {
    pub name: &'static str,
    pub isotope: Isotope,
    pub orientation: Orientation,
    pub g_e: f64,
    pub g_n: f64,
    /// Twice the nuclear spin (2 for I = 1, 1 for I = 1/2).
    pub two_i: u32,
    /// Magnetic hyperfine parameters in MHz.
    pub a_par: f64,
    pub a_perp: f64,
    /// Electric quadrupole parameter in MHz, absent for I = 1/2.
    pub q: Option<f64>,
}

impl DonorRecord {
    pub fn nuclear_spin(&self) -> f64 {
        self.two_i as f64 / 2.0
    }

    /// Nuclear gyromagnetic ratio in MHz/G.
    pub fn gamma_n(&self) -> f64 {
        self.g_n * NUCLEAR_MAGNETON_MHZ_PER_G
    }

    pub fn with_hyperfine(mut self, a_par: f64, a_perp: f64, q: Option<f64>) -> Self {
        self.a_par = a_par;
        self.a_perp = a_perp;
        self.q = q;
        self
    }
}

/// Neutral-donor spin parameters (¹⁴N_S⁰, ¹⁵N_S⁰, P_S⁰).
pub fn donor_table() -> [DonorRecord; 3] {
    [
        DonorRecord {
            name: "14N_S0",
            isotope: Isotope::N14,
            orientation: Orientation::Trigonal111,
            g_e: 2.0,
            g_n: 0.40,
            two_i: 2,
            a_par: 114.0,
            a_perp: 81.0,
            q: Some(-3.97),
        },
        DonorRecord {
            name: "15N_S0",
            isotope: Isotope::N15,
            orientation: Orientation::Trigonal111,
            g_e: 2.0,
            g_n: -0.57,
            two_i: 1,
            a_par: -160.0,
            a_perp: -114.0,
            q: None,
        },
        DonorRecord {
            name: "P_S0",
            isotope: Isotope::P31,
            orientation: Orientation::Tetragonal100,
            g_e: 2.0,
            g_n: 2.26,
            two_i: 1,
            a_par: 162.0,
            a_perp: 33.9,
            q: None,
        },
    ]
}

/// Registry of material and defect constants.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParameters {
    /// Electron mobility, μm²/(V·ns).
    pub mu_n: f64,
    /// Electron diffusivity, μm²/ns.
    pub d_n: f64,
    /// Transport spin relaxation time T₁ (and T₂ ≈ T₁), ns.
    pub t1_transport: f64,
    /// Capture cross-section of N_S⁺, nm².
    pub sigma_cap: f64,
    /// Donor photoionization cross-section, Å².
    pub sigma_ion_donor: f64,
    /// Effective electron mass in free-electron masses.
    pub m_eff: f64,
    pub epsilon_r: f64,
    /// Kelvin.
    pub temperature: f64,
    /// NV ground / excited state zero-field splittings, GHz.
    pub d_gs: f64,
    pub d_es: f64,
    /// Electron gyromagnetic ratio, MHz/G.
    pub gamma_e: f64,
    /// Optical spot diameter used for the spurious-electron volume, μm.
    pub spurious_spot_diameter: f64,
    /// Excitation depth used for the spurious-electron volume, μm.
    pub spurious_depth: f64,
    pub donors: [DonorRecord; 3],
}

impl Default for PhysicalParameters {
    fn default() -> Self {
        Self {
            mu_n: 450.0,
            d_n: 11.0,
            t1_transport: 180.0,
            sigma_cap: 5.0,
            sigma_ion_donor: 0.75,
            m_eff: 1.0,
            epsilon_r: 5.7,
            temperature: 300.0,
            d_gs: 2.87,
            d_es: 1.42,
            gamma_e: GAMMA_E_MHZ_PER_G,
            spurious_spot_diameter: 0.3,
            spurious_depth: 0.35,
            donors: donor_table(),
        }
    }
}

enum Range {
    Positive,
    NonNegative,
    AtLeastOne,
}

struct Entry {
    key: &'static str,
    unit: Unit,
    range: Range,
    get: fn(&PhysicalParameters) -> f64,
    set: fn(&mut PhysicalParameters, f64),
}

macro_rules! entry {
    ($key:literal, $field:ident, $unit:expr, $range:expr) => {
        Entry {
            key: $key,
            unit: $unit,
            range: $range,
            get: |p| p.$field,
            set: |p, v| p.$field = v,
        }
    };
}

// Serialization order.
const ENTRIES: &[Entry] = &[
    entry!("mu_n", mu_n, Unit::Mobility, Range::Positive),
    entry!("d_n", d_n, Unit::Diffusivity, Range::Positive),
    entry!("t1_transport", t1_transport, Unit::Nanosecond, Range::Positive),
    entry!("sigma_cap", sigma_cap, Unit::SquareNanometre, Range::NonNegative),
    entry!(
        "sigma_ion_donor",
        sigma_ion_donor,
        Unit::SquareAngstrom,
        Range::NonNegative
    ),
    entry!("m_eff", m_eff, Unit::ElectronMass, Range::Positive),
    entry!("epsilon_r", epsilon_r, Unit::Dimensionless, Range::AtLeastOne),
    entry!("temperature", temperature, Unit::Kelvin, Range::Positive),
    entry!("d_gs", d_gs, Unit::Gigahertz, Range::NonNegative),
    entry!("d_es", d_es, Unit::Gigahertz, Range::NonNegative),
    entry!("gamma_e", gamma_e, Unit::MegahertzPerGauss, Range::Positive),
    entry!(
        "spurious_spot_diameter",
        spurious_spot_diameter,
        Unit::Micrometre,
        Range::Positive
    ),
    entry!("spurious_depth", spurious_depth, Unit::Micrometre, Range::Positive),
];

impl PhysicalParameters {
    /// All scalar registry entries with their unit tags, in serialization order.
    pub fn quantities(&self) -> Vec<(&'static str, Quantity)> {
        ENTRIES
            .iter()
            .map(|e| {
                (
                    e.key,
                    Quantity {
                        value: (e.get)(self),
                        unit: e.unit,
                    },
                )
            })
            .collect()
    }

    pub fn get(&self, key: &str) -> Option<Quantity> {
        ENTRIES.iter().find(|e| e.key == key).map(|e| Quantity {
            value: (e.get)(self),
            unit: e.unit,
        })
    }

    /// Set one registry entry, checking its range.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ParamError> {
        let entry = ENTRIES
            .iter()
            .find(|e| e.key == key)
            .ok_or_else(|| ParamError::UnknownKey(key.to_string()))?;
        check_range(entry, value)?;
        (entry.set)(self, value);
        Ok(())
    }

    pub fn donor(&self, isotope: Isotope) -> &DonorRecord {
        self.donors
            .iter()
            .find(|d| d.isotope == isotope)
            .expect("donor table holds every isotope")
    }

    /// Electron thermal velocity √(k_B T/m) in μm/ns.
    pub fn thermal_velocity(&self) -> f64 {
        thermal_velocity(self.temperature, self.m_eff).expect("validated parameters")
    }

    /// Capture rate per unit electron density, k_C = σ_cap·√(k_B T/m), in μm³/ns.
    pub fn capture_coefficient(&self) -> f64 {
        self.sigma_cap * 1e-6 * self.thermal_velocity()
    }

    /// Einstein-relation diffusivity μ_n·k_B·T/e in μm²/ns.
    pub fn einstein_diffusivity(&self) -> f64 {
        self.mu_n * BOLTZMANN_EV_PER_K * self.temperature
    }

    /// Absolute permittivity factor: e/(4πε) in V·μm.
    pub fn coulomb_constant(&self) -> f64 {
        COULOMB_V_UM / self.epsilon_r
    }

    /// Normalized key = value rendering of every scalar entry.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for e in ENTRIES {
            out.push_str(&format!("{} = {}\n", e.key, fmt_toml_float((e.get)(self))));
        }
        out
    }
}

fn fmt_toml_float(v: f64) -> String {
    let s = format!("{v}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn check_range(entry: &Entry, value: f64) -> Result<(), ParamError> {
    let (ok, reason) = match entry.range {
        Range::Positive => (value > 0.0, "must be positive"),
        Range::NonNegative => (value >= 0.0, "must be non-negative"),
        Range::AtLeastOne => (value >= 1.0, "must be at least 1"),
    };
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::OutOfRange {
            key: entry.key.to_string(),
            value,
            reason,
        })
    }
}

/// Electron thermal velocity √(k_B T/m) in μm/ns.
pub fn thermal_velocity(temperature: f64, m_eff: f64) -> Result<f64, ParamError> {
    if !(temperature > 0.0) || !(m_eff > 0.0) {
        return Err(ParamError::Domain(format!(
            "thermal velocity needs T > 0 and m_eff > 0 (got T = {temperature}, m_eff = {m_eff})"
        )));
    }
    let metres_per_second =
        (BOLTZMANN_J_PER_K * temperature / (m_eff * ELECTRON_MASS_KG)).sqrt();
    Ok(metres_per_second * 1e-3)
}

/// Parse a flat key = value document into parameters, starting from defaults.
pub fn load_parameters(source: &str) -> Result<PhysicalParameters, ParamError> {
    let table: toml::Table = source
        .parse()
        .map_err(|e: toml::de::Error| ParamError::Malformed(e.message().to_string()))?;
    load_parameters_from_table(&table)
}

/// Apply overrides from an already-parsed table.
pub fn load_parameters_from_table(table: &toml::Table) -> Result<PhysicalParameters, ParamError> {
    let mut params = PhysicalParameters::default();
    for (key, value) in table {
        let entry = ENTRIES
            .iter()
            .find(|e| e.key == key.as_str())
            .ok_or_else(|| ParamError::UnknownKey(key.clone()))?;
        let number = match value {
            toml::Value::Float(f) => *f,
            toml::Value::Integer(i) => *i as f64,
            toml::Value::String(s) => parse_tagged(entry, s)?,
            other => {
                return Err(ParamError::Malformed(format!(
                    "`{key}` must be a number, got {}",
                    other.type_str()
                )))
            }
        };
        check_range(entry, number)?;
        (entry.set)(&mut params, number);
    }
    Ok(params)
}

// "<number> <unit>": the unit must be the registry's own; no conversions.
fn parse_tagged(entry: &Entry, text: &str) -> Result<f64, ParamError> {
    let mut parts = text.split_whitespace();
    let number = parts
        .next()
        .and_then(|n| n.parse::<f64>().ok())
        .ok_or_else(|| ParamError::Malformed(format!("`{}` = \"{text}\"", entry.key)))?;
    let unit: String = parts.collect::<Vec<_>>().join(" ");
    if !unit.is_empty() && unit != entry.unit.symbol() {
        return Err(ParamError::UnitMismatch {
            key: entry.key.to_string(),
            expected: entry.unit.symbol(),
            found: unit,
        });
    }
    Ok(number)
}
