//! Run configuration: `[parameters]`, `[scenario.*]` and `[output]`
//! sections of a TOML document.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::params::{load_parameters_from_table, PhysicalParameters};

use super::CliError;

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "SPINBUS_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "spinbus-out";
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.toml";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Overrides of the physical-parameter registry.
    pub parameters: toml::Table,
    pub scenario: Scenario,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub fidelity_curve: FidelityCurveScenario,
    pub transport: TransportScenario,
    pub feasibility: FeasibilityScenario,
    pub protocol: ProtocolScenario,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FidelityCurveScenario {
    /// Bundled table when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ion_table: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_table: Option<PathBuf>,
    /// Common table range when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    pub step_nm: f64,
}

impl Default for FidelityCurveScenario {
    fn default() -> Self {
        Self {
            ion_table: None,
            opt_table: None,
            lambda_min: None,
            lambda_max: None,
            step_nm: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    HalfSpace,
    Nanowire,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    Bound,
    Point,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransportScenario {
    pub geometry: GeometryKind,
    /// V/μm
    pub field: f64,
    /// ns
    pub t_end: f64,
    pub samples: usize,
    pub initial: InitialKind,
    /// Gaussian width, μm.
    pub width: f64,
    pub coulomb: bool,
    pub capture: bool,
    /// Photoionization rate of the injector, 1/ns; zero leaves it bound.
    pub injection_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Half-space: injector depth, box depth and lateral half-width, μm.
    pub x_injector: f64,
    pub x_max: f64,
    pub half_width: f64,
    pub cells: [usize; 3],
    /// Nanowire: width l and length L, μm.
    pub wire_width: f64,
    pub wire_length: f64,
    pub wire_cells: [usize; 2],
}

impl Default for TransportScenario {
    fn default() -> Self {
        Self {
            geometry: GeometryKind::HalfSpace,
            field: 0.0005,
            t_end: 5.0,
            samples: 11,
            initial: InitialKind::Gaussian,
            width: 4.0,
            coulomb: false,
            capture: false,
            injection_rate: 0.0,
            dt: None,
            x_injector: 18.0,
            x_max: 90.0,
            half_width: 45.0,
            cells: [32, 32, 32],
            wire_width: 0.2,
            wire_length: 2.0,
            wire_cells: [2, 100],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeasibilityScenario {
    /// Wire widths, μm.
    pub widths: Vec<f64>,
    /// Log-spaced field scan, V/μm.
    pub e_min: f64,
    pub e_max: f64,
    pub e_count: usize,
    /// μm⁻³
    pub rho_min: f64,
}

impl Default for FeasibilityScenario {
    fn default() -> Self {
        Self {
            widths: (1..=20).map(|k| k as f64 / 20.0).collect(),
            e_min: 1e-3,
            e_max: 10.0,
            e_count: 121,
            rho_min: 50.0,
        }
    }
}

impl FeasibilityScenario {
    pub fn fields(&self) -> Result<Vec<f64>, CliError> {
        if !(self.e_min > 0.0 && self.e_max >= self.e_min && self.e_max.is_finite()) || self.e_count == 0 {
            return Err(CliError::Input(format!(
                "field range must satisfy 0 < e_min <= e_max with e_count >= 1 (got {}..{} x {})",
                self.e_min, self.e_max, self.e_count
            )));
        }
        if self.e_count == 1 {
            return Ok(vec![self.e_min]);
        }
        let (a, b) = (self.e_min.ln(), self.e_max.ln());
        let n = (self.e_count - 1) as f64;
        Ok((0..self.e_count).map(|k| (a + (b - a) * k as f64 / n).exp()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReinitKind {
    Optical,
    Projective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolScenario {
    pub alpha: f64,
    pub beta: f64,
    pub microwave_count: usize,
    pub blue_ns: f64,
    pub b_gauss: f64,
    pub coupling_mhz: f64,
    pub coupling_nv_logic_mhz: f64,
    pub min_coupling_mhz: f64,
    pub reinit: ReinitKind,
    pub transport_ns: f64,
    pub capture_ns: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate_ns: Option<f64>,
    /// Fidelity inputs.
    pub injection_fidelity: f64,
    pub ionization_coherence: f64,
    /// Donor density that sets the capture rate, μm⁻³.
    pub capture_density: f64,
    pub flip_rate_mhz: f64,
}

impl Default for ProtocolScenario {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            microwave_count: 2,
            blue_ns: 1.0,
            b_gauss: 0.0,
            coupling_mhz: 10.0,
            coupling_nv_logic_mhz: 10.0,
            min_coupling_mhz: crate::protocol::MIN_COUPLING_MHZ,
            reinit: ReinitKind::Optical,
            transport_ns: 80.0,
            capture_ns: 100.0,
            gate_ns: None,
            injection_fidelity: 1.0,
            ionization_coherence: 1.0,
            capture_density: 50.0,
            flip_rate_mhz: 0.0,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("config: {}", e.message())))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Registry defaults overridden by `[parameters]` and then by `--set`
    /// pairs.
    pub fn resolve_parameters(&mut self, sets: &[(String, f64)]) -> Result<PhysicalParameters, CliError> {
        let mut params = load_parameters_from_table(&self.parameters).map_err(|e| CliError::Input(e.to_string()))?;
        for (k, v) in sets {
            params.set(k, *v).map_err(|e| CliError::Input(e.to_string()))?;
        }
        self.parameters = params
            .to_config_string()
            .parse::<toml::Table>()
            .map_err(|e| CliError::Input(e.to_string()))?;
        Ok(params)
    }

    /// Flag, then environment, then config, then the default.
    pub fn resolve_output_dir(&mut self, flag: Option<PathBuf>) -> PathBuf {
        let dir = flag
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .or_else(|| self.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        self.output.dir = Some(dir.clone());
        dir
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}
