use std::fmt;
use std::path::Path;

use super::PhotoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Ionization,
    OpticalAbsorption,
}

impl TableKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "ionization" => Some(Self::Ionization),
            "optical-absorption" => Some(Self::OpticalAbsorption),
            _ => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Self::Ionization => "ionization",
            Self::OpticalAbsorption => "optical-absorption",
        }
    }
}

/// Absolute tables are in Å². Relative tables carry the name of the
/// normalization they share with their partner table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitsFlag {
    Absolute,
    Relative { normalization: String },
}

/// Wavelength-sampled cross-section with linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionTable {
    kind: TableKind,
    units: UnitsFlag,
    samples: Vec<(f64, f64)>,
}

const BUNDLED_IONIZATION: &str = include_str!("../../data/sigma_ion.txt");
const BUNDLED_ABSORPTION: &str = include_str!("../../data/sigma_opt.txt");

impl CrossSectionTable {
    pub fn new(kind: TableKind, units: UnitsFlag, samples: Vec<(f64, f64)>) -> Result<Self, PhotoError> {
        if samples.len() < 2 {
            return Err(PhotoError::Table("need at least two samples".into()));
        }
        for (k, &(w, s)) in samples.iter().enumerate() {
            if !w.is_finite() || !s.is_finite() {
                return Err(PhotoError::Table(format!("non-finite sample at row {k}")));
            }
            if s < 0.0 {
                return Err(PhotoError::Table(format!("negative cross-section {s} at {w} nm")));
            }
            if k > 0 && w <= samples[k - 1].0 {
                return Err(PhotoError::Table(format!(
                    "wavelengths must be strictly increasing ({} then {w})",
                    samples[k - 1].0
                )));
            }
        }
        Ok(Self { kind, units, samples })
    }

    /// Parse the plain-text format: `#` comments, one header line of
    /// `key=value` pairs (`kind`, `units`, optional `normalization`), then
    /// whitespace-separated `wavelength_nm sigma` rows.
    pub fn parse(text: &str) -> Result<Self, PhotoError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| PhotoError::Table("empty table".into()))?;
        let (mut kind, mut units, mut normalization) = (None, None, None);
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| PhotoError::Table(format!("bad header field `{field}`")))?;
            match key {
                "kind" => {
                    kind = Some(
                        TableKind::parse(value)
                            .ok_or_else(|| PhotoError::Table(format!("unknown kind `{value}`")))?,
                    )
                }
                "units" => units = Some(value.to_string()),
                "normalization" => normalization = Some(value.to_string()),
                other => return Err(PhotoError::Table(format!("unknown header key `{other}`"))),
            }
        }
        let kind = kind.ok_or_else(|| PhotoError::Table("header lacks `kind`".into()))?;
        let units = match (units.as_deref(), normalization) {
            (Some("absolute"), None) => UnitsFlag::Absolute,
            (Some("absolute"), Some(_)) => {
                return Err(PhotoError::Table("absolute tables take no normalization".into()))
            }
            (Some("relative"), Some(normalization)) => UnitsFlag::Relative { normalization },
            (Some("relative"), None) => {
                return Err(PhotoError::Table("relative tables must declare `normalization`".into()))
            }
            (Some(other), _) => return Err(PhotoError::Table(format!("unknown units `{other}`"))),
            (None, _) => return Err(PhotoError::Table("header lacks `units`".into())),
        };
        let mut samples = Vec::new();
        for (n, line) in lines {
            let cols: Vec<&str> = line.split_whitespace().collect();
            let [w, s] = cols[..] else {
                return Err(PhotoError::Table(format!("line {n}: expected two columns")));
            };
            let parse = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| PhotoError::Table(format!("line {n}: bad number `{v}`")))
            };
            samples.push((parse(w)?, parse(s)?));
        }
        Self::new(kind, units, samples)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PhotoError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PhotoError::Table(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Bundled NV⁻ photoionization shape.
    pub fn bundled_ionization() -> Self {
        Self::parse(BUNDLED_IONIZATION).expect("bundled table is well-formed")
    }

    /// Bundled NV⁻ optical-absorption shape.
    pub fn bundled_absorption() -> Self {
        Self::parse(BUNDLED_ABSORPTION).expect("bundled table is well-formed")
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn units(&self) -> &UnitsFlag {
        &self.units
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn range(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    pub fn interpolate(&self, lambda: f64) -> Result<f64, PhotoError> {
        let (lo, hi) = self.range();
        if !(lambda >= lo && lambda <= hi) {
            return Err(PhotoError::OutOfRange { lambda, lo, hi });
        }
        let k = self.samples.partition_point(|&(w, _)| w <= lambda);
        if k == self.samples.len() {
            return Ok(self.samples[k - 1].1);
        }
        let (w0, s0) = self.samples[k - 1];
        let (w1, s1) = self.samples[k];
        Ok(s0 + (s1 - s0) * (lambda - w0) / (w1 - w0))
    }

    /// Multiply every σ by a positive factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            kind: self.kind,
            units: self.units.clone(),
            samples: self.samples.iter().map(|&(w, s)| (w, s * factor)).collect(),
        }
    }
}

impl fmt::Display for CrossSectionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kind={}", self.kind.as_str())?;
        match &self.units {
            UnitsFlag::Absolute => writeln!(f, " units=absolute")?,
            UnitsFlag::Relative { normalization } => {
                writeln!(f, " units=relative normalization={normalization}")?
            }
        }
        for (w, s) in &self.samples {
            writeln!(f, "{w} {s}")?;
        }
        Ok(())
    }
}

/// Probability that a photon absorbed at λ ionizes rather than excites:
/// σ_ion/(σ_ion + σ_opt).
pub fn injection_fidelity(
    ionization: &CrossSectionTable,
    absorption: &CrossSectionTable,
    lambda: f64,
) -> Result<f64, PhotoError> {
    match (&ionization.units, &absorption.units) {
        (UnitsFlag::Absolute, UnitsFlag::Absolute) => {}
        (UnitsFlag::Relative { normalization: a }, UnitsFlag::Relative { normalization: b })
            if a == b => {}
        _ => return Err(PhotoError::IncompatibleUnits),
    }
    let s_ion = ionization.interpolate(lambda)?;
    let s_opt = absorption.interpolate(lambda)?;
    let total = s_ion + s_opt;
    if total <= 0.0 {
        return Err(PhotoError::UndefinedFidelity(lambda));
    }
    Ok(s_ion / total)
}

/// Fidelity sampled on a uniform wavelength grid spanning the tables'
/// common range. Wavelengths where both cross-sections vanish are skipped.
pub fn fidelity_curve(
    ionization: &CrossSectionTable,
    absorption: &CrossSectionTable,
    step_nm: f64,
) -> Result<Vec<(f64, f64)>, PhotoError> {
    if !(step_nm > 0.0) {
        return Err(PhotoError::Domain(format!("wavelength step must be positive, got {step_nm}")));
    }
    let lo = ionization.range().0.max(absorption.range().0);
    let hi = ionization.range().1.min(absorption.range().1);
    if lo > hi {
        return Err(PhotoError::Domain("tables share no wavelength range".into()));
    }
    let n = ((hi - lo) / step_nm + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let lambda = lo + k as f64 * step_nm;
        match injection_fidelity(ionization, absorption, lambda) {
            Ok(f) => out.push((lambda, f)),
            Err(PhotoError::UndefinedFidelity(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
