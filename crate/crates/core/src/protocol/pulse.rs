use std::fmt;
use std::str::FromStr;

use super::ProtocolError;

/// Photon-energy bands (eV) of the three optical colors.
pub const RED_BAND: (f64, f64) = (1.7, 1.946);
pub const GREEN_BAND: (f64, f64) = (2.2, 2.45);
pub const BLUE_BAND: (f64, f64) = (2.8, 3.1);

pub const RED_DEFAULT_EV: f64 = 1.8;
pub const GREEN_DEFAULT_EV: f64 = 2.32;
pub const BLUE_DEFAULT_EV: f64 = 2.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseKind {
    Red { energy_ev: f64 },
    Green { energy_ev: f64 },
    Blue { energy_ev: f64 },
    Microwave,
    /// Free evolution; occupies no channel.
    Wait,
}

impl PulseKind {
    pub fn red() -> Self {
        PulseKind::Red { energy_ev: RED_DEFAULT_EV }
    }

    pub fn green() -> Self {
        PulseKind::Green { energy_ev: GREEN_DEFAULT_EV }
    }

    pub fn blue() -> Self {
        PulseKind::Blue { energy_ev: BLUE_DEFAULT_EV }
    }

    pub fn energy_ev(&self) -> Option<f64> {
        match *self {
            PulseKind::Red { energy_ev } | PulseKind::Green { energy_ev } | PulseKind::Blue { energy_ev } => {
                Some(energy_ev)
            }
            _ => None,
        }
    }

    pub fn band(&self) -> Option<(f64, f64)> {
        match self {
            PulseKind::Red { .. } => Some(RED_BAND),
            PulseKind::Green { .. } => Some(GREEN_BAND),
            PulseKind::Blue { .. } => Some(BLUE_BAND),
            _ => None,
        }
    }

    pub fn channel(&self) -> Option<Channel> {
        match self {
            PulseKind::Microwave => Some(Channel::Microwave),
            PulseKind::Wait => None,
            _ => Some(Channel::Optical),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PulseKind::Red { .. } => "red",
            PulseKind::Green { .. } => "green",
            PulseKind::Blue { .. } => "blue",
            PulseKind::Microwave => "microwave",
            PulseKind::Wait => "wait",
        }
    }

    /// Band check for optical pulses.
    pub fn check_band(&self) -> Result<(), ProtocolError> {
        if let (Some(e), Some((lo, hi))) = (self.energy_ev(), self.band()) {
            if !(e >= lo && e <= hi) {
                return Err(ProtocolError::Malformed(format!(
                    "{} pulse at {e} eV lies outside its {lo}-{hi} eV band",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for PulseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.energy_ev() {
            Some(e) => write!(f, "{}@{e}", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

impl FromStr for PulseKind {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, energy) = match s.split_once('@') {
            Some((n, e)) => (
                n,
                Some(
                    e.parse::<f64>()
                        .map_err(|_| ProtocolError::Malformed(format!("bad photon energy in `{s}`")))?,
                ),
            ),
            None => (s, None),
        };
        let kind = match (name, energy) {
            ("red", e) => PulseKind::Red { energy_ev: e.unwrap_or(RED_DEFAULT_EV) },
            ("green", e) => PulseKind::Green { energy_ev: e.unwrap_or(GREEN_DEFAULT_EV) },
            ("blue", e) => PulseKind::Blue { energy_ev: e.unwrap_or(BLUE_DEFAULT_EV) },
            ("microwave", None) => PulseKind::Microwave,
            ("wait", None) => PulseKind::Wait,
            _ => return Err(ProtocolError::Malformed(format!("unknown pulse kind `{s}`"))),
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Optical,
    Microwave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cluster {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Nv,
    /// The ¹⁴N_S donor that injects or captures the transport electron.
    Donor,
    /// Nearby N_S ensemble used to recharge the donor.
    Ensemble,
    Logic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Target {
    pub site: Site,
    pub cluster: Cluster,
}

impl Target {
    pub fn new(site: Site, cluster: Cluster) -> Self {
        Self { site, cluster }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let site = match self.site {
            Site::Nv => "nv",
            Site::Donor => "donor",
            Site::Ensemble => "ensemble",
            Site::Logic => "logic",
        };
        let cluster = match self.cluster {
            Cluster::A => "A",
            Cluster::B => "B",
        };
        write!(f, "{site}:{cluster}")
    }
}

impl FromStr for Target {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProtocolError::Malformed(format!("bad target `{s}`"));
        let (site, cluster) = s.split_once(':').ok_or_else(bad)?;
        let site = match site {
            "nv" => Site::Nv,
            "donor" => Site::Donor,
            "ensemble" => Site::Ensemble,
            "logic" => Site::Logic,
            _ => return Err(bad()),
        };
        let cluster = match cluster {
            "A" => Cluster::A,
            "B" => Cluster::B,
            _ => return Err(bad()),
        };
        Ok(Target { site, cluster })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaitPurpose {
    /// Electrons from the photoionized ensemble are recaptured by the donor.
    Recharge,
    Transport,
    Capture,
    Idle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Init,
    NuclearPrep,
    Gate,
    Ionize,
    Readout,
    Wait(WaitPurpose),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Init => "init",
            Label::NuclearPrep => "nuclear-prep",
            Label::Gate => "gate",
            Label::Ionize => "ionize",
            Label::Readout => "readout",
            Label::Wait(WaitPurpose::Recharge) => "wait:recharge",
            Label::Wait(WaitPurpose::Transport) => "wait:transport",
            Label::Wait(WaitPurpose::Capture) => "wait:capture",
            Label::Wait(WaitPurpose::Idle) => "wait",
        })
    }
}

impl FromStr for Label {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "init" => Label::Init,
            "nuclear-prep" => Label::NuclearPrep,
            "gate" => Label::Gate,
            "ionize" => Label::Ionize,
            "readout" => Label::Readout,
            "wait:recharge" => Label::Wait(WaitPurpose::Recharge),
            "wait:transport" => Label::Wait(WaitPurpose::Transport),
            "wait:capture" => Label::Wait(WaitPurpose::Capture),
            "wait" | "wait:idle" => Label::Wait(WaitPurpose::Idle),
            _ => return Err(ProtocolError::Malformed(format!("unknown label `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub kind: PulseKind,
    /// ns
    pub duration: f64,
    pub target: Target,
    pub label: Label,
}

impl Pulse {
    pub fn new(kind: PulseKind, duration: f64, target: Target, label: Label) -> Result<Self, ProtocolError> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(ProtocolError::Malformed(format!(
                "pulse duration must be positive, got {duration}"
            )));
        }
        kind.check_band()?;
        if matches!(kind, PulseKind::Wait) != matches!(label, Label::Wait(_)) {
            return Err(ProtocolError::Malformed(format!(
                "label `{label}` does not fit a {} entry",
                kind.name()
            )));
        }
        Ok(Self {
            kind,
            duration,
            target,
            label,
        })
    }
}

/// Two-qubit gate time for a dipolar coupling: 1000/coupling ns, so
/// 10 MHz gives 100 ns.
pub fn gate_duration_ns(coupling_mhz: f64) -> f64 {
    1000.0 / coupling_mhz
}
