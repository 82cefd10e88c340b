use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::pulse::{Pulse, PulseKind};
use super::ProtocolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Checkpoint {
    InitDone,
    NuclearPrepDone,
    /// The transport electron leaves its donor.
    ElectronReleased,
    TransportDone,
    CaptureDone,
    LastElectronOp,
    EntangleGateStart,
    EntangleGateDone,
}

impl Checkpoint {
    pub const ALL: [Checkpoint; 8] = [
        Checkpoint::InitDone,
        Checkpoint::NuclearPrepDone,
        Checkpoint::ElectronReleased,
        Checkpoint::TransportDone,
        Checkpoint::CaptureDone,
        Checkpoint::LastElectronOp,
        Checkpoint::EntangleGateStart,
        Checkpoint::EntangleGateDone,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Checkpoint::InitDone => "init_done",
            Checkpoint::NuclearPrepDone => "nuclear_prep_done",
            Checkpoint::ElectronReleased => "electron_released",
            Checkpoint::TransportDone => "transport_done",
            Checkpoint::CaptureDone => "capture_done",
            Checkpoint::LastElectronOp => "last_electron_op",
            Checkpoint::EntangleGateStart => "entangle_gate_start",
            Checkpoint::EntangleGateDone => "entangle_gate_done",
        }
    }
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Checkpoint {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Checkpoint::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| ProtocolError::Malformed(format!("unknown checkpoint `{s}`")))
    }
}

/// A ceiling on the time between two checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub name: String,
    pub from: Checkpoint,
    pub to: Checkpoint,
    /// ns
    pub limit: f64,
}

impl Budget {
    pub fn new(name: &str, from: Checkpoint, to: Checkpoint, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            from,
            to,
            limit,
        }
    }

    pub fn nuclear_window() -> Self {
        Self::new("nuclear_window", Checkpoint::NuclearPrepDone, Checkpoint::LastElectronOp, 1000.0)
    }

    pub fn transport_capture() -> Self {
        Self::new("transport_capture", Checkpoint::ElectronReleased, Checkpoint::CaptureDone, 180.0)
    }

    pub fn transport() -> Self {
        Self::new("transport", Checkpoint::ElectronReleased, Checkpoint::TransportDone, 80.0)
    }

    pub fn capture() -> Self {
        Self::new("capture", Checkpoint::TransportDone, Checkpoint::CaptureDone, 100.0)
    }

    pub fn post_init() -> Self {
        Self::new("post_init", Checkpoint::InitDone, Checkpoint::LastElectronOp, 500.0)
    }

    pub fn entanglement_gate() -> Self {
        Self::new("entanglement_gate", Checkpoint::EntangleGateStart, Checkpoint::EntangleGateDone, 220.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledPulse {
    /// ns
    pub start: f64,
    pub pulse: Pulse,
}

impl ScheduledPulse {
    pub fn end(&self) -> f64 {
        self.start + self.pulse.duration
    }
}

/// Pulses with absolute start times, named checkpoints and the budgets the
/// schedule must respect.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timeline {
    pub name: String,
    pub pulses: Vec<ScheduledPulse>,
    pub checkpoints: Vec<(Checkpoint, f64)>,
    pub budgets: Vec<Budget>,
    /// Lets optical and microwave pulses in one cluster overlap.
    pub concurrent_channels: bool,
}

impl Timeline {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, start: f64, pulse: Pulse) -> f64 {
        self.pulses.push(ScheduledPulse { start, pulse });
        start + pulse.duration
    }

    /// Sets or replaces a checkpoint.
    pub fn mark(&mut self, cp: Checkpoint, t: f64) {
        match self.checkpoints.iter_mut().find(|(c, _)| *c == cp) {
            Some(entry) => entry.1 = t,
            None => self.checkpoints.push((cp, t)),
        }
    }

    pub fn checkpoint(&self, cp: Checkpoint) -> Option<f64> {
        self.checkpoints.iter().find(|(c, _)| *c == cp).map(|&(_, t)| t)
    }

    /// Elapsed time between two checkpoints, when both are set.
    pub fn span(&self, from: Checkpoint, to: Checkpoint) -> Option<f64> {
        Some(self.checkpoint(to)? - self.checkpoint(from)?)
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().map(ScheduledPulse::end).fold(0.0, f64::max)
    }

    /// Pulses ordered by start time; ties keep insertion order.
    pub fn sorted(&self) -> Vec<ScheduledPulse> {
        let mut v = self.pulses.clone();
        v.sort_by(|a, b| a.start.total_cmp(&b.start));
        v
    }

    /// One line per entry:
    /// `pulse <start> <duration> <kind> <target> <label>`,
    /// `checkpoint <name> <t>`, `budget <name> <from> <to> <limit>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "timeline {}", self.name);
        if self.concurrent_channels {
            let _ = writeln!(out, "concurrent_channels true");
        }
        for p in &self.pulses {
            let _ = writeln!(
                out,
                "pulse {} {} {} {} {}",
                p.start, p.pulse.duration, p.pulse.kind, p.pulse.target, p.pulse.label
            );
        }
        for (c, t) in &self.checkpoints {
            let _ = writeln!(out, "checkpoint {c} {t}");
        }
        for b in &self.budgets {
            let _ = writeln!(out, "budget {} {} {} {}", b.name, b.from, b.to, b.limit);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ProtocolError> {
        let bad = |n: usize, m: &str| ProtocolError::Malformed(format!("line {n}: {m}"));
        let num = |n: usize, s: &str| -> Result<f64, ProtocolError> {
            s.parse::<f64>().map_err(|_| bad(n, &format!("bad number `{s}`")))
        };
        let mut tl: Option<Timeline> = None;
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] == "timeline" {
                if tl.is_some() || fields.len() != 2 {
                    return Err(bad(n, "expected a single `timeline <name>` header"));
                }
                tl = Some(Timeline::new(fields[1]));
                continue;
            }
            let t = tl.as_mut().ok_or_else(|| bad(n, "entry before `timeline` header"))?;
            match (fields[0], fields.len()) {
                ("concurrent_channels", 2) => {
                    t.concurrent_channels = fields[1]
                        .parse()
                        .map_err(|_| bad(n, "expected true or false"))?;
                }
                ("pulse", 6) => {
                    let start = num(n, fields[1])?;
                    let pulse = Pulse::new(
                        fields[3].parse::<PulseKind>()?,
                        num(n, fields[2])?,
                        fields[4].parse()?,
                        fields[5].parse()?,
                    )?;
                    t.push(start, pulse);
                }
                ("checkpoint", 3) => {
                    let cp: Checkpoint = fields[1].parse()?;
                    t.mark(cp, num(n, fields[2])?);
                }
                ("budget", 5) => {
                    t.budgets.push(Budget::new(
                        fields[1],
                        fields[2].parse()?,
                        fields[3].parse()?,
                        num(n, fields[4])?,
                    ));
                }
                _ => return Err(bad(n, &format!("unrecognized entry `{line}`"))),
            }
        }
        tl.ok_or_else(|| ProtocolError::Malformed("missing `timeline` header".into()))
    }

    /// Gantt-style CSV, one row per pulse in start order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TIMELINE_CSV_HEADER);
        out.push('\n');
        for p in self.sorted() {
            let channel = match p.pulse.kind.channel() {
                Some(super::pulse::Channel::Optical) => "optical",
                Some(super::pulse::Channel::Microwave) => "microwave",
                None => "none",
            };
            let energy = p.pulse.kind.energy_ev().map(|e| e.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                p.start,
                p.end(),
                p.pulse.duration,
                p.pulse.kind.name(),
                energy,
                channel,
                p.pulse.target,
                p.pulse.label
            );
        }
        out
    }
}

pub const TIMELINE_CSV_HEADER: &str = "start_ns,end_ns,duration_ns,kind,energy_ev,channel,target,label";
