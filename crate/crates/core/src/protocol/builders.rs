//! Built-in pulse sequences.

use super::pulse::{gate_duration_ns, Cluster, Label, Pulse, PulseKind, Site, Target, WaitPurpose};
use super::timeline::{Budget, Checkpoint, Timeline};
use super::ProtocolError;
use crate::spin::{separated_nv_hamiltonian, phase_averaged_coherence, DephasingEstimate, C64};

/// Step durations in ns.
#[derive(Debug, Clone, PartialEq)]
pub struct Durations {
    pub green_init: f64,
    /// Green re-polarization inside the 500 ns re-initialization block.
    pub green_reinit: f64,
    /// Green re-polarization that leaves the donor ionized (detection).
    pub green_repolarize: f64,
    pub green_readout: f64,
    pub red_recharge: f64,
    /// Recapture wait after the first ensemble ionization.
    pub recharge_wait: f64,
    /// Recapture wait inside the re-initialization block.
    pub reinit_recharge_wait: f64,
    pub red_ionize: f64,
    pub blue_ionize: f64,
    pub microwave_pulse: f64,
}

impl Default for Durations {
    fn default() -> Self {
        Self {
            green_init: 500.0,
            green_reinit: 300.0,
            green_repolarize: 400.0,
            green_readout: 500.0,
            red_recharge: 100.0,
            recharge_wait: 1800.0,
            reinit_recharge_wait: 100.0,
            red_ionize: 1.0,
            blue_ionize: 1.0,
            microwave_pulse: 10.0,
        }
    }
}

/// Lowest NV–N_S coupling the builders accept by default.
pub const MIN_COUPLING_MHZ: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReinitMode {
    /// Green re-polarization then a second ensemble recharge.
    Optical,
    /// Projective NV re-initialization through the prepared nucleus.
    Projective,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectNvOptions {
    pub alpha: C64,
    pub beta: C64,
    pub microwave_count: usize,
    pub d_ghz: f64,
    pub b_gauss: f64,
    pub durations: Durations,
}

impl Default for InjectNvOptions {
    fn default() -> Self {
        Self {
            alpha: C64::new(1.0, 0.0),
            beta: C64::new(0.0, 0.0),
            microwave_count: 2,
            d_ghz: 2.87,
            b_gauss: 0.0,
            durations: Durations::default(),
        }
    }
}

/// Whether the blue ionization outruns the NV zero-field dephasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NvInjectionCheck {
    pub estimate: DephasingEstimate,
    pub blue_duration: f64,
    /// Phase-averaged coherence for an ionization rate 1/blue_duration.
    pub coherence: f64,
    pub coherent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairOptions {
    pub coupling_mhz: f64,
    pub min_coupling_mhz: f64,
    pub reinit: ReinitMode,
    pub durations: Durations,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            coupling_mhz: 10.0,
            min_coupling_mhz: MIN_COUPLING_MHZ,
            reinit: ReinitMode::Optical,
            durations: Durations::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectOptions {
    pub transport_ns: f64,
    pub capture_ns: f64,
    pub coupling_mhz: f64,
    pub min_coupling_mhz: f64,
    pub durations: Durations,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            transport_ns: 80.0,
            capture_ns: 100.0,
            coupling_mhz: 10.0,
            min_coupling_mhz: MIN_COUPLING_MHZ,
            durations: Durations::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntangleOptions {
    pub coupling_nv_ns_mhz: f64,
    pub coupling_nv_logic_mhz: f64,
    pub transport_ns: f64,
    pub capture_ns: f64,
    /// Replaces the coupling-derived entanglement gate length.
    pub gate_override_ns: Option<f64>,
    pub min_coupling_mhz: f64,
    pub durations: Durations,
}

impl Default for EntangleOptions {
    fn default() -> Self {
        Self {
            coupling_nv_ns_mhz: 10.0,
            coupling_nv_logic_mhz: 10.0,
            transport_ns: 80.0,
            capture_ns: 100.0,
            gate_override_ns: None,
            min_coupling_mhz: MIN_COUPLING_MHZ,
            durations: Durations::default(),
        }
    }
}

fn gate_time(coupling_mhz: f64, min_mhz: f64) -> Result<f64, ProtocolError> {
    if !(coupling_mhz > 0.0 && coupling_mhz.is_finite()) {
        return Err(ProtocolError::Domain(format!(
            "coupling must be positive, got {coupling_mhz} MHz"
        )));
    }
    if coupling_mhz < min_mhz {
        return Err(ProtocolError::GateTooSlow {
            coupling_mhz,
            min_mhz,
        });
    }
    Ok(gate_duration_ns(coupling_mhz))
}

fn non_negative(name: &str, v: f64) -> Result<f64, ProtocolError> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(ProtocolError::Domain(format!("{name} must be non-negative, got {v}")));
    }
    Ok(v)
}

fn at(site: Site, cluster: Cluster) -> Target {
    Target::new(site, cluster)
}

enum InitTail {
    Reinit(ReinitMode),
    /// Re-polarize and leave the donor ionized, ready to capture.
    Repolarize,
}

struct InitMarks {
    nuclear_prep_done: f64,
    init_done: f64,
}

/// NV polarization, donor recharge, nuclear preparation and the
/// re-initialization tail, starting at `t0`.
fn init_block(
    tl: &mut Timeline,
    cluster: Cluster,
    t0: f64,
    prep_ns: f64,
    d: &Durations,
    tail: InitTail,
) -> Result<InitMarks, ProtocolError> {
    let nv = at(Site::Nv, cluster);
    let mut t = tl.push(t0, Pulse::new(PulseKind::green(), d.green_init, nv, Label::Init)?);
    t = tl.push(t, Pulse::new(PulseKind::red(), d.red_recharge, at(Site::Ensemble, cluster), Label::Init)?);
    t = tl.push(
        t,
        Pulse::new(PulseKind::Wait, d.recharge_wait, at(Site::Donor, cluster), Label::Wait(WaitPurpose::Recharge))?,
    );
    t = tl.push(t, Pulse::new(PulseKind::Microwave, prep_ns, at(Site::Donor, cluster), Label::NuclearPrep)?);
    let nuclear_prep_done = t;
    match tail {
        InitTail::Reinit(ReinitMode::Optical) => {
            t = tl.push(t, Pulse::new(PulseKind::green(), d.green_reinit, nv, Label::Init)?);
            t = tl.push(t, Pulse::new(PulseKind::red(), d.red_recharge, at(Site::Ensemble, cluster), Label::Init)?);
            t = tl.push(
                t,
                Pulse::new(
                    PulseKind::Wait,
                    d.reinit_recharge_wait,
                    at(Site::Donor, cluster),
                    Label::Wait(WaitPurpose::Recharge),
                )?,
            );
        }
        InitTail::Reinit(ReinitMode::Projective) => {
            t = tl.push(t, Pulse::new(PulseKind::Microwave, prep_ns, nv, Label::Init)?);
        }
        InitTail::Repolarize => {
            t = tl.push(t, Pulse::new(PulseKind::green(), d.green_repolarize, nv, Label::Init)?);
        }
    }
    Ok(InitMarks {
        nuclear_prep_done,
        init_done: t,
    })
}

/// Spin injection straight from the NV: polarize, rotate with
/// `microwave_count` pulses, then ionize with blue light.
pub fn inject_nv(opts: &InjectNvOptions) -> Result<(Timeline, NvInjectionCheck), ProtocolError> {
    let d = &opts.durations;
    let (_, estimate) = separated_nv_hamiltonian(opts.alpha, opts.beta, opts.d_ghz, opts.b_gauss)?;
    let nv = at(Site::Nv, Cluster::A);
    let mut tl = Timeline::new("inject-nv");
    let mut t = tl.push(0.0, Pulse::new(PulseKind::green(), d.green_init, nv, Label::Init)?);
    tl.mark(Checkpoint::InitDone, t);
    for _ in 0..opts.microwave_count {
        t = tl.push(t, Pulse::new(PulseKind::Microwave, d.microwave_pulse, nv, Label::Gate)?);
    }
    t = tl.push(t, Pulse::new(PulseKind::blue(), d.blue_ionize, nv, Label::Ionize)?);
    tl.mark(Checkpoint::ElectronReleased, t);
    tl.mark(Checkpoint::LastElectronOp, t);

    let coherence = phase_averaged_coherence(1.0 / estimate.timescale, 1.0 / d.blue_ionize);
    let coherent = estimate.coherence_factor == 1.0 || d.blue_ionize <= 0.1 * estimate.timescale;
    Ok((
        tl,
        NvInjectionCheck {
            estimate,
            blue_duration: d.blue_ionize,
            coherence,
            coherent,
        },
    ))
}

/// Spin injection through an NV–¹⁴N_S pair.
pub fn inject_pair(opts: &PairOptions) -> Result<Timeline, ProtocolError> {
    let d = &opts.durations;
    let gate = gate_time(opts.coupling_mhz, opts.min_coupling_mhz)?;
    let mut tl = Timeline::new("inject-pair");
    let marks = init_block(&mut tl, Cluster::A, 0.0, gate, d, InitTail::Reinit(opts.reinit))?;
    tl.mark(Checkpoint::NuclearPrepDone, marks.nuclear_prep_done);
    tl.mark(Checkpoint::InitDone, marks.init_done);
    let donor = at(Site::Donor, Cluster::A);
    let mut t = tl.push(marks.init_done, Pulse::new(PulseKind::Microwave, gate, donor, Label::Gate)?);
    t = tl.push(t, Pulse::new(PulseKind::red(), d.red_ionize, donor, Label::Ionize)?);
    tl.mark(Checkpoint::ElectronReleased, t);
    tl.mark(Checkpoint::LastElectronOp, t);
    tl.budgets.push(Budget::nuclear_window());
    Ok(tl)
}

/// Remote detection: a prepared, ionized donor waits for a transported
/// electron, captures it and is read out through the NV.
pub fn detect(opts: &DetectOptions) -> Result<Timeline, ProtocolError> {
    let d = &opts.durations;
    let transport = non_negative("transport time", opts.transport_ns)?;
    let capture = non_negative("capture wait", opts.capture_ns)?;
    let gate = gate_time(opts.coupling_mhz, opts.min_coupling_mhz)?;
    let mut tl = Timeline::new("detect");
    let marks = init_block(&mut tl, Cluster::A, 0.0, gate, d, InitTail::Repolarize)?;
    tl.mark(Checkpoint::NuclearPrepDone, marks.nuclear_prep_done);
    tl.mark(Checkpoint::InitDone, marks.init_done);
    tl.mark(Checkpoint::ElectronReleased, marks.init_done);
    let t = transport_and_capture(&mut tl, Cluster::A, marks.init_done, transport, capture)?;
    let donor = at(Site::Donor, Cluster::A);
    let t = tl.push(t, Pulse::new(PulseKind::Microwave, gate, donor, Label::Gate)?);
    tl.mark(Checkpoint::LastElectronOp, t);
    tl.push(t, Pulse::new(PulseKind::green(), d.green_readout, at(Site::Nv, Cluster::A), Label::Readout)?);
    tl.budgets.extend([
        Budget::nuclear_window(),
        Budget::transport(),
        Budget::capture(),
        Budget::transport_capture(),
    ]);
    Ok(tl)
}

fn transport_and_capture(
    tl: &mut Timeline,
    cluster: Cluster,
    t0: f64,
    transport: f64,
    capture: f64,
) -> Result<f64, ProtocolError> {
    let donor = at(Site::Donor, cluster);
    let mut t = t0;
    if transport > 0.0 {
        t = tl.push(t, Pulse::new(PulseKind::Wait, transport, donor, Label::Wait(WaitPurpose::Transport))?);
    }
    tl.mark(Checkpoint::TransportDone, t);
    if capture > 0.0 {
        t = tl.push(t, Pulse::new(PulseKind::Wait, capture, donor, Label::Wait(WaitPurpose::Capture))?);
    }
    tl.mark(Checkpoint::CaptureDone, t);
    Ok(t)
}

/// Remote entanglement of logic qubits in clusters A and B through a
/// transported electron.
pub fn entangle(opts: &EntangleOptions) -> Result<Timeline, ProtocolError> {
    let d = &opts.durations;
    let transport = non_negative("transport time", opts.transport_ns)?;
    let capture = non_negative("capture wait", opts.capture_ns)?;
    let gate_ns = gate_time(opts.coupling_nv_ns_mhz, opts.min_coupling_mhz)?;
    let gate_logic = gate_time(opts.coupling_nv_logic_mhz, 0.0)?;
    let (first, second) = match opts.gate_override_ns {
        Some(g) if g > 0.0 && g.is_finite() => (g / 2.0, g / 2.0),
        Some(g) => return Err(ProtocolError::Domain(format!("gate override must be positive, got {g}"))),
        None => (gate_ns, gate_logic),
    };

    let mut tl = Timeline::new("entangle");
    let a = init_block(&mut tl, Cluster::A, 0.0, gate_ns, d, InitTail::Reinit(ReinitMode::Optical))?;
    let b = init_block(&mut tl, Cluster::B, 0.0, gate_ns, d, InitTail::Repolarize)?;
    tl.mark(Checkpoint::NuclearPrepDone, a.nuclear_prep_done.min(b.nuclear_prep_done));
    let init_done = a.init_done.max(b.init_done);
    tl.mark(Checkpoint::InitDone, init_done);

    tl.mark(Checkpoint::EntangleGateStart, init_done);
    let mut t = tl.push(init_done, Pulse::new(PulseKind::Microwave, first, at(Site::Donor, Cluster::A), Label::Gate)?);
    t = tl.push(t, Pulse::new(PulseKind::Microwave, second, at(Site::Logic, Cluster::A), Label::Gate)?);
    tl.mark(Checkpoint::EntangleGateDone, t);
    t = tl.push(t, Pulse::new(PulseKind::red(), d.red_ionize, at(Site::Donor, Cluster::A), Label::Ionize)?);
    tl.mark(Checkpoint::ElectronReleased, t);
    t = transport_and_capture(&mut tl, Cluster::B, t, transport, capture)?;
    t = tl.push(t, Pulse::new(PulseKind::Microwave, gate_ns, at(Site::Donor, Cluster::B), Label::Gate)?);
    tl.mark(Checkpoint::LastElectronOp, t);
    tl.push(t, Pulse::new(PulseKind::Microwave, gate_logic, at(Site::Logic, Cluster::B), Label::Gate)?);
    tl.budgets.extend([
        Budget::nuclear_window(),
        Budget::post_init(),
        Budget::entanglement_gate(),
        Budget::transport(),
        Budget::capture(),
        Budget::transport_capture(),
    ]);
    Ok(tl)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_window_accounting() {
        let tl = inject_pair(&PairOptions::default()).unwrap();
        assert_eq!(tl.checkpoint(Checkpoint::NuclearPrepDone), Some(2500.0));
        assert_eq!(tl.checkpoint(Checkpoint::InitDone), Some(3000.0));
        assert_eq!(tl.span(Checkpoint::NuclearPrepDone, Checkpoint::LastElectronOp), Some(601.0));

        let projective = inject_pair(&PairOptions {
            reinit: ReinitMode::Projective,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(projective.span(Checkpoint::NuclearPrepDone, Checkpoint::LastElectronOp), Some(201.0));
        assert!(!projective.pulses.iter().skip(4).any(|p| matches!(p.pulse.kind, PulseKind::Red { .. })
            && p.pulse.label == Label::Init));
    }

    #[test]
    fn slow_coupling_refused_unless_allowed() {
        let err = inject_pair(&PairOptions {
            coupling_mhz: 1.0,
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(err, ProtocolError::GateTooSlow { .. }));
        let tl = inject_pair(&PairOptions {
            coupling_mhz: 1.0,
            min_coupling_mhz: 0.0,
            ..Default::default()
        })
        .unwrap();
        assert!(tl.span(Checkpoint::NuclearPrepDone, Checkpoint::LastElectronOp).unwrap() > 1000.0);
    }

    #[test]
    fn detect_spans() {
        let tl = detect(&DetectOptions::default()).unwrap();
        assert_eq!(tl.span(Checkpoint::ElectronReleased, Checkpoint::CaptureDone), Some(180.0));
        assert_eq!(tl.span(Checkpoint::NuclearPrepDone, Checkpoint::LastElectronOp), Some(680.0));
        let zero = detect(&DetectOptions {
            transport_ns: 0.0,
            capture_ns: 0.0,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(zero.span(Checkpoint::ElectronReleased, Checkpoint::CaptureDone), Some(0.0));
        assert!(detect(&DetectOptions {
            transport_ns: -1.0,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn entangle_decomposition() {
        let tl = entangle(&EntangleOptions::default()).unwrap();
        assert_eq!(tl.span(Checkpoint::EntangleGateStart, Checkpoint::EntangleGateDone), Some(200.0));
        assert_eq!(tl.span(Checkpoint::InitDone, Checkpoint::LastElectronOp), Some(481.0));
        assert_eq!(tl.span(Checkpoint::NuclearPrepDone, Checkpoint::LastElectronOp), Some(981.0));
        let forced = entangle(&EntangleOptions {
            gate_override_ns: Some(300.0),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(forced.span(Checkpoint::EntangleGateStart, Checkpoint::EntangleGateDone), Some(300.0));
    }

    #[test]
    fn nv_injection_coherence_flag() {
        let (tl, check) = inject_nv(&InjectNvOptions::default()).unwrap();
        assert_eq!(tl.total_duration(), 521.0);
        assert!(!check.coherent);
        assert!((check.estimate.timescale - 1.0 / 2.87).abs() < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (_, balanced) = inject_nv(&InjectNvOptions {
            alpha: C64::new(h, 0.0),
            beta: C64::new(0.0, h),
            ..Default::default()
        })
        .unwrap();
        assert!(balanced.coherent);
        assert_eq!(balanced.coherence, 1.0);

        let mut fast = InjectNvOptions::default();
        fast.durations.blue_ionize = 0.01;
        let (_, fast) = inject_nv(&fast).unwrap();
        assert!(fast.coherent);
        assert!(fast.coherence > 0.99);
    }
}
