use std::collections::HashMap;
use std::fmt::Write as _;

use super::builders::NvInjectionCheck;
use super::pulse::{Cluster, Label, PulseKind, Site};
use super::timeline::{Checkpoint, Timeline};
use super::ProtocolError;
use crate::photophysics::{selectivity_check, ChargeStateRules, Defect, Outcome};

const OVERLAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetCheck {
    pub name: String,
    pub limit: f64,
    pub used: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityBreakdown {
    /// Named factors in a fixed order.
    pub factors: Vec<(&'static str, f64)>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub timeline: String,
    pub total_duration: f64,
    pub budgets: Vec<BudgetCheck>,
    /// Selectivity and charge-sequencing problems.
    pub violations: Vec<String>,
    pub nv_injection: Option<NvInjectionCheck>,
    pub fidelity: Option<FidelityBreakdown>,
}

impl BudgetReport {
    /// All budgets met and no violations. An incoherent NV injection is
    /// reported but does not fail the verdict.
    pub fn verdict(&self) -> bool {
        self.violations.is_empty() && self.budgets.iter().all(|b| b.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "timeline: {}", self.timeline);
        let _ = writeln!(out, "total_duration_ns: {}", self.total_duration);
        for b in &self.budgets {
            let _ = writeln!(
                out,
                "budget {}: used {} ns of {} ns: {}",
                b.name,
                b.used,
                b.limit,
                if b.pass { "pass" } else { "FAIL" }
            );
        }
        for v in &self.violations {
            let _ = writeln!(out, "violation: {v}");
        }
        if let Some(c) = &self.nv_injection {
            let _ = writeln!(
                out,
                "nv_injection: {} (dephasing timescale {} ns, blue {} ns, coherence {})",
                if c.coherent { "coherent" } else { "incoherent" },
                c.estimate.timescale,
                c.blue_duration,
                c.coherence
            );
        }
        if let Some(f) = &self.fidelity {
            for (name, v) in &f.factors {
                let _ = writeln!(out, "fidelity.{name}: {v}");
            }
            let _ = writeln!(out, "fidelity.total: {}", f.total);
        }
        let _ = writeln!(out, "verdict: {}", if self.verdict() { "PASS" } else { "FAIL" });
        out
    }
}

/// A timeline that passed the structural checks, with its report.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedTimeline {
    timeline: Timeline,
    pub report: BudgetReport,
}

impl ValidatedTimeline {
    pub fn timeline(&self) -> &Timeline {
        &self.timeline
    }

    pub fn into_parts(self) -> (Timeline, BudgetReport) {
        (self.timeline, self.report)
    }
}

fn structural_checks(tl: &Timeline) -> Result<(), ProtocolError> {
    let bad = |m: String| Err(ProtocolError::Malformed(m));
    for p in &tl.pulses {
        if !(p.start >= 0.0 && p.start.is_finite()) {
            return bad(format!("pulse start {} is not a non-negative time", p.start));
        }
        if !(p.pulse.duration > 0.0 && p.pulse.duration.is_finite()) {
            return bad(format!("pulse duration {} is not positive", p.pulse.duration));
        }
        p.pulse.kind.check_band()?;
    }
    let mut by_channel: HashMap<(Cluster, u8), Vec<(f64, f64)>> = HashMap::new();
    for p in &tl.pulses {
        let Some(ch) = p.pulse.kind.channel() else { continue };
        let key = if tl.concurrent_channels { ch as u8 } else { 0 };
        by_channel.entry((p.pulse.target.cluster, key)).or_default().push((p.start, p.end()));
    }
    for ((cluster, _), mut spans) in by_channel {
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in spans.windows(2) {
            if w[1].0 < w[0].1 - OVERLAP_TOLERANCE {
                return bad(format!(
                    "pulses at {} ns and {} ns overlap on cluster {cluster:?}",
                    w[0].0, w[1].0
                ));
            }
        }
    }
    for (c, t) in &tl.checkpoints {
        if !t.is_finite() {
            return bad(format!("checkpoint {c} at non-finite time"));
        }
    }
    for b in &tl.budgets {
        for cp in [b.from, b.to] {
            if tl.checkpoint(cp).is_none() {
                return bad(format!("budget {} needs checkpoint {cp}", b.name));
            }
        }
        if !(b.limit >= 0.0) {
            return bad(format!("budget {} has limit {}", b.name, b.limit));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Charge {
    Neutral,
    Positive,
}

/// Walks the pulses in start order and checks each optical pulse against
/// the charge-state rules and the donor charge it finds.
fn sequencing_violations(tl: &Timeline, rules: &ChargeStateRules) -> Vec<String> {
    let mut out = Vec::new();
    let mut donor: HashMap<Cluster, Charge> = HashMap::new();
    let mut ensemble_ionized: HashMap<Cluster, bool> = HashMap::new();
    for p in tl.sorted() {
        let pulse = p.pulse;
        let c = pulse.target.cluster;
        let at = p.start;
        let charge = donor.entry(c).or_insert(Charge::Positive);
        if let Some(e) = pulse.kind.energy_ev() {
            let reports = match selectivity_check(e, &[Defect::NvMinus, Defect::NsNeutral], rules) {
                Ok(r) => r,
                Err(err) => {
                    out.push(format!("{} at {at} ns: {err}", pulse.kind));
                    continue;
                }
            };
            let nv = reports[0];
            let ns = reports[1];
            match pulse.kind {
                PulseKind::Red { .. } if nv.outcome != Outcome::Untouched => {
                    out.push(format!("{} at {at} ns disturbs NV- ({:?})", pulse.kind, nv.outcome));
                }
                PulseKind::Green { .. } if nv.outcome == Outcome::Ionizes => {
                    out.push(format!("{} at {at} ns ionizes NV-", pulse.kind));
                }
                PulseKind::Blue { .. } => {
                    if pulse.label != Label::Ionize || pulse.target.site != Site::Nv {
                        out.push(format!("{} at {at} ns ionizes NV- outside an NV ionize step", pulse.kind));
                    } else if !(nv.outcome == Outcome::Ionizes && nv.spin_conserving) {
                        out.push(format!("{} at {at} ns does not ionize NV- spin-conservingly", pulse.kind));
                    }
                }
                _ => {}
            }
            if pulse.label == Label::Ionize && pulse.target.site == Site::Donor {
                if *charge != Charge::Neutral {
                    out.push(format!("ionize at {at} ns finds the cluster {c:?} donor already ionized"));
                } else if !(ns.outcome == Outcome::Ionizes && ns.spin_conserving) {
                    out.push(format!("{} at {at} ns does not ionize N_S0 spin-conservingly", pulse.kind));
                }
            }
            if ns.outcome == Outcome::Ionizes {
                *charge = Charge::Positive;
                if pulse.target.site == Site::Ensemble {
                    ensemble_ionized.insert(c, true);
                }
            }
            continue;
        }
        match pulse.label {
            Label::Wait(super::pulse::WaitPurpose::Recharge) => {
                if ensemble_ionized.insert(c, false) == Some(true) {
                    *charge = Charge::Neutral;
                } else {
                    out.push(format!("recharge wait at {at} ns follows no ensemble ionization"));
                }
            }
            Label::Wait(super::pulse::WaitPurpose::Capture) => {
                if *charge == Charge::Positive {
                    *charge = Charge::Neutral;
                } else {
                    out.push(format!("capture wait at {at} ns: cluster {c:?} donor is already neutral"));
                }
            }
            _ if pulse.kind == PulseKind::Microwave && pulse.target.site == Site::Donor => {
                if *charge != Charge::Neutral {
                    out.push(format!("microwave {} at {at} ns addresses an ionized donor", pulse.label));
                }
            }
            _ => {}
        }
    }
    out
}

/// Structural errors (bands, overlaps, dangling checkpoints) are `Err`;
/// budget overruns and sequencing violations land in the report.
pub fn validate(timeline: &Timeline) -> Result<ValidatedTimeline, ProtocolError> {
    validate_with_rules(timeline, &ChargeStateRules::default())
}

pub fn validate_with_rules(
    timeline: &Timeline,
    rules: &ChargeStateRules,
) -> Result<ValidatedTimeline, ProtocolError> {
    structural_checks(timeline)?;
    let budgets = timeline
        .budgets
        .iter()
        .map(|b| {
            let used = timeline.span(b.from, b.to).unwrap_or(f64::NAN);
            BudgetCheck {
                name: b.name.clone(),
                limit: b.limit,
                used,
                pass: used <= b.limit + OVERLAP_TOLERANCE,
            }
        })
        .collect();
    let report = BudgetReport {
        timeline: timeline.name.clone(),
        total_duration: timeline.total_duration(),
        budgets,
        violations: sequencing_violations(timeline, rules),
        nv_injection: None,
        fidelity: None,
    };
    Ok(ValidatedTimeline {
        timeline: timeline.clone(),
        report,
    })
}

/// Per-factor inputs for the end-to-end fidelity. The defaults are ideal.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityInputs {
    pub injection_fidelity: f64,
    pub ionization_coherence: f64,
    pub nv_separation_coherence: f64,
    /// ns
    pub t2: f64,
    /// 1/ns
    pub capture_rate: f64,
    pub nuclear_flip_rate_mhz: f64,
}

impl Default for FidelityInputs {
    fn default() -> Self {
        Self {
            injection_fidelity: 1.0,
            ionization_coherence: 1.0,
            nv_separation_coherence: 1.0,
            t2: f64::INFINITY,
            capture_rate: f64::INFINITY,
            nuclear_flip_rate_mhz: 0.0,
        }
    }
}

/// Product of independent loss factors. Time spans come from the
/// timeline's checkpoints; missing spans count as zero.
pub fn end_to_end_fidelity(
    validated: &ValidatedTimeline,
    inputs: &FidelityInputs,
) -> Result<FidelityBreakdown, ProtocolError> {
    for (name, v) in [
        ("injection fidelity", inputs.injection_fidelity),
        ("ionization coherence", inputs.ionization_coherence),
        ("NV separation coherence", inputs.nv_separation_coherence),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(ProtocolError::Domain(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    if !(inputs.t2 > 0.0) || !(inputs.capture_rate > 0.0) || !(inputs.nuclear_flip_rate_mhz >= 0.0) {
        return Err(ProtocolError::Domain(
            "T2 and capture rate must be positive, flip rate non-negative".into(),
        ));
    }
    let tl = &validated.timeline;
    let transport = tl.span(Checkpoint::ElectronReleased, Checkpoint::TransportDone).unwrap_or(0.0);
    let capture_wait = tl.span(Checkpoint::TransportDone, Checkpoint::CaptureDone);
    let window = tl.span(Checkpoint::NuclearPrepDone, Checkpoint::LastElectronOp).unwrap_or(0.0);

    let conduction = (-(transport + capture_wait.unwrap_or(0.0)) / inputs.t2).exp();
    let capture = match capture_wait {
        Some(_) if inputs.capture_rate.is_infinite() => 1.0,
        Some(t) => 1.0 - (-inputs.capture_rate * t).exp(),
        None => 1.0,
    };
    let nuclear = (-inputs.nuclear_flip_rate_mhz * 1e-3 * window).exp();
    let factors = vec![
        ("injection", inputs.injection_fidelity),
        ("ionization", inputs.ionization_coherence),
        ("nv_separation", inputs.nv_separation_coherence),
        ("conduction", conduction),
        ("capture", capture),
        ("nuclear_window", nuclear),
    ];
    let total = factors.iter().map(|(_, v)| v).product();
    Ok(FidelityBreakdown { factors, total })
}

#[cfg(test)]
mod tests {
    use super::super::builders::*;
    use super::super::pulse::{Pulse, Target};
    use super::*;

    #[test]
    fn builtins_pass_cleanly() {
        for tl in [
            inject_pair(&PairOptions::default()).unwrap(),
            inject_pair(&PairOptions {
                reinit: ReinitMode::Projective,
                ..Default::default()
            })
            .unwrap(),
            detect(&DetectOptions::default()).unwrap(),
            entangle(&EntangleOptions::default()).unwrap(),
            inject_nv(&InjectNvOptions::default()).unwrap().0,
        ] {
            let v = validate(&tl).unwrap();
            assert!(v.report.violations.is_empty(), "{}: {:?}", tl.name, v.report.violations);
            assert!(v.report.verdict(), "{}", v.report.to_text());
        }
    }

    #[test]
    fn overlap_is_structural() {
        let mut tl = detect(&DetectOptions::default()).unwrap();
        let nv = Target::new(Site::Nv, Cluster::A);
        tl.push(10.0, Pulse::new(PulseKind::Microwave, 5.0, nv, Label::Gate).unwrap());
        assert!(matches!(validate(&tl), Err(ProtocolError::Malformed(_))));
        tl.concurrent_channels = true;
        assert!(validate(&tl).is_ok());
    }

    #[test]
    fn off_band_energy_is_structural() {
        let mut tl = inject_pair(&PairOptions::default()).unwrap();
        tl.pulses[0].pulse.kind = PulseKind::Green { energy_ev: 2.0 };
        assert!(matches!(validate(&tl), Err(ProtocolError::Malformed(_))));
    }

    #[test]
    fn red_at_band_edge_excites_nv() {
        let mut tl = inject_pair(&PairOptions::default()).unwrap();
        tl.pulses[1].pulse.kind = PulseKind::Red { energy_ev: 1.946 };
        let v = validate(&tl).unwrap();
        assert!(!v.report.verdict());
        assert!(v.report.violations[0].contains("disturbs NV-"));
    }

    #[test]
    fn missing_recharge_is_caught() {
        let mut tl = inject_pair(&PairOptions::default()).unwrap();
        tl.pulses.retain(|p| p.pulse.label != Label::Wait(super::super::pulse::WaitPurpose::Recharge));
        let v = validate(&tl).unwrap();
        assert!(v.report.violations.iter().any(|m| m.contains("ionized donor")));
    }

    #[test]
    fn fidelity_factors() {
        let v = validate(&detect(&DetectOptions::default()).unwrap()).unwrap();
        let ideal = end_to_end_fidelity(&v, &FidelityInputs::default()).unwrap();
        assert_eq!(ideal.total, 1.0);

        let f = end_to_end_fidelity(
            &v,
            &FidelityInputs {
                capture_rate: 1.0 / 60.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((f.total - (1.0 - (-100.0f64 / 60.0).exp())).abs() < 1e-12);
        assert!((f.total - 0.811).abs() < 1e-3);

        let no_wait = validate(
            &detect(&DetectOptions {
                capture_ns: 0.0,
                ..Default::default()
            })
            .unwrap(),
        )
        .unwrap();
        let g = end_to_end_fidelity(
            &no_wait,
            &FidelityInputs {
                t2: 180.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((g.total - (-80.0f64 / 180.0).exp()).abs() < 1e-12);
        assert!((g.total - 0.641).abs() < 1e-3);

        assert!(end_to_end_fidelity(
            &v,
            &FidelityInputs {
                injection_fidelity: 1.5,
                ..Default::default()
            }
        )
        .is_err());
    }
}
