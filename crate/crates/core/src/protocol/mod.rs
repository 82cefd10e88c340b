//! Pulse timelines for spin injection, remote detection and remote
//! entanglement, with budget validation and fidelity bookkeeping.

mod builders;
mod pulse;
mod timeline;
mod validate;

use thiserror::Error;

use crate::spin::SpinError;

pub use builders::{
    detect, entangle, inject_nv, inject_pair, DetectOptions, Durations, EntangleOptions, InjectNvOptions,
    NvInjectionCheck, PairOptions, ReinitMode, MIN_COUPLING_MHZ,
};
pub use pulse::{
    gate_duration_ns, Channel, Cluster, Label, Pulse, PulseKind, Site, Target, WaitPurpose, BLUE_BAND,
    BLUE_DEFAULT_EV, GREEN_BAND, GREEN_DEFAULT_EV, RED_BAND, RED_DEFAULT_EV,
};
pub use timeline::{Budget, Checkpoint, ScheduledPulse, Timeline, TIMELINE_CSV_HEADER};
pub use validate::{
    end_to_end_fidelity, validate, validate_with_rules, BudgetCheck, BudgetReport, FidelityBreakdown,
    FidelityInputs, ValidatedTimeline,
};

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error("malformed timeline: {0}")]
    Malformed(String),
    #[error("coupling {coupling_mhz} MHz is below the {min_mhz} MHz minimum; the gate would be too slow")]
    GateTooSlow { coupling_mhz: f64, min_mhz: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Spin(#[from] SpinError),
}
