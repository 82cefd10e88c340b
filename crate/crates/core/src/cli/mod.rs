//! Command-line front end. Exit codes: 0 pass, 1 physics-constraint
//! failure, 2 input error.

mod config;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::params::PhysicalParameters;
use crate::photophysics::{capture_rate, injection_fidelity, CrossSectionTable, PhotoError, TableKind};
use crate::protocol::{
    detect, end_to_end_fidelity, entangle, inject_nv, inject_pair, validate, DetectOptions, EntangleOptions,
    FidelityInputs, InjectNvOptions, NvInjectionCheck, PairOptions, ProtocolError, ReinitMode, Timeline,
};
use crate::spin::C64;
use crate::transport::{
    feasibility_region, write_grid_dump, write_trajectory_csv, DriftDiffusionSolver, InitialCondition,
    PulseProfile, SolverConfig, TransportDomain, TransportError,
};

pub use config::{
    FeasibilityScenario, FidelityCurveScenario, GeometryKind, InitialKind, OutputConfig, ProtocolScenario,
    ReinitKind, RunConfig, Scenario, TransportScenario, DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV,
    RESOLVED_CONFIG_FILE,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_PHYSICS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("constraint failed: {0}")]
    Physics(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Physics(_) => EXIT_PHYSICS,
        }
    }
}

impl From<PhotoError> for CliError {
    fn from(e: PhotoError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::Cfl { .. } | TransportError::NegativeDensity { .. } => CliError::Physics(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::GateTooSlow { .. } => CliError::Physics(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spinbus", version, about = "Electron-spin quantum bus modelling in diamond")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; beats the environment and the config.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Parameter override `key=value`, repeatable.
    #[arg(long = "set", global = true, value_parser = parse_key_value)]
    pub set: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v = v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Injection fidelity F(λ) from ionization and absorption tables.
    FidelityCurve(FidelityCurveArgs),
    /// Drift-diffusion run with grid snapshots and a trajectory CSV.
    Transport(TransportArgs),
    /// Capturer-density map over wire width and field, with boundaries.
    Feasibility(FeasibilityArgs),
    /// Build and validate a pulse protocol.
    #[command(subcommand)]
    Protocol(ProtocolCommand),
}

#[derive(Debug, Args)]
pub struct FidelityCurveArgs {
    #[arg(long)]
    pub ion_table: Option<PathBuf>,
    #[arg(long)]
    pub opt_table: Option<PathBuf>,
    #[arg(long)]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub step_nm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryKind>,
    #[arg(long)]
    pub field: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub initial: Option<InitialKind>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub coulomb: Option<bool>,
    #[arg(long)]
    pub capture: Option<bool>,
    #[arg(long)]
    pub injection_rate: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub x_injector: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub half_width: Option<f64>,
    /// nx,ny,nz
    #[arg(long, value_delimiter = ',')]
    pub cells: Option<Vec<usize>>,
    #[arg(long)]
    pub wire_width: Option<f64>,
    #[arg(long)]
    pub wire_length: Option<f64>,
    /// transverse,axial
    #[arg(long, value_delimiter = ',')]
    pub wire_cells: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct FeasibilityArgs {
    /// Comma-separated wire widths, μm.
    #[arg(long, value_delimiter = ',')]
    pub widths: Option<Vec<f64>>,
    #[arg(long)]
    pub e_min: Option<f64>,
    #[arg(long)]
    pub e_max: Option<f64>,
    #[arg(long)]
    pub e_count: Option<usize>,
    #[arg(long)]
    pub rho_min: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FidelityFlags {
    #[arg(long)]
    pub injection_fidelity: Option<f64>,
    #[arg(long)]
    pub ionization_coherence: Option<f64>,
    #[arg(long)]
    pub capture_density: Option<f64>,
    #[arg(long)]
    pub flip_rate_mhz: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum ProtocolCommand {
    /// Direct NV injection with a blue ionizing pulse.
    InjectNv {
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long)]
        microwave_count: Option<usize>,
        #[arg(long)]
        blue_ns: Option<f64>,
        #[arg(long)]
        b_gauss: Option<f64>,
        #[command(flatten)]
        fidelity: FidelityFlags,
    },
    /// Injection through an NV–N_S pair.
    InjectPair {
        #[arg(long)]
        coupling_mhz: Option<f64>,
        #[arg(long)]
        min_coupling_mhz: Option<f64>,
        #[arg(long, value_enum)]
        reinit: Option<ReinitKind>,
        #[command(flatten)]
        fidelity: FidelityFlags,
    },
    /// Remote capture and readout.
    Detect {
        #[arg(long)]
        transport_ns: Option<f64>,
        #[arg(long)]
        capture_ns: Option<f64>,
        #[arg(long)]
        coupling_mhz: Option<f64>,
        #[arg(long)]
        min_coupling_mhz: Option<f64>,
        #[command(flatten)]
        fidelity: FidelityFlags,
    },
    /// Remote entanglement of two logic qubits.
    Entangle {
        #[arg(long)]
        coupling_mhz: Option<f64>,
        #[arg(long)]
        coupling_nv_logic_mhz: Option<f64>,
        #[arg(long)]
        transport_ns: Option<f64>,
        #[arg(long)]
        capture_ns: Option<f64>,
        /// Force the entanglement gate length.
        #[arg(long)]
        gate_ns: Option<f64>,
        #[arg(long)]
        min_coupling_mhz: Option<f64>,
        #[command(flatten)]
        fidelity: FidelityFlags,
    },
    /// Validate a timeline from its text form.
    Check { timeline: PathBuf },
}

macro_rules! merge {
    ($dst:expr, $src:expr; $($field:ident),+) => {
        $( if let Some(v) = $src.$field.clone() { $dst.$field = v; } )+
    };
}

// Same, for flags already bound to local variables of the field's name.
macro_rules! merge_vars {
    ($dst:expr; $($field:ident),+) => {
        $( if let Some(v) = $field.clone() { $dst.$field = v; } )+
    };
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Human-readable output goes to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match execute(cli) {
        Ok((text, pass)) => {
            let _ = out.write_all(text.as_bytes());
            if pass {
                EXIT_PASS
            } else {
                EXIT_PHYSICS
            }
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            e.exit_code()
        }
    }
}

struct Session {
    config: RunConfig,
    params: PhysicalParameters,
    dir: PathBuf,
}

impl Session {
    fn open(cli: &Cli) -> Result<Self, CliError> {
        let mut config = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let params = config.resolve_parameters(&cli.set)?;
        let dir = config.resolve_output_dir(cli.output_dir.clone());
        Ok(Self { config, params, dir })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", self.dir.display())))?;
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    /// Echo of the fully resolved configuration next to the outputs.
    fn finish(&self) -> Result<(), CliError> {
        self.write(RESOLVED_CONFIG_FILE, &self.config.to_toml()).map(|_| ())
    }
}

fn execute(cli: Cli) -> Result<(String, bool), CliError> {
    let mut session = Session::open(&cli)?;
    let result = match &cli.command {
        Command::FidelityCurve(a) => cmd_fidelity_curve(&mut session, a),
        Command::Transport(a) => cmd_transport(&mut session, a),
        Command::Feasibility(a) => cmd_feasibility(&mut session, a),
        Command::Protocol(p) => cmd_protocol(&mut session, p),
    }?;
    session.finish()?;
    Ok(result)
}

fn load_table(
    path: &Option<PathBuf>,
    bundled: fn() -> CrossSectionTable,
    kind: TableKind,
) -> Result<CrossSectionTable, CliError> {
    let Some(p) = path else { return Ok(bundled()) };
    let table = CrossSectionTable::load(p)?;
    if table.kind() != kind {
        return Err(CliError::Input(format!("{} holds a {:?} table, expected {kind:?}", p.display(), table.kind())));
    }
    Ok(table)
}

pub const FIDELITY_CURVE_HEADER: &str = "lambda_nm,sigma_ion,sigma_opt,fidelity";

fn cmd_fidelity_curve(s: &mut Session, a: &FidelityCurveArgs) -> Result<(String, bool), CliError> {
    let sc = &mut s.config.scenario.fidelity_curve;
    if a.ion_table.is_some() {
        sc.ion_table = a.ion_table.clone();
    }
    if a.opt_table.is_some() {
        sc.opt_table = a.opt_table.clone();
    }
    if a.lambda_min.is_some() {
        sc.lambda_min = a.lambda_min;
    }
    if a.lambda_max.is_some() {
        sc.lambda_max = a.lambda_max;
    }
    merge!(sc, a; step_nm);
    let sc = sc.clone();
    let ion = load_table(&sc.ion_table, CrossSectionTable::bundled_ionization, TableKind::Ionization)?;
    let opt = load_table(&sc.opt_table, CrossSectionTable::bundled_absorption, TableKind::OpticalAbsorption)?;
    let lo = sc.lambda_min.unwrap_or_else(|| ion.range().0.max(opt.range().0));
    let hi = sc.lambda_max.unwrap_or_else(|| ion.range().1.min(opt.range().1));
    if !(sc.step_nm > 0.0) || !(hi >= lo) {
        return Err(CliError::Input(format!(
            "need lambda_min <= lambda_max and a positive step (got {lo}..{hi}, step {})",
            sc.step_nm
        )));
    }
    let n = ((hi - lo) / sc.step_nm + 1e-9).floor() as usize;
    let mut csv = String::from(FIDELITY_CURVE_HEADER);
    csv.push('\n');
    let mut rows = 0;
    for k in 0..=n {
        let lambda = lo + k as f64 * sc.step_nm;
        let f = match injection_fidelity(&ion, &opt, lambda) {
            Ok(f) => f,
            Err(PhotoError::UndefinedFidelity(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let _ = writeln!(csv, "{lambda},{},{},{f}", ion.interpolate(lambda)?, opt.interpolate(lambda)?);
        rows += 1;
    }
    let path = s.write("fidelity_curve.csv", &csv)?;
    Ok((format!("fidelity curve: {rows} rows over {lo}-{hi} nm -> {}\n", path.display()), true))
}

fn cmd_transport(s: &mut Session, a: &TransportArgs) -> Result<(String, bool), CliError> {
    let sc = &mut s.config.scenario.transport;
    merge!(sc, a; geometry, field, t_end, samples, initial, width, coulomb, capture, injection_rate,
        x_injector, x_max, half_width, wire_width, wire_length);
    if a.dt.is_some() {
        sc.dt = a.dt;
    }
    if let Some(c) = &a.cells {
        sc.cells = <[usize; 3]>::try_from(c.as_slice())
            .map_err(|_| CliError::Input("--cells needs three counts".into()))?;
    }
    if let Some(c) = &a.wire_cells {
        sc.wire_cells = <[usize; 2]>::try_from(c.as_slice())
            .map_err(|_| CliError::Input("--wire-cells needs two counts".into()))?;
    }
    let sc = sc.clone();
    if !(sc.t_end >= 0.0 && sc.t_end.is_finite()) || sc.samples == 0 {
        return Err(CliError::Input("t_end must be non-negative and samples at least 1".into()));
    }
    let domain = match sc.geometry {
        GeometryKind::HalfSpace => TransportDomain::half_space(
            sc.x_injector,
            sc.field,
            sc.x_max,
            2.0 * sc.half_width,
            (-sc.half_width, sc.half_width),
            sc.cells,
        )?,
        GeometryKind::Nanowire => TransportDomain::nanowire(
            sc.wire_width,
            sc.wire_length,
            sc.field,
            sc.wire_cells[0],
            sc.wire_cells[1],
        )?,
    };
    let mut cfg = SolverConfig::from_parameters(&s.params);
    cfg.coulomb = sc.coulomb;
    cfg.capture = sc.capture;
    cfg.dt = sc.dt;
    cfg.initial = match sc.initial {
        InitialKind::Bound => InitialCondition::Bound,
        InitialKind::Point => InitialCondition::PointRelease,
        InitialKind::Gaussian => InitialCondition::Gaussian { width: sc.width },
    };
    cfg.injection = if sc.injection_rate > 0.0 {
        PulseProfile::Constant { rate: sc.injection_rate }
    } else {
        PulseProfile::Off
    };
    let start = domain.r_injector;
    let mut solver = DriftDiffusionSolver::new(domain, cfg)?;
    s.write("grid_initial.txt", &write_grid_dump(solver.grid(), solver.state()))?;
    let trajectory = solver.run(sc.t_end, sc.samples)?;
    s.write("trajectory.csv", &write_trajectory_csv(&trajectory))?;
    s.write("grid_final.txt", &write_grid_dump(solver.grid(), solver.state()))?;

    let last = trajectory.last().copied().unwrap_or_else(|| solver.trajectory_point());
    let worst = trajectory.iter().map(|p| p.conservation_error.abs()).fold(0.0, f64::max);
    let drift = s.params.mu_n * sc.field * sc.t_end;
    let mut text = String::new();
    let _ = writeln!(text, "transport: {} steps of {} ns", solver.steps(), solver.dt());
    let _ = writeln!(
        text,
        "final mean = ({}, {}, {}) um, spread = {} um",
        last.mean[0], last.mean[1], last.mean[2], last.spread
    );
    let _ = writeln!(text, "drift mu*E*t = {drift} um from z = {}", start[2]);
    let _ = writeln!(text, "n_i = {}, n_c = {}", last.n_i, last.n_c);
    let _ = writeln!(text, "max conservation error = {worst}");
    let pass = worst < 1e-6;
    if !pass {
        let _ = writeln!(text, "probability conservation exceeded 1e-6");
    }
    Ok((text, pass))
}

pub const FEASIBILITY_MAP_HEADER: &str = "width_um,field_v_per_um,density_um3,feasible";
pub const FEASIBILITY_BOUNDARY_HEADER: &str =
    "width_um,peak_field_v_per_um,peak_density_um3,e_lower_v_per_um,e_upper_v_per_um,grid_lower_v_per_um,grid_upper_v_per_um";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn cmd_feasibility(s: &mut Session, a: &FeasibilityArgs) -> Result<(String, bool), CliError> {
    let sc = &mut s.config.scenario.feasibility;
    merge!(sc, a; widths, e_min, e_max, e_count, rho_min);
    let sc = sc.clone();
    let fields = sc.fields()?;
    let map = feasibility_region(&sc.widths, &fields, sc.rho_min, s.params.mu_n, s.params.d_n)?;

    let mut csv = String::from(FEASIBILITY_MAP_HEADER);
    csv.push('\n');
    for (i, l) in map.widths.iter().enumerate() {
        for (j, e) in map.fields.iter().enumerate() {
            let _ = writeln!(csv, "{l},{e},{},{}", map.value(i, j), u8::from(map.feasible(i, j)));
        }
    }
    s.write("feasibility_map.csv", &csv)?;

    let mut bcsv = String::from(FEASIBILITY_BOUNDARY_HEADER);
    bcsv.push('\n');
    let mut text = String::new();
    if sc.rho_min > 0.0 {
        for b in &map.boundaries {
            let _ = writeln!(
                bcsv,
                "{},{},{},{},{},{},{}",
                b.width,
                b.peak_field,
                b.peak_density,
                opt(b.lower),
                opt(b.upper),
                opt(b.grid_lower),
                opt(b.grid_upper)
            );
            let _ = writeln!(
                text,
                "l = {} um: E in [{}, {}] V/um",
                b.width,
                b.lower.map_or("-".into(), |v| v.to_string()),
                b.upper.map_or("-".into(), |v| v.to_string())
            );
        }
    } else {
        let _ = writeln!(text, "rho_min <= 0: every (l, E) is feasible");
    }
    s.write("feasibility_boundary.csv", &bcsv)?;
    Ok((text, true))
}

fn fidelity_inputs(
    s: &mut Session,
    f: &FidelityFlags,
    nv: Option<&NvInjectionCheck>,
) -> Result<FidelityInputs, CliError> {
    let sc = &mut s.config.scenario.protocol;
    merge!(sc, f; injection_fidelity, ionization_coherence, capture_density, flip_rate_mhz);
    let p = &s.params;
    let gamma = capture_rate(sc.capture_density, p.sigma_cap, p.temperature, p.m_eff)?;
    Ok(FidelityInputs {
        injection_fidelity: sc.injection_fidelity,
        ionization_coherence: sc.ionization_coherence,
        nv_separation_coherence: nv.map_or(1.0, |c| c.coherence),
        t2: p.t1_transport,
        capture_rate: gamma.rate,
        nuclear_flip_rate_mhz: sc.flip_rate_mhz,
    })
}

fn cmd_protocol(s: &mut Session, cmd: &ProtocolCommand) -> Result<(String, bool), CliError> {
    let mut nv_check = None;
    let (timeline, flags): (Timeline, Option<&FidelityFlags>) = match cmd {
        ProtocolCommand::InjectNv {
            alpha,
            beta,
            microwave_count,
            blue_ns,
            b_gauss,
            fidelity,
        } => {
            let sc = &mut s.config.scenario.protocol;
            merge_vars!(sc; alpha, beta, microwave_count, blue_ns, b_gauss);
            let mut opts = InjectNvOptions {
                alpha: C64::new(sc.alpha, 0.0),
                beta: C64::new(sc.beta, 0.0),
                microwave_count: sc.microwave_count,
                d_ghz: s.params.d_gs,
                b_gauss: sc.b_gauss,
                ..Default::default()
            };
            opts.durations.blue_ionize = sc.blue_ns;
            let (tl, check) = inject_nv(&opts)?;
            nv_check = Some(check);
            (tl, Some(fidelity))
        }
        ProtocolCommand::InjectPair {
            coupling_mhz,
            min_coupling_mhz,
            reinit,
            fidelity,
        } => {
            let sc = &mut s.config.scenario.protocol;
            merge_vars!(sc; coupling_mhz, min_coupling_mhz, reinit);
            let tl = inject_pair(&PairOptions {
                coupling_mhz: sc.coupling_mhz,
                min_coupling_mhz: sc.min_coupling_mhz,
                reinit: match sc.reinit {
                    ReinitKind::Optical => ReinitMode::Optical,
                    ReinitKind::Projective => ReinitMode::Projective,
                },
                ..Default::default()
            })?;
            (tl, Some(fidelity))
        }
        ProtocolCommand::Detect {
            transport_ns,
            capture_ns,
            coupling_mhz,
            min_coupling_mhz,
            fidelity,
        } => {
            let sc = &mut s.config.scenario.protocol;
            merge_vars!(sc; transport_ns, capture_ns, coupling_mhz, min_coupling_mhz);
            let tl = detect(&DetectOptions {
                transport_ns: sc.transport_ns,
                capture_ns: sc.capture_ns,
                coupling_mhz: sc.coupling_mhz,
                min_coupling_mhz: sc.min_coupling_mhz,
                ..Default::default()
            })?;
            (tl, Some(fidelity))
        }
        ProtocolCommand::Entangle {
            coupling_mhz,
            coupling_nv_logic_mhz,
            transport_ns,
            capture_ns,
            gate_ns,
            min_coupling_mhz,
            fidelity,
        } => {
            let sc = &mut s.config.scenario.protocol;
            merge_vars!(sc; coupling_mhz, coupling_nv_logic_mhz, transport_ns, capture_ns, min_coupling_mhz);
            if gate_ns.is_some() {
                sc.gate_ns = *gate_ns;
            }
            let tl = entangle(&EntangleOptions {
                coupling_nv_ns_mhz: sc.coupling_mhz,
                coupling_nv_logic_mhz: sc.coupling_nv_logic_mhz,
                transport_ns: sc.transport_ns,
                capture_ns: sc.capture_ns,
                gate_override_ns: sc.gate_ns,
                min_coupling_mhz: sc.min_coupling_mhz,
                ..Default::default()
            })?;
            (tl, Some(fidelity))
        }
        ProtocolCommand::Check { timeline } => (read_timeline(timeline)?, None),
    };

    let mut validated = validate(&timeline)?;
    validated.report.nv_injection = nv_check;
    if let Some(f) = flags {
        let inputs = fidelity_inputs(s, f, nv_check.as_ref())?;
        validated.report.fidelity = Some(end_to_end_fidelity(&validated, &inputs)?);
    }
    s.write("timeline.txt", &timeline.to_text())?;
    s.write("timeline.csv", &timeline.to_csv())?;
    let text = validated.report.to_text();
    s.write("report.txt", &text)?;
    Ok((text, validated.report.verdict()))
}

fn read_timeline(path: &Path) -> Result<Timeline, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(Timeline::from_text(&text)?)
}
