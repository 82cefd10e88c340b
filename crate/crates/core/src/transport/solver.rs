//! Explicit finite-volume drift-diffusion with single-cell injection and
//! capture kinetics.
//!
//! Each step is split: a transport update (upwind drift, centered
//! diffusion, zero flux through every boundary face) followed by the
//! exchanges between the density and the injector / capturer occupations.
//! Both parts move probability without creating or destroying it.

use rayon::prelude::*;

use super::domain::{Grid, TransportDomain};
use super::TransportError;
use crate::params::PhysicalParameters;

/// Allowed undershoot below zero before a step is declared broken.
pub const NEGATIVE_DENSITY_GUARD: f64 = -1e-12;

/// Grids smaller than this are stepped on one thread.
const PARALLEL_MIN_CELLS: usize = 16_384;

fn sum(v: &[f64]) -> f64 {
    if v.len() >= PARALLEL_MIN_CELLS {
        v.par_iter().sum()
    } else {
        v.iter().sum()
    }
}

fn min(v: &[f64]) -> f64 {
    if v.len() >= PARALLEL_MIN_CELLS {
        v.par_iter().copied().reduce(|| f64::INFINITY, f64::min)
    } else {
        v.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Photoionization rate k_I(t) of the injecting center, 1/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseProfile {
    Off,
    Constant { rate: f64 },
    Rectangular { rate: f64, start: f64, duration: f64 },
}

impl PulseProfile {
    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            PulseProfile::Off => 0.0,
            PulseProfile::Constant { rate } => rate,
            PulseProfile::Rectangular { rate, start, duration } => {
                if t >= start && t < start + duration {
                    rate
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// Electron bound on the injector (N_I = 1).
    Bound,
    /// Electron free, all probability in the injector cell.
    PointRelease,
    /// Electron free, Gaussian of width w about the injector (cell averages,
    /// renormalized on the grid).
    Gaussian { width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// μm²/(V·ns)
    pub mobility: f64,
    /// μm²/ns
    pub diffusivity: f64,
    /// k_C = σ_cap·v_th, μm³/ns
    pub capture_coefficient: f64,
    /// e/(4πε), V·μm
    pub coulomb_constant: f64,
    pub injection: PulseProfile,
    pub initial: InitialCondition,
    /// Field of the charged centers added to the applied field.
    pub coulomb: bool,
    /// Capture at the capturer and recapture at the injector.
    pub capture: bool,
    /// Release through k_I(t). When off, a bound electron is released
    /// instantly into the injector cell.
    pub finite_injection: bool,
    /// Fixed step; must not exceed the stability limit.
    pub dt: Option<f64>,
    /// Fraction of the stability limit used when `dt` is unset.
    pub cfl_safety: f64,
}

impl SolverConfig {
    pub fn from_parameters(p: &PhysicalParameters) -> Self {
        Self {
            mobility: p.mu_n,
            diffusivity: p.d_n,
            capture_coefficient: p.capture_coefficient(),
            coulomb_constant: p.coulomb_constant(),
            injection: PulseProfile::Off,
            initial: InitialCondition::Bound,
            coulomb: false,
            capture: true,
            finite_injection: true,
            dt: None,
            cfl_safety: 0.9,
        }
    }
}

/// Density field plus occupation probabilities at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportState {
    /// μm⁻³, z-fastest.
    pub rho: Vec<f64>,
    pub n_i: f64,
    pub n_c: f64,
    pub t: f64,
}

impl TransportState {
    pub fn free_probability(&self, grid: &Grid) -> f64 {
        sum(&self.rho) * grid.cell_volume()
    }

    pub fn total_probability(&self, grid: &Grid) -> f64 {
        self.free_probability(grid) + self.n_i + self.n_c
    }

    /// Mean position and per-axis variance of the free density.
    pub fn moments(&self, grid: &Grid) -> Option<([f64; 3], [f64; 3])> {
        let [nx, ny, nz] = grid.dims;
        let mut mass = 0.0;
        let mut first = [0.0; 3];
        let mut second = [0.0; 3];
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nz {
                    let r = self.rho[grid.index(i, j, k)];
                    if r == 0.0 {
                        continue;
                    }
                    let c = grid.center([i, j, k]);
                    mass += r;
                    for d in 0..3 {
                        first[d] += r * c[d];
                        second[d] += r * c[d] * c[d];
                    }
                }
            }
        }
        if mass <= 0.0 {
            return None;
        }
        let mean: [f64; 3] = std::array::from_fn(|d| first[d] / mass);
        let var = std::array::from_fn(|d| (second[d] / mass - mean[d] * mean[d]).max(0.0));
        Some((mean, var))
    }

    /// Trilinear interpolation of the cell-centered field, clamped at the
    /// outermost cell centers.
    pub fn sample(&self, grid: &Grid, p: [f64; 3]) -> f64 {
        let mut lo = [0usize; 3];
        let mut frac = [0.0; 3];
        for d in 0..3 {
            let s = (p[d] - grid.origin[d]) / grid.spacing[d] - 0.5;
            let max = (grid.dims[d] - 1) as f64;
            let s = s.clamp(0.0, max);
            let base = (s.floor() as usize).min(grid.dims[d].saturating_sub(2));
            lo[d] = base;
            frac[d] = if grid.dims[d] > 1 { s - base as f64 } else { 0.0 };
        }
        let mut acc = 0.0;
        for corner in 0..8 {
            let mut weight = 1.0;
            let mut cell = [0usize; 3];
            for d in 0..3 {
                let up = (corner >> d) & 1 == 1;
                if up && grid.dims[d] == 1 {
                    weight = 0.0;
                }
                cell[d] = lo[d] + up as usize;
                weight *= if up { frac[d] } else { 1.0 - frac[d] };
            }
            if weight != 0.0 {
                acc += weight * self.rho[grid.index(cell[0], cell[1], cell[2])];
            }
        }
        acc
    }
}

/// One row of a transport time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub mean: [f64; 3],
    /// Isotropic-equivalent width √(tr Σ / 3).
    pub spread: f64,
    pub n_i: f64,
    pub n_c: f64,
    /// (∫ρ dV + N_I + N_C) − 1
    pub conservation_error: f64,
}

/// Coulomb-field geometry per face: component along the face normal of
/// (e/4πε)·(r − r_j)/(|r − r_j|·max(|r − r_j|, r_min)²) for each center.
#[derive(Debug, Clone)]
struct CoulombFaces {
    injector: [Vec<f64>; 3],
    capturer: [Vec<f64>; 3],
}

pub struct DriftDiffusionSolver {
    domain: TransportDomain,
    config: SolverConfig,
    state: TransportState,
    dt: f64,
    dt_limit: f64,
    injector: usize,
    capturer: usize,
    coulomb: Option<CoulombFaces>,
    scratch: Vec<f64>,
    steps: u64,
    last_transport_residual: f64,
}

fn face_center(grid: &Grid, cell: [usize; 3], axis: usize) -> [f64; 3] {
    let mut c = grid.center(cell);
    c[axis] += 0.5 * grid.spacing[axis];
    c
}

fn coulomb_component(p: [f64; 3], source: [f64; 3], axis: usize, k: f64, r_min: f64) -> f64 {
    let d: [f64; 3] = std::array::from_fn(|a| p[a] - source[a]);
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if r == 0.0 {
        return 0.0;
    }
    let r_eff = r.max(r_min);
    k * d[axis] / (r * r_eff * r_eff)
}

impl DriftDiffusionSolver {
    pub fn new(domain: TransportDomain, config: SolverConfig) -> Result<Self, TransportError> {
        if !(config.diffusivity > 0.0) || !(config.mobility >= 0.0) {
            return Err(TransportError::Domain("need D > 0 and μ ≥ 0".into()));
        }
        if !(config.capture_coefficient >= 0.0) {
            return Err(TransportError::Domain("capture coefficient must be non-negative".into()));
        }
        if !(config.cfl_safety > 0.0 && config.cfl_safety <= 1.0) {
            return Err(TransportError::Domain(format!(
                "CFL safety factor must lie in (0, 1], got {}",
                config.cfl_safety
            )));
        }
        let grid = domain.grid.clone();
        let [ii, ij, ik] = domain.injector_cell()?;
        let [ci, cj, ck] = domain.capturer_cell()?;
        if config.capture && domain.separation_cells() < 8.0 {
            return Err(TransportError::Resolution(domain.separation_cells()));
        }
        let injector = grid.index(ii, ij, ik);
        let capturer = grid.index(ci, cj, ck);

        let coulomb = config.coulomb.then(|| {
            let r_min = grid.half_diagonal();
            let k = config.coulomb_constant;
            let build = |source: [f64; 3]| {
                std::array::from_fn(|axis| {
                    (0..grid.len())
                        .into_par_iter()
                        .map(|idx| {
                            let cell = grid.unravel(idx);
                            if cell[axis] + 1 >= grid.dims[axis] {
                                0.0
                            } else {
                                coulomb_component(face_center(&grid, cell, axis), source, axis, k, r_min)
                            }
                        })
                        .collect()
                })
            };
            CoulombFaces {
                injector: build(domain.r_injector),
                capturer: build(domain.r_capturer),
            }
        });

        let dt_limit = Self::stability_limit(&grid, &domain, &config, coulomb.as_ref());
        let dt = match config.dt {
            Some(dt) if !(dt > 0.0) => {
                return Err(TransportError::Domain(format!("time step must be positive, got {dt}")))
            }
            Some(dt) if dt > dt_limit => return Err(TransportError::Cfl { dt, limit: dt_limit }),
            Some(dt) => dt,
            None => config.cfl_safety * dt_limit,
        };

        let mut rho = vec![0.0; grid.len()];
        let volume = grid.cell_volume();
        let (mut n_i, n_c) = (0.0, 0.0);
        let initial = match config.initial {
            InitialCondition::Bound if !config.finite_injection => InitialCondition::PointRelease,
            other => other,
        };
        match initial {
            InitialCondition::Bound => n_i = 1.0,
            InitialCondition::PointRelease => rho[injector] = 1.0 / volume,
            InitialCondition::Gaussian { width } => {
                if !(width > 0.0) {
                    return Err(TransportError::Domain(format!(
                        "initial width must be positive, got {width}"
                    )));
                }
                let s = std::f64::consts::SQRT_2 * width;
                let axis_weights: [Vec<f64>; 3] = std::array::from_fn(|d| {
                    (0..grid.dims[d])
                        .map(|c| {
                            let a = grid.origin[d] + c as f64 * grid.spacing[d] - domain.r_injector[d];
                            let b = a + grid.spacing[d];
                            0.5 * (libm::erf(b / s) - libm::erf(a / s))
                        })
                        .collect()
                });
                for (idx, r) in rho.iter_mut().enumerate() {
                    let [i, j, k] = grid.unravel(idx);
                    *r = axis_weights[0][i] * axis_weights[1][j] * axis_weights[2][k];
                }
                let mass: f64 = rho.iter().sum();
                if mass <= 0.0 {
                    return Err(TransportError::Domain("initial Gaussian misses the grid".into()));
                }
                rho.iter_mut().for_each(|r| *r /= mass * volume);
            }
        }

        Ok(Self {
            scratch: vec![0.0; grid.len()],
            domain,
            config,
            state: TransportState {
                rho,
                n_i,
                n_c,
                t: 0.0,
            },
            dt,
            dt_limit,
            injector,
            capturer,
            coulomb,
            steps: 0,
            last_transport_residual: 0.0,
        })
    }

    /// Largest positivity-preserving step:
    /// 1 / (2D·Σ 1/h_d² + Σ (max v⁺_d + max v⁻_d)/h_d), with the face
    /// velocities bounded over all center charges in [0, 1].
    fn stability_limit(
        grid: &Grid,
        domain: &TransportDomain,
        config: &SolverConfig,
        coulomb: Option<&CoulombFaces>,
    ) -> f64 {
        let mut rate = 0.0;
        for d in 0..3 {
            let h = grid.spacing[d];
            rate += 2.0 * config.diffusivity / (h * h);
            let base = -config.mobility * domain.e_applied[d];
            let (vpos, vneg) = match coulomb {
                None => (base.max(0.0), (-base).max(0.0)),
                Some(c) => c.injector[d]
                    .par_iter()
                    .zip(&c.capturer[d])
                    .map(|(&gi, &gc)| {
                        let mut hi = f64::NEG_INFINITY;
                        let mut lo = f64::INFINITY;
                        for (qi, qc) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                            let v = base - config.mobility * (qi * gi + qc * gc);
                            hi = hi.max(v);
                            lo = lo.min(v);
                        }
                        (hi.max(0.0), (-lo).max(0.0))
                    })
                    .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1))),
            };
            if grid.dims[d] > 1 {
                rate += (vpos + vneg) / h;
            }
        }
        1.0 / rate
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dt_limit(&self) -> f64 {
        self.dt_limit
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn state(&self) -> &TransportState {
        &self.state
    }

    pub fn domain(&self) -> &TransportDomain {
        &self.domain
    }

    pub fn grid(&self) -> &Grid {
        &self.domain.grid
    }

    /// Net probability change caused by the last transport update; the
    /// boundary faces carry no flux so this is round-off.
    pub fn last_transport_residual(&self) -> f64 {
        self.last_transport_residual
    }

    pub fn trajectory_point(&self) -> TrajectoryPoint {
        let grid = &self.domain.grid;
        let (mean, spread) = match self.state.moments(grid) {
            Some((mean, var)) => (mean, ((var[0] + var[1] + var[2]) / 3.0).sqrt()),
            None => (self.domain.r_injector, 0.0),
        };
        TrajectoryPoint {
            t: self.state.t,
            mean,
            spread,
            n_i: self.state.n_i,
            n_c: self.state.n_c,
            conservation_error: self.state.total_probability(grid) - 1.0,
        }
    }

    fn transport(&mut self, h: f64) {
        let grid = &self.domain.grid;
        let [nx, ny, nz] = grid.dims;
        let sp = grid.spacing;
        let diff = self.config.diffusivity;
        let mu = self.config.mobility;
        let base: [f64; 3] = std::array::from_fn(|d| -mu * self.domain.e_applied[d]);
        let q_i = 1.0 - self.state.n_i;
        let q_c = 1.0 - self.state.n_c;
        let coulomb = self.coulomb.as_ref();
        let rho = &self.state.rho;

        // Velocity through the +d face of cell `idx`.
        let velocity = |idx: usize, d: usize| -> f64 {
            match coulomb {
                None => base[d],
                Some(c) => base[d] - mu * (q_i * c.injector[d][idx] + q_c * c.capturer[d][idx]),
            }
        };
        let flux = |left: usize, right: usize, d: usize| -> f64 {
            let v = velocity(left, d);
            v.max(0.0) * rho[left] + v.min(0.0) * rho[right] - diff * (rho[right] - rho[left]) / sp[d]
        };
        let strides = [ny * nz, nz, 1];

        let update_line = |(line, out): (usize, &mut [f64])| {
            let cell_ij = [line / ny, line % ny];
            for (k, slot) in out.iter_mut().enumerate() {
                let idx = line * nz + k;
                let cell = [cell_ij[0], cell_ij[1], k];
                let mut div = 0.0;
                for d in 0..3 {
                    let s = strides[d];
                    let n = [nx, ny, nz][d];
                    let right = if cell[d] + 1 < n { flux(idx, idx + s, d) } else { 0.0 };
                    let left = if cell[d] > 0 { flux(idx - s, idx, d) } else { 0.0 };
                    div += (right - left) / sp[d];
                }
                *slot = rho[idx] - h * div;
            }
        };
        if rho.len() >= PARALLEL_MIN_CELLS {
            self.scratch.par_chunks_mut(nz).enumerate().for_each(update_line);
        } else {
            self.scratch.chunks_mut(nz).enumerate().for_each(update_line);
        }
        let before = sum(&self.state.rho);
        std::mem::swap(&mut self.state.rho, &mut self.scratch);
        let after = sum(&self.state.rho);
        self.last_transport_residual = (after - before) * grid.cell_volume();
    }

    fn exchange(&mut self, h: f64) {
        let volume = self.domain.grid.cell_volume();
        let k = self.config.capture_coefficient;
        let s = &mut self.state;
        if self.config.capture && k > 0.0 {
            // Capture: probability m in the capturer cell binds at rate k_C(1 − N_C)/V.
            let m = s.rho[self.capturer] * volume;
            let moved = m * -(-k * (1.0 - s.n_c) * h / volume).exp_m1();
            s.rho[self.capturer] -= moved / volume;
            s.n_c += moved;
            let m = s.rho[self.injector] * volume;
            let moved = m * -(-k * (1.0 - s.n_i) * h / volume).exp_m1();
            s.rho[self.injector] -= moved / volume;
            s.n_i += moved;
        }
        if self.config.finite_injection {
            let rate = self.config.injection.rate(s.t + 0.5 * h);
            if rate > 0.0 {
                let moved = s.n_i * -(-rate * h).exp_m1();
                s.n_i -= moved;
                s.rho[self.injector] += moved / volume;
            }
        }
    }

    fn step_by(&mut self, h: f64) -> Result<(), TransportError> {
        self.transport(h);
        self.exchange(h);
        self.state.t += h;
        self.steps += 1;
        let lowest = min(&self.state.rho);
        if lowest < NEGATIVE_DENSITY_GUARD {
            return Err(TransportError::NegativeDensity {
                t: self.state.t,
                value: lowest,
            });
        }
        Ok(())
    }

    pub fn step(&mut self) -> Result<(), TransportError> {
        self.step_by(self.dt)
    }

    /// Step until `t`, shortening the final step to land on it exactly.
    pub fn advance_to(&mut self, t: f64) -> Result<(), TransportError> {
        while self.state.t < t {
            let remaining = t - self.state.t;
            if remaining <= 1e-12 * t.abs().max(1.0) {
                self.state.t = t;
                break;
            }
            self.step_by(self.dt.min(remaining))?;
        }
        Ok(())
    }

    /// Advance to `t_end`, recording `samples + 1` evenly spaced points
    /// (including t = 0 relative to the current time).
    pub fn run(&mut self, t_end: f64, samples: usize) -> Result<Vec<TrajectoryPoint>, TransportError> {
        if !(t_end > 0.0) {
            return Err(TransportError::Domain(format!("t_end must be positive, got {t_end}")));
        }
        let samples = samples.max(1);
        let start = self.state.t;
        let mut out = Vec::with_capacity(samples + 1);
        out.push(self.trajectory_point());
        for s in 1..=samples {
            self.advance_to(start + t_end * s as f64 / samples as f64)?;
            out.push(self.trajectory_point());
        }
        Ok(out)
    }

    pub fn into_state(self) -> TransportState {
        self.state
    }
}

/// Time series and final state of one solver run.
#[derive(Debug, Clone)]
pub struct TransportRun {
    pub trajectory: Vec<TrajectoryPoint>,
    pub final_state: TransportState,
    pub dt: f64,
    pub steps: u64,
}

pub fn solve_drift_diffusion(
    domain: TransportDomain,
    config: SolverConfig,
    t_end: f64,
    samples: usize,
) -> Result<TransportRun, TransportError> {
    let mut solver = DriftDiffusionSolver::new(domain, config)?;
    let trajectory = solver.run(t_end, samples)?;
    Ok(TransportRun {
        trajectory,
        dt: solver.dt(),
        steps: solver.steps(),
        final_state: solver.into_state(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::domain::Geometry;
    use approx::assert_relative_eq;

    fn params() -> PhysicalParameters {
        PhysicalParameters::default()
    }

    fn box_domain(n: usize, side: f64, field: [f64; 3]) -> TransportDomain {
        let grid = Grid::spanning([0.0; 3], [side; 3], [n; 3]).unwrap();
        let h = side / n as f64;
        TransportDomain {
            geometry: Geometry::FreeSpace,
            grid,
            e_applied: field,
            r_injector: [1.5 * h, side / 2.0, side / 2.0],
            r_capturer: [side - 1.5 * h, side / 2.0, side / 2.0],
        }
    }

    #[test]
    fn bound_electron_without_ionization_is_stationary() {
        let cfg = SolverConfig::from_parameters(&params());
        let mut s = DriftDiffusionSolver::new(box_domain(12, 6.0, [0.0, 0.0, -0.01]), cfg).unwrap();
        for _ in 0..50 {
            s.step().unwrap();
        }
        assert_eq!(s.state().n_i, 1.0);
        assert_eq!(s.state().n_c, 0.0);
        assert!(s.state().rho.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn conservation_and_positivity_with_coulomb() {
        let mut cfg = SolverConfig::from_parameters(&params());
        cfg.coulomb = true;
        cfg.injection = PulseProfile::Rectangular {
            rate: 2.0,
            start: 0.0,
            duration: 1.0,
        };
        let mut s = DriftDiffusionSolver::new(box_domain(12, 3.0, [0.02, 0.0, -0.05]), cfg).unwrap();
        for _ in 0..10_000 {
            s.step().unwrap();
            assert!(s.last_transport_residual().abs() < 1e-8);
        }
        let p = s.trajectory_point();
        assert!(p.conservation_error.abs() < 1e-6, "{p:?}");
        assert!(p.n_i < 1.0);
        assert!(s.state().rho.iter().all(|&r| r >= NEGATIVE_DENSITY_GUARD));
    }

    #[test]
    fn stability_limit_matches_uniform_field_formula() {
        let mut cfg = SolverConfig::from_parameters(&params());
        cfg.capture = false;
        let s = DriftDiffusionSolver::new(box_domain(10, 5.0, [0.0, 0.0, -0.1]), cfg.clone()).unwrap();
        let h = 0.5;
        let expected = 1.0 / (2.0 * 11.0 * 3.0 / (h * h) + 45.0 / h);
        assert_relative_eq!(s.dt_limit(), expected, max_relative = 1e-14);
        assert_relative_eq!(s.dt(), 0.9 * expected, max_relative = 1e-14);
        cfg.dt = Some(2.0 * expected);
        assert!(matches!(
            DriftDiffusionSolver::new(box_domain(10, 5.0, [0.0, 0.0, -0.1]), cfg),
            Err(TransportError::Cfl { .. })
        ));
    }

    #[test]
    fn off_grid_and_unresolved_centers_rejected() {
        let cfg = SolverConfig::from_parameters(&params());
        let mut d = box_domain(10, 5.0, [0.0; 3]);
        d.r_capturer = [9.0, 0.0, 0.0];
        assert_eq!(
            DriftDiffusionSolver::new(d, cfg.clone()).err(),
            Some(TransportError::OffGrid("capturer"))
        );
        let mut d = box_domain(10, 5.0, [0.0; 3]);
        d.r_capturer = [d.r_injector[0] + 1.0, 2.5, 2.5];
        assert!(matches!(
            DriftDiffusionSolver::new(d, cfg),
            Err(TransportError::Resolution(_))
        ));
    }

    #[test]
    fn pure_diffusion_symmetric_spread() {
        // Point release at the box center spreads with variance ≈ 2Dt per axis.
        let mut cfg = SolverConfig::from_parameters(&params());
        cfg.capture = false;
        cfg.initial = InitialCondition::PointRelease;
        let n = 41;
        let side = 41.0;
        let mut d = box_domain(n, side, [0.0; 3]);
        d.r_injector = [side / 2.0; 3];
        let mut s = DriftDiffusionSolver::new(d, cfg).unwrap();
        s.advance_to(0.5).unwrap();
        let (mean, var) = s.state().moments(s.grid()).unwrap();
        for d in 0..3 {
            assert_relative_eq!(mean[d], side / 2.0, epsilon = 1e-9);
            assert_relative_eq!(var[d], 2.0 * 11.0 * 0.5, max_relative = 0.02);
        }
        assert_relative_eq!(s.state().t, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn sample_interpolates_linear_fields_exactly() {
        let grid = Grid::spanning([0.0; 3], [4.0, 2.0, 8.0], [4, 2, 8]).unwrap();
        let rho = (0..grid.len())
            .map(|idx| {
                let c = grid.center(grid.unravel(idx));
                1.0 + 2.0 * c[0] - c[1] + 0.5 * c[2]
            })
            .collect();
        let st = TransportState {
            rho,
            n_i: 0.0,
            n_c: 0.0,
            t: 0.0,
        };
        let p = [1.3, 0.9, 5.2];
        assert_relative_eq!(st.sample(&grid, p), 1.0 + 2.6 - 0.9 + 2.6, epsilon = 1e-12);
    }
}
