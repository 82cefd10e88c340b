//! Closed-form transport results: the half-space Gaussian, the nanowire
//! steady state, the feasibility region built on it, and drift figures.

use std::f64::consts::{PI, SQRT_2};

use super::TransportError;

fn gaussian(u: f64, variance: f64) -> f64 {
    (-u * u / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
}

/// Mean of a unit Gaussian of the given variance over [a, b] after shifting by `center`.
fn gaussian_cell_average(a: f64, b: f64, center: f64, variance: f64) -> f64 {
    let s = (2.0 * variance).sqrt();
    0.5 * (libm::erf((b - center) / s) - libm::erf((a - center) / s)) / (b - a)
}

/// Density of an electron released as a Gaussian of width w at x_I x̂ into
/// the half-space x ≥ 0 under a uniform field −E ẑ.
///
/// X carries the image source enforcing zero flux at x = 0. Each factor has
/// variance 2D·t* with t* = t + w²/2D, and the z factor is centered on the
/// drift displacement μEt. This is the exact solution of the uniform-field
/// equation for a Gaussian initial condition of any width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpaceSolution {
    pub x_injector: f64,
    pub width: f64,
    /// Magnitude E of the applied field −E ẑ (V/μm).
    pub field: f64,
    pub mobility: f64,
    pub diffusivity: f64,
}

impl HalfSpaceSolution {
    pub fn new(
        x_injector: f64,
        width: f64,
        field: f64,
        mobility: f64,
        diffusivity: f64,
    ) -> Result<Self, TransportError> {
        if !(width > 0.0) || !(diffusivity > 0.0) || !(x_injector >= 0.0) || !(mobility >= 0.0) {
            return Err(TransportError::Domain(format!(
                "half-space solution needs w > 0, D > 0, x_I ≥ 0 (w = {width}, D = {diffusivity}, x_I = {x_injector})"
            )));
        }
        Ok(Self {
            x_injector,
            width,
            field,
            mobility,
            diffusivity,
        })
    }

    pub fn t_star(&self, t: f64) -> f64 {
        t + self.width * self.width / (2.0 * self.diffusivity)
    }

    /// Per-axis variance 2D·t*.
    pub fn variance(&self, t: f64) -> f64 {
        2.0 * self.diffusivity * self.t_star(t)
    }

    pub fn drift(&self, t: f64) -> f64 {
        self.mobility * self.field * t
    }

    fn check_time(t: f64) -> Result<(), TransportError> {
        if t >= 0.0 {
            Ok(())
        } else {
            Err(TransportError::Domain(format!("time must be non-negative, got {t}")))
        }
    }

    pub fn density(&self, t: f64, p: [f64; 3]) -> Result<f64, TransportError> {
        Self::check_time(t)?;
        let v = self.variance(t);
        let x = gaussian(p[0] - self.x_injector, v) + gaussian(p[0] + self.x_injector, v);
        Ok(x * gaussian(p[1], v) * gaussian(p[2] - self.drift(t), v))
    }

    /// Exact average of the density over the box [lo, hi] (x ≥ 0 assumed).
    pub fn cell_average(&self, t: f64, lo: [f64; 3], hi: [f64; 3]) -> Result<f64, TransportError> {
        Self::check_time(t)?;
        let v = self.variance(t);
        let x = gaussian_cell_average(lo[0], hi[0], self.x_injector, v)
            + gaussian_cell_average(lo[0], hi[0], -self.x_injector, v);
        let y = gaussian_cell_average(lo[1], hi[1], 0.0, v);
        let z = gaussian_cell_average(lo[2], hi[2], self.drift(t), v);
        Ok(x * y * z)
    }

    /// ∂ρ/∂x, which vanishes identically on the surface x = 0.
    pub fn gradient_x(&self, t: f64, p: [f64; 3]) -> Result<f64, TransportError> {
        Self::check_time(t)?;
        let v = self.variance(t);
        let dx = |u: f64| -u / v * gaussian(u, v);
        let x = dx(p[0] - self.x_injector) + dx(p[0] + self.x_injector);
        Ok(x * gaussian(p[1], v) * gaussian(p[2] - self.drift(t), v))
    }

    /// Exact mean position; ⟨x⟩ includes the reflection off the surface.
    pub fn mean_position(&self, t: f64) -> [f64; 3] {
        let s = self.variance(t).sqrt();
        let xi = self.x_injector;
        let mean_x = xi * libm::erf(xi / (SQRT_2 * s))
            + s * (2.0 / PI).sqrt() * (-xi * xi / (2.0 * s * s)).exp();
        [mean_x, 0.0, self.drift(t)]
    }
}

/// Isotropic width √(2D·t*) = √(2Dt + w²) of a released Gaussian (μm).
pub fn spread_radius(t: f64, width: f64, diffusivity: f64) -> Result<f64, TransportError> {
    if !(t >= 0.0) || !(width >= 0.0) || !(diffusivity > 0.0) {
        return Err(TransportError::Domain(format!(
            "spread radius needs t ≥ 0, w ≥ 0, D > 0 (t = {t}, w = {width}, D = {diffusivity})"
        )));
    }
    Ok((2.0 * diffusivity * t + width * width).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftReport {
    /// μm/ns
    pub speed: f64,
    /// μm
    pub distance: f64,
}

pub fn transport_distance(field: f64, t: f64, mobility: f64) -> DriftReport {
    let speed = mobility * field;
    DriftReport {
        speed,
        distance: speed * t,
    }
}

/// Conditions under which the nanowire steady state applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NanowireValidity {
    /// μEL/D; the closed form assumes this is large.
    pub peclet: f64,
    /// l²/D (ns)
    pub transverse_time: f64,
    /// L/μE (ns)
    pub transit_time: f64,
    /// 10·max(l²/D, L/μE) (ns)
    pub equilibration_time: f64,
    /// False when μEL/D < 5.
    pub valid: bool,
}

/// Static density reached in an l×l×L wire with field −E ẑ:
/// ρ(z) = (μE/Dl²)·exp(−(μE/D)(L − z)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NanowireSteadyState {
    pub width: f64,
    pub length: f64,
    pub field: f64,
    pub mobility: f64,
    pub diffusivity: f64,
}

pub const PECLET_VALIDITY_THRESHOLD: f64 = 5.0;

impl NanowireSteadyState {
    pub fn new(
        width: f64,
        length: f64,
        field: f64,
        mobility: f64,
        diffusivity: f64,
    ) -> Result<Self, TransportError> {
        if !(width > 0.0 && length > 0.0 && field > 0.0 && mobility > 0.0 && diffusivity > 0.0) {
            return Err(TransportError::Domain(format!(
                "nanowire needs positive l, L, E, μ, D (l = {width}, L = {length}, E = {field})"
            )));
        }
        Ok(Self {
            width,
            length,
            field,
            mobility,
            diffusivity,
        })
    }

    /// μE/D in 1/μm.
    pub fn decay_constant(&self) -> f64 {
        self.mobility * self.field / self.diffusivity
    }

    pub fn density(&self, z: f64) -> f64 {
        let a = self.decay_constant();
        a / (self.width * self.width) * (-a * (self.length - z)).exp()
    }

    /// Density at the capture center, l/2 from the endface.
    pub fn density_at_capturer(&self) -> f64 {
        self.density(self.length - self.width / 2.0)
    }

    /// ∫ρ dV over the wire, 1 − exp(−μEL/D).
    pub fn total_probability(&self) -> f64 {
        -(-self.decay_constant() * self.length).exp_m1()
    }

    pub fn validity(&self) -> NanowireValidity {
        let peclet = self.decay_constant() * self.length;
        let transverse_time = self.width * self.width / self.diffusivity;
        let transit_time = self.length / (self.mobility * self.field);
        NanowireValidity {
            peclet,
            transverse_time,
            transit_time,
            equilibration_time: 10.0 * transverse_time.max(transit_time),
            valid: peclet >= PECLET_VALIDITY_THRESHOLD,
        }
    }
}

/// Density at the capture center of a wire of width l, independent of L:
/// (μE/Dl²)·exp(−μEl/2D).
pub fn capturer_density(width: f64, field: f64, mobility: f64, diffusivity: f64) -> f64 {
    let a = mobility * field / diffusivity;
    a / (width * width) * (-a * width / 2.0).exp()
}

/// Both field roots of `capturer_density = rho_min` at one wire width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityBoundary {
    pub width: f64,
    /// Field of maximum capturer density, 2D/(μl).
    pub peak_field: f64,
    pub peak_density: f64,
    /// Root-found boundaries; `None` when the region is empty at this width.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Smallest and largest feasible field on the scan grid.
    pub grid_lower: Option<f64>,
    pub grid_upper: Option<f64>,
}

/// Capturer density over a (width, field) grid and its ρ ≥ ρ_min region.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityMap {
    pub widths: Vec<f64>,
    pub fields: Vec<f64>,
    /// Width-major: `density[i·fields.len() + j]`.
    pub density: Vec<f64>,
    pub rho_min: f64,
    pub boundaries: Vec<FeasibilityBoundary>,
}

impl FeasibilityMap {
    pub fn value(&self, width_idx: usize, field_idx: usize) -> f64 {
        self.density[width_idx * self.fields.len() + field_idx]
    }

    pub fn feasible(&self, width_idx: usize, field_idx: usize) -> bool {
        self.value(width_idx, field_idx) >= self.rho_min
    }

    pub fn is_empty(&self) -> bool {
        !self.density.iter().any(|&v| v >= self.rho_min)
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let (mut flo, _) = (f(lo), f(hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lower and upper fields where the capturer density crosses `rho_min`.
pub fn feasibility_roots(
    width: f64,
    rho_min: f64,
    mobility: f64,
    diffusivity: f64,
) -> (Option<f64>, Option<f64>) {
    if rho_min <= 0.0 {
        return (Some(0.0), Some(f64::INFINITY));
    }
    let g = |e: f64| capturer_density(width, e, mobility, diffusivity) - rho_min;
    let peak = 2.0 * diffusivity / (mobility * width);
    if g(peak) < 0.0 {
        return (None, None);
    }
    let lower = bisect(g, 0.0, peak);
    let mut hi = 2.0 * peak;
    while g(hi) >= 0.0 {
        hi *= 2.0;
    }
    (Some(lower), Some(bisect(g, peak, hi)))
}

pub fn feasibility_region(
    widths: &[f64],
    fields: &[f64],
    rho_min: f64,
    mobility: f64,
    diffusivity: f64,
) -> Result<FeasibilityMap, TransportError> {
    if widths.is_empty() || fields.is_empty() {
        return Err(TransportError::Domain("feasibility ranges must be non-empty".into()));
    }
    if widths.iter().chain(fields).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(TransportError::Domain("feasibility ranges must be positive".into()));
    }
    if !(mobility > 0.0 && diffusivity > 0.0) {
        return Err(TransportError::Domain("mobility and diffusivity must be positive".into()));
    }
    let mut density = Vec::with_capacity(widths.len() * fields.len());
    let mut boundaries = Vec::with_capacity(widths.len());
    for &l in widths {
        let row: Vec<f64> = fields
            .iter()
            .map(|&e| capturer_density(l, e, mobility, diffusivity))
            .collect();
        let feasible: Vec<f64> = fields
            .iter()
            .zip(&row)
            .filter(|(_, &v)| v >= rho_min)
            .map(|(&e, _)| e)
            .collect();
        let (lower, upper) = feasibility_roots(l, rho_min, mobility, diffusivity);
        let peak_field = 2.0 * diffusivity / (mobility * l);
        boundaries.push(FeasibilityBoundary {
            width: l,
            peak_field,
            peak_density: capturer_density(l, peak_field, mobility, diffusivity),
            lower,
            upper,
            grid_lower: feasible.iter().copied().reduce(f64::min),
            grid_upper: feasible.iter().copied().reduce(f64::max),
        });
        density.extend(row);
    }
    Ok(FeasibilityMap {
        widths: widths.to_vec(),
        fields: fields.to_vec(),
        density,
        rho_min,
        boundaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const MU: f64 = 450.0;
    const D: f64 = 11.0;

    #[test]
    fn half_space_initial_gaussian_far_from_surface() {
        let s = HalfSpaceSolution::new(50.0, 1.5, 0.0, MU, D).unwrap();
        let w2 = 1.5f64 * 1.5;
        let p = [50.7, -0.4, 0.9];
        let r2 = 0.7f64 * 0.7 + 0.16 + 0.81;
        let expected = (-r2 / (2.0 * w2)).exp() / (2.0 * PI * w2).powf(1.5);
        assert_relative_eq!(s.density(0.0, p).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn half_space_surface_is_flux_free() {
        let s = HalfSpaceSolution::new(2.0, 1.0, 0.05, MU, D).unwrap();
        for t in [0.0, 0.3, 2.0, 7.5] {
            for (y, z) in [(0.0, 0.0), (1.0, 3.0), (-2.0, 10.0)] {
                assert_eq!(s.gradient_x(t, [0.0, y, z]).unwrap(), 0.0);
                // and numerically via a one-sided difference
                let h = 1e-6;
                let d = (s.density(t, [h, y, z]).unwrap() - s.density(t, [0.0, y, z]).unwrap()) / h;
                assert!(d.abs() < 1e-5 * s.density(t, [0.0, y, z]).unwrap().max(1e-30) + 1e-12);
            }
        }
    }

    #[test]
    fn half_space_mean_drift() {
        let s = HalfSpaceSolution::new(200.0, 0.5, 0.01, MU, D).unwrap();
        let m = s.mean_position(10.0);
        assert_relative_eq!(m[0], 200.0, max_relative = 1e-12);
        assert_relative_eq!(m[2], 450.0 * 0.01 * 10.0);
        assert!(s.density(-1.0, [0.0; 3]).is_err());
    }

    #[test]
    fn cell_average_converges_to_point_value() {
        let s = HalfSpaceSolution::new(3.0, 1.0, 0.02, MU, D).unwrap();
        let p = [2.0, 0.5, 1.0];
        let h = 1e-3;
        let lo = p.map(|c| c - h / 2.0);
        let hi = p.map(|c| c + h / 2.0);
        assert_relative_eq!(
            s.cell_average(0.4, lo, hi).unwrap(),
            s.density(0.4, p).unwrap(),
            max_relative = 1e-6
        );
    }

    #[test]
    fn spread_radius_values() {
        assert_eq!(spread_radius(0.0, 0.0, D).unwrap(), 0.0);
        let r = spread_radius(1e-3, 0.0, D).unwrap();
        assert_relative_eq!(r, (0.022f64).sqrt());
        assert!(r > 0.135 && (r - 0.148).abs() < 5e-4);
        assert!((spread_radius(100.0, 0.0, D).unwrap() - 46.9).abs() < 0.05);
        assert!(spread_radius(-1.0, 0.0, D).is_err());
    }

    #[test]
    fn drift_figures() {
        let r = transport_distance(0.063, 80.0, MU);
        assert_relative_eq!(r.speed, 28.35, max_relative = 1e-12);
        assert!(r.distance > 2000.0);
        assert_eq!(transport_distance(0.0, 80.0, MU).distance, 0.0);
    }

    #[test]
    fn nanowire_closed_form() {
        let w = NanowireSteadyState::new(0.2, 2.0, 0.063, MU, D).unwrap();
        assert!((w.density_at_capturer() - 50.0).abs() < 0.5);
        let a = 450.0 * 0.063 / 11.0;
        assert_relative_eq!(w.total_probability(), 1.0 - (-a * 2.0f64).exp(), max_relative = 1e-14);
        let v = w.validity();
        assert!(v.valid);
        assert_relative_eq!(v.equilibration_time, 10.0 * 2.0 / 28.35, max_relative = 1e-12);
        let wide = NanowireSteadyState::new(0.4, 2.0, 0.063, MU, D).unwrap();
        assert_relative_eq!(wide.density(1.5) * 4.0, w.density(1.5), max_relative = 1e-14);
        let slow = NanowireSteadyState::new(0.2, 2.0, 0.01, MU, D).unwrap();
        assert!(!slow.validity().valid);
        assert!(NanowireSteadyState::new(0.2, 2.0, 0.0, MU, D).is_err());
    }

    #[test]
    fn nanowire_integral_by_quadrature() {
        let w = NanowireSteadyState::new(0.3, 3.0, 0.05, MU, D).unwrap();
        let n = 200_000;
        let h = 3.0 / n as f64;
        let sum: f64 = (0..n).map(|k| w.density((k as f64 + 0.5) * h)).sum::<f64>() * h * 0.09;
        assert_relative_eq!(sum, w.total_probability(), max_relative = 1e-8);
    }

    #[test]
    fn feasibility_roots_at_reference_width() {
        let (lo, hi) = feasibility_roots(0.2, 50.0, MU, D);
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        assert!((lo - 0.063).abs() / 0.063 < 0.05, "lower {lo}");
        assert!((hi - 0.62).abs() < 0.01, "upper {hi}");
        assert_relative_eq!(capturer_density(0.2, lo, MU, D), 50.0, max_relative = 1e-9);
        assert_relative_eq!(capturer_density(0.2, hi, MU, D), 50.0, max_relative = 1e-9);
        // 1022.7·E·exp(−4.0909·E) form
        let g = |e: f64| 450.0 / (11.0 * 0.04) * e * (-450.0 * 0.1 / 11.0 * e).exp();
        assert_relative_eq!(g(lo), 50.0, max_relative = 1e-9);
        assert_eq!(feasibility_roots(0.2, 100.0, MU, D), (None, None));
        assert_eq!(feasibility_roots(0.2, 0.0, MU, D), (Some(0.0), Some(f64::INFINITY)));
    }

    #[test]
    fn scan_matches_roots_within_a_cell() {
        let widths: Vec<f64> = (1..=10).map(|k| 0.05 * k as f64).collect();
        let fields: Vec<f64> = (1..=400).map(|k| 0.0025 * k as f64).collect();
        let map = feasibility_region(&widths, &fields, 50.0, MU, D).unwrap();
        for b in &map.boundaries {
            match (b.lower, b.grid_lower) {
                (Some(r), Some(g)) => assert!((r - g).abs() <= 0.0025 + 1e-12, "{b:?}"),
                (None, None) => {}
                (Some(r), None) => assert!(b.upper.unwrap() - r < 0.0025, "{b:?}"),
                (None, Some(_)) => panic!("grid found a point the roots missed: {b:?}"),
            }
            if let (Some(r), Some(g)) = (b.upper, b.grid_upper) {
                if r < 1.0 {
                    assert!((r - g).abs() <= 0.0025 + 1e-12, "{b:?}");
                }
            }
        }
        assert!(!map.is_empty());
        let everything = feasibility_region(&widths, &fields, 0.0, MU, D).unwrap();
        assert!((0..widths.len()).all(|i| (0..fields.len()).all(|j| everything.feasible(i, j))));
        assert!(feasibility_region(&[], &fields, 50.0, MU, D).is_err());
        assert!(feasibility_region(&[-1.0], &fields, 50.0, MU, D).is_err());
    }
}
