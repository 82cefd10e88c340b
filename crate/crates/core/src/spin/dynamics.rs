//! Time evolution and dephasing estimates.

use nalgebra::DVector;

use super::hamiltonian::{SpinHamiltonian, TWO_PI};
use super::operators::{real, CMatrix, SpinOperators, C64};
use super::SpinError;
use crate::params::GAMMA_E_MHZ_PER_G;

pub type StateVector = DVector<C64>;

const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephasingMechanism {
    HyperfineIonization,
    ZeroFieldD,
    NuclearFlip,
    TransportElliottYafet,
}

/// A dephasing timescale together with the retained coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingEstimate {
    /// ns; infinite when the mechanism is inactive.
    pub timescale: f64,
    pub mechanism: DephasingMechanism,
    /// Magnitude of the retained off-diagonal coherence, in [0, 1].
    pub coherence_factor: f64,
}

/// ψ(t) = exp(−2πi·H·t)·ψ₀ with H in GHz and t in ns.
pub fn evolve(h: &SpinHamiltonian, psi0: &StateVector, t: f64) -> Result<StateVector, SpinError> {
    if psi0.len() != h.dim() {
        return Err(SpinError::DimensionMismatch {
            expected: h.dim(),
            found: psi0.len(),
        });
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(SpinError::Unnormalized(norm));
    }
    let spectrum = h.spectrum();
    let v = &spectrum.states;
    let mut amplitudes = v.adjoint() * psi0;
    for (k, e) in spectrum.energies.iter().enumerate() {
        amplitudes[k] *= C64::from_polar(1.0, -TWO_PI * e * t);
    }
    Ok(v * amplitudes)
}

fn check_normalized(alpha: C64, beta: C64) -> Result<(), SpinError> {
    let norm2 = alpha.norm_sqr() + beta.norm_sqr();
    if (norm2 - 1.0).abs() > NORM_TOLERANCE {
        return Err(SpinError::Unnormalized(norm2.sqrt()));
    }
    Ok(())
}

/// Per-electron Hamiltonian of the NV two-electron product state
/// (α|↑⟩+β|↓⟩)⊗(α|↑⟩+β|↓⟩): γ_e s_z B + D(|α|²−|β|²) s_z.
///
/// The estimate's timescale is 1/(D·||α|²−|β|²|). Its coherence factor is
/// the slow-ionization limit: 1 when the D-term vanishes, 0 otherwise. Use
/// [`phase_averaged_coherence`] for a finite ionization rate.
pub fn separated_nv_hamiltonian(
    alpha: C64,
    beta: C64,
    d_ghz: f64,
    b_gauss: f64,
) -> Result<(SpinHamiltonian, DephasingEstimate), SpinError> {
    check_normalized(alpha, beta)?;
    let imbalance = alpha.norm_sqr() - beta.norm_sqr();
    let s = SpinOperators::new(1);
    let coefficient = GAMMA_E_MHZ_PER_G * 1e-3 * b_gauss + d_ghz * imbalance;
    let h = SpinHamiltonian::new(&s.z * real(coefficient), 1, 0)?;
    let splitting = d_ghz * imbalance.abs();
    let estimate = if splitting <= 1e-12 * d_ghz.abs().max(1.0) {
        DephasingEstimate {
            timescale: f64::INFINITY,
            mechanism: DephasingMechanism::ZeroFieldD,
            coherence_factor: 1.0,
        }
    } else {
        DephasingEstimate {
            timescale: 1.0 / splitting,
            mechanism: DephasingMechanism::ZeroFieldD,
            coherence_factor: 0.0,
        }
    };
    Ok((h, estimate))
}

/// Triplet amplitudes (c₊₁, c₀, c₋₁) = (α², √2·αβ, β²) of the two-electron
/// product state.
pub fn product_state_expansion(alpha: C64, beta: C64) -> Result<[C64; 3], SpinError> {
    check_normalized(alpha, beta)?;
    Ok([
        alpha * alpha,
        alpha * beta * std::f64::consts::SQRT_2,
        beta * beta,
    ])
}

/// |⟨e^{−iωt}⟩| for an exponentially distributed time with rate k (1/ns):
/// k/√(k² + ω²).
pub fn phase_averaged_coherence(omega: f64, rate: f64) -> f64 {
    if rate.is_infinite() || omega == 0.0 {
        return 1.0;
    }
    rate / (rate * rate + omega * omega).sqrt()
}

/// Dephasing of a donor electron through a hyperfine coupling (MHz) while
/// the ionization time is exponentially distributed with the given rate.
pub fn ionization_dephasing(coupling_mhz: f64, rate_per_ns: f64) -> Result<DephasingEstimate, SpinError> {
    if !(rate_per_ns > 0.0) {
        return Err(SpinError::Domain(format!(
            "ionization rate must be positive, got {rate_per_ns}"
        )));
    }
    let omega = TWO_PI * coupling_mhz.abs() * 1e-3;
    Ok(DephasingEstimate {
        timescale: if omega == 0.0 { f64::INFINITY } else { 1.0 / omega },
        mechanism: DephasingMechanism::HyperfineIonization,
        coherence_factor: phase_averaged_coherence(omega, rate_per_ns),
    })
}

/// Elliott–Yafet relaxation during transport: coherence e^(−t/T₂).
pub fn transport_dephasing(t_ns: f64, t2_ns: f64) -> DephasingEstimate {
    DephasingEstimate {
        timescale: t2_ns,
        mechanism: DephasingMechanism::TransportElliottYafet,
        coherence_factor: (-t_ns.max(0.0) / t2_ns).exp(),
    }
}

/// Loss of the m_I = 0 preparation at a nuclear-flip rate (MHz) over a window.
pub fn nuclear_flip_dephasing(flip_rate_mhz: f64, window_ns: f64) -> DephasingEstimate {
    let rate = flip_rate_mhz.abs() * 1e-3;
    DephasingEstimate {
        timescale: if rate == 0.0 { f64::INFINITY } else { 1.0 / rate },
        mechanism: DephasingMechanism::NuclearFlip,
        coherence_factor: (-rate * window_ns.max(0.0)).exp(),
    }
}

/// Projector-free expectation ⟨ψ|O|ψ⟩.
pub fn expectation(op: &CMatrix, psi: &StateVector) -> C64 {
    (psi.adjoint() * op * psi)[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::hamiltonian::nv_hamiltonian;
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn evolve_identity_at_zero_time() {
        let h = nv_hamiltonian(2.87, 300.0);
        let psi = StateVector::from_vec(vec![c(0.6), C64::new(0.0, 0.8), c(0.0)]);
        let out = evolve(&h, &psi, 0.0).unwrap();
        assert!((out - &psi).norm() < 1e-12);
    }

    #[test]
    fn evolve_eigenstate_picks_up_phase_only() {
        let h = nv_hamiltonian(2.87, 120.0);
        let psi = StateVector::from_vec(vec![c(0.0), c(1.0), c(0.0)]);
        let out = evolve(&h, &psi, 3.7).unwrap();
        let overlap = (psi.adjoint() * &out)[(0, 0)];
        assert_relative_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn evolve_relative_phase_pi() {
        let h = nv_hamiltonian(2.87, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_vec(vec![c(s), c(s), c(0.0)]);
        let out = evolve(&h, &psi, 1.0 / (2.0 * 2.87)).unwrap();
        let rel = out[0] / out[1];
        assert_relative_eq!(rel.arg().abs(), std::f64::consts::PI, epsilon = 1e-9);
        assert_relative_eq!(out.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn evolve_errors() {
        let h = nv_hamiltonian(2.87, 0.0);
        let short = StateVector::from_vec(vec![c(1.0), c(0.0)]);
        assert!(matches!(evolve(&h, &short, 1.0), Err(SpinError::DimensionMismatch { .. })));
        let unnorm = StateVector::from_vec(vec![c(1.0), c(1.0), c(0.0)]);
        assert!(matches!(evolve(&h, &unnorm, 1.0), Err(SpinError::Unnormalized(_))));
    }

    #[test]
    fn separated_balanced_subspace_does_not_dephase() {
        let s = c(std::f64::consts::FRAC_1_SQRT_2);
        let (h, est) = separated_nv_hamiltonian(s, s, 2.87, 0.0).unwrap();
        assert!(est.timescale.is_infinite());
        assert_eq!(est.coherence_factor, 1.0);
        assert!(h.matrix().norm() < 1e-15);
    }

    #[test]
    fn separated_polarized_state() {
        let (h, est) = separated_nv_hamiltonian(c(1.0), c(0.0), 2.87, 0.0).unwrap();
        assert_relative_eq!(est.timescale, 1.0 / 2.87, epsilon = 1e-12);
        assert!((est.timescale - 0.35).abs() < 0.005);
        assert_relative_eq!(h.element(0, 0).re, 2.87 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn separated_three_quarter_state() {
        let (h, est) =
            separated_nv_hamiltonian(c(3f64.sqrt() / 2.0), c(0.5), 2.87, 0.0).unwrap();
        assert_relative_eq!(est.timescale, 2.0 / 2.87, epsilon = 1e-12);
        // coefficient of s_z is D/2, so the |↑⟩ entry is D/4
        assert_relative_eq!(h.element(0, 0).re, 2.87 / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn separated_rejects_unnormalized() {
        assert!(separated_nv_hamiltonian(c(1.0), c(1.0), 2.87, 0.0).is_err());
    }

    #[test]
    fn product_state_examples() {
        let p = product_state_expansion(c(1.0), c(0.0)).unwrap();
        assert_eq!(p, [c(1.0), c(0.0), c(0.0)]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = product_state_expansion(c(s), c(s)).unwrap();
        assert_relative_eq!(p[0].re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(p[1].re, s, epsilon = 1e-15);
        assert_relative_eq!(p[2].re, 0.5, epsilon = 1e-15);
        assert!(product_state_expansion(c(0.5), c(0.5)).is_err());
    }

    #[test]
    fn ionization_dephasing_examples() {
        let est = ionization_dephasing(0.0, 1.0).unwrap();
        assert_eq!(est.coherence_factor, 1.0);
        let est = ionization_dephasing(100.0, 1.0).unwrap();
        assert_relative_eq!(est.timescale, 1.0 / (0.2 * std::f64::consts::PI), epsilon = 1e-12);
        assert!((est.timescale - 1.6).abs() < 0.01);
        let omega = 0.2 * std::f64::consts::PI;
        assert_relative_eq!(est.coherence_factor, 1.0 / (1.0 + omega * omega).sqrt(), epsilon = 1e-12);
        assert!((est.coherence_factor - 0.847).abs() < 1e-3);
        assert!(ionization_dephasing(100.0, 0.0).is_err());
    }

    #[test]
    fn coherence_factor_matches_phase_average_quadrature() {
        // Independent check: ∫ k e^{-kt} e^{-iωt} dt by midpoint quadrature.
        let (k, omega): (f64, f64) = (0.7, 2.3);
        let dt = 1e-4;
        let mut acc = C64::new(0.0, 0.0);
        let mut t = dt / 2.0;
        while t < 60.0 / k {
            acc += C64::from_polar(k * (-k * t).exp() * dt, -omega * t);
            t += dt;
        }
        assert_relative_eq!(acc.norm(), phase_averaged_coherence(omega, k), epsilon = 1e-6);
    }

    #[test]
    fn transport_and_flip_factors() {
        assert_relative_eq!(transport_dephasing(80.0, 180.0).coherence_factor, (-80.0f64 / 180.0).exp());
        assert_eq!(transport_dephasing(0.0, 180.0).coherence_factor, 1.0);
        assert_relative_eq!(nuclear_flip_dephasing(1.0, 1000.0).coherence_factor, (-1.0f64).exp());
        assert!(nuclear_flip_dephasing(0.0, 1000.0).timescale.is_infinite());
    }
}
