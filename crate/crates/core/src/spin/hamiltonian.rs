//! NV and donor spin Hamiltonians.
//!
//! Matrices are in GHz. Hyperfine constants come in MHz and are converted
//! on construction. Product basis ordering is electron-major: index =
//! e_idx·(2I+1) + n_idx with both projections descending.

use std::f64::consts::PI;
use std::fmt;

use log::warn;
use nalgebra::SymmetricEigen;

use super::operators::{hermiticity_error, real, CMatrix, SpinOperators, C64};
use super::SpinError;
use crate::params::{DonorRecord, GAMMA_E_MHZ_PER_G};

const MHZ: f64 = 1e-3;

/// Tetrahedral angle arccos(−1/3) between ⟨111⟩ bond directions.
pub fn tetrahedral_angle() -> f64 {
    (-1.0f64 / 3.0).acos()
}

/// Electron and nuclear projections of one basis state, stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLabel {
    pub two_ms: i32,
    pub two_mi: i32,
}

impl BasisLabel {
    pub fn ms(&self) -> f64 {
        self.two_ms as f64 / 2.0
    }

    pub fn mi(&self) -> f64 {
        self.two_mi as f64 / 2.0
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|ms={:+}, mI={:+}>", self.ms(), self.mi())
    }
}

/// Dense Hermitian spin Hamiltonian in GHz on a labeled product basis.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    matrix: CMatrix,
    basis: Vec<BasisLabel>,
    two_s: u32,
    two_i: u32,
}

/// Sorted eigen-decomposition of a [`SpinHamiltonian`].
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending energies in GHz.
    pub energies: Vec<f64>,
    /// Eigenvectors as columns, in the order of `energies`.
    pub states: CMatrix,
    /// Index groups of (near-)degenerate levels, only groups of size > 1.
    pub degenerate_groups: Vec<Vec<usize>>,
}

/// Relative tolerance used to flag degeneracies.
pub const EIGEN_TOLERANCE: f64 = 1e-10;

impl SpinHamiltonian {
    pub fn new(matrix: CMatrix, two_s: u32, two_i: u32) -> Result<Self, SpinError> {
        let dim = (two_s as usize + 1) * (two_i as usize + 1);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(SpinError::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        let err = hermiticity_error(&matrix);
        if err > 1e-12 {
            return Err(SpinError::NonHermitian(err));
        }
        let mut basis = Vec::with_capacity(dim);
        for e in 0..=two_s as i32 {
            for n in 0..=two_i as i32 {
                basis.push(BasisLabel {
                    two_ms: two_s as i32 - 2 * e,
                    two_mi: two_i as i32 - 2 * n,
                });
            }
        }
        Ok(Self {
            matrix,
            basis,
            two_s,
            two_i,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &[BasisLabel] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn electron_spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn nuclear_spin(&self) -> f64 {
        self.two_i as f64 / 2.0
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Matrix element in GHz.
    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn spectrum(&self) -> Spectrum {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut states = CMatrix::zeros(self.dim(), self.dim());
        for (col, &k) in order.iter().enumerate() {
            states.set_column(col, &eig.eigenvectors.column(k));
        }
        let scale = energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
        let mut degenerate_groups = Vec::new();
        let mut group = vec![0usize];
        for k in 1..energies.len() {
            if (energies[k] - energies[k - 1]).abs() <= EIGEN_TOLERANCE * scale {
                group.push(k);
            } else {
                if group.len() > 1 {
                    degenerate_groups.push(std::mem::take(&mut group));
                }
                group = vec![k];
            }
        }
        if group.len() > 1 {
            degenerate_groups.push(group);
        }
        Spectrum {
            energies,
            states,
            degenerate_groups,
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum().energies
    }
}

fn gamma_e_ghz_per_g() -> f64 {
    GAMMA_E_MHZ_PER_G * MHZ
}

/// NV triplet: D(S_z² − 2/3) + γ_e S_z B in the m_s ∈ {+1, 0, −1} basis.
pub fn nv_hamiltonian(d_ghz: f64, b_gauss: f64) -> SpinHamiltonian {
    let s = SpinOperators::new(2);
    let id = s.identity();
    let m = (&s.z * &s.z - id * real(2.0 / 3.0)) * real(d_ghz)
        + &s.z * real(gamma_e_ghz_per_g() * b_gauss);
    SpinHamiltonian::new(m, 2, 0).expect("NV Hamiltonian is Hermitian")
}

/// Magnetic field (G) at which the m_s = −1 level crosses m_s = 0.
pub fn nv_level_anticrossing_field(d_ghz: f64) -> f64 {
    d_ghz / gamma_e_ghz_per_g()
}

fn axis(angle: f64) -> [f64; 3] {
    [angle.sin(), 0.0, angle.cos()]
}

/// Σ_ab T_ab a_a ⊗ b_b for two operator sets (pass the same set twice for I·T·I).
fn contract(t: &[[f64; 3]; 3], left: &[CMatrix; 3], right: &[CMatrix; 3]) -> CMatrix {
    let n = left[0].nrows();
    let mut out = CMatrix::zeros(n, n);
    for a in 0..3 {
        for b in 0..3 {
            if t[a][b] != 0.0 {
                out += &left[a] * &right[b] * real(t[a][b]);
            }
        }
    }
    out
}

fn axial_tensor(par: f64, perp: f64, n: [f64; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            t[a][b] = (par - perp) * n[a] * n[b] + if a == b { perp } else { 0.0 };
        }
    }
    t
}

struct ProductOps {
    s: [CMatrix; 3],
    i: [CMatrix; 3],
    id: CMatrix,
}

fn product_ops(two_i: u32) -> ProductOps {
    let e = SpinOperators::new(1);
    let n = SpinOperators::new(two_i);
    let ide = e.identity();
    let idn = n.identity();
    let s = [0, 1, 2].map(|k| e.component(k).kronecker(&idn));
    let i = [0, 1, 2].map(|k| ide.kronecker(n.component(k)));
    let id = ide.kronecker(&idn);
    ProductOps { s, i, id }
}

/// Full donor Hamiltonian γ_e s_z B + s·A·I + I·Q·I + γ_n I_z B with the
/// field along z and the defect axis tilted by `orientation_angle` in the
/// xz-plane. The quadrupole term is Q[(n·I)² − I(I+1)/3].
pub fn donor_hamiltonian(
    record: &DonorRecord,
    b_gauss: f64,
    orientation_angle: f64,
) -> Result<SpinHamiltonian, SpinError> {
    if !(b_gauss >= 0.0) {
        return Err(SpinError::Domain(format!("field must be non-negative, got {b_gauss}")));
    }
    let ops = product_ops(record.two_i);
    let n = axis(orientation_angle);
    let a = axial_tensor(record.a_par, record.a_perp, n);
    let mut h = &ops.s[2] * real(GAMMA_E_MHZ_PER_G * b_gauss)
        + contract(&a, &ops.s, &ops.i)
        + &ops.i[2] * real(record.gamma_n() * b_gauss);
    if let (Some(q), true) = (record.q, record.two_i >= 2) {
        let mut qt = axial_tensor(q, 0.0, n);
        for (k, row) in qt.iter_mut().enumerate() {
            row[k] -= q / 3.0;
        }
        h += contract(&qt, &ops.i, &ops.i);
    }
    SpinHamiltonian::new(h * real(MHZ), 1, record.two_i)
}

/// Nuclear quantization-axis rotation α and hyperfine scale χ for a ¹⁴N_S
/// center aligned or misaligned (tetrahedral angle) with the field.
///
/// Principal branch of atan: α ∈ (−π/2, π/2).
pub fn misalignment_angle(a_par: f64, a_perp: f64, aligned: bool) -> Result<(f64, f64), SpinError> {
    if aligned {
        return Ok((0.0, 1.0));
    }
    let theta = tetrahedral_angle();
    let numerator = -(a_par - a_perp) * (2.0 * theta).sin();
    let denominator = a_par + a_perp + (a_par - a_perp) * (2.0 * theta).cos();
    let scale = a_par.abs() + a_perp.abs();
    if denominator.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(SpinError::DegenerateGeometry);
    }
    Ok(((numerator / denominator).atan(), 5.0f64.sqrt() / 3.0))
}

/// Coefficients of the two nuclear-flip-driving terms, in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipTerms {
    /// |Q sinβ cosβ|, coefficient of (I_x I_z + I_z I_x).
    pub quadrupole_mhz: f64,
    /// |γ_n B sin α|, coefficient of I_x.
    pub nuclear_zeeman_mhz: f64,
}

impl FlipTerms {
    pub fn magnitude_mhz(&self) -> f64 {
        self.quadrupole_mhz + self.nuclear_zeeman_mhz
    }
}

/// High-field secular ¹⁴N_S Hamiltonian together with its geometry.
#[derive(Debug, Clone)]
pub struct SecularHamiltonian {
    pub hamiltonian: SpinHamiltonian,
    pub alpha: f64,
    pub chi: f64,
    /// Angle between the rotated nuclear quantization axis and the
    /// quadrupole (defect) axis.
    pub quadrupole_angle: f64,
    pub flip_terms: FlipTerms,
    /// Set when B < 10·A⊥/γ_e and the secular form is unreliable.
    pub weak_field: bool,
}

/// Secular ¹⁴N_S donor Hamiltonian in the electron-z ⊗ rotated-nuclear basis:
///
/// γ_e s_z B + χA∥ s_z I_z + Q[(n'·I)² − 2/3] + γ_n B (I_z cos α + I_x sin α)
///
/// where n' = (sin β, 0, cos β) is the defect axis in the rotated nuclear
/// frame (β = θ + α when misaligned, 0 when aligned).
pub fn donor_secular_hamiltonian(
    record: &DonorRecord,
    b_gauss: f64,
    aligned: bool,
) -> Result<SecularHamiltonian, SpinError> {
    if record.two_i != 2 {
        return Err(SpinError::Unsupported(format!(
            "secular form is specific to the I = 1 ¹⁴N_S center, got {}",
            record.name
        )));
    }
    if !(b_gauss >= 0.0) {
        return Err(SpinError::Domain(format!("field must be non-negative, got {b_gauss}")));
    }
    let weak_field = b_gauss < 10.0 * record.a_perp.abs() / GAMMA_E_MHZ_PER_G;
    if weak_field {
        warn!(
            "B = {b_gauss} G is below 10·A⊥/γ_e = {:.0} G; secular approximation is poor",
            10.0 * record.a_perp.abs() / GAMMA_E_MHZ_PER_G
        );
    }
    let (alpha, chi) = misalignment_angle(record.a_par, record.a_perp, aligned)?;
    let beta = if aligned { 0.0 } else { tetrahedral_angle() + alpha };
    let q = record.q.unwrap_or(0.0);
    let gamma_n_b = record.gamma_n() * b_gauss;

    let ops = product_ops(2);
    let (ix, iz, sz) = (&ops.i[0], &ops.i[2], &ops.s[2]);
    let h = sz * real(GAMMA_E_MHZ_PER_G * b_gauss)
        + sz * iz * real(chi * record.a_par)
        + (iz * iz * real(beta.cos().powi(2)) + ix * ix * real(beta.sin().powi(2))
            - &ops.id * real(2.0 / 3.0))
            * real(q)
        + (ix * iz + iz * ix) * real(q * beta.sin() * beta.cos())
        + iz * real(gamma_n_b * alpha.cos())
        + ix * real(gamma_n_b * alpha.sin());
    let hamiltonian = SpinHamiltonian::new(h * real(MHZ), 1, 2)?;
    Ok(SecularHamiltonian {
        hamiltonian,
        alpha,
        chi,
        quadrupole_angle: beta,
        flip_terms: FlipTerms {
            quadrupole_mhz: (q * beta.sin() * beta.cos()).abs(),
            nuclear_zeeman_mhz: (gamma_n_b * alpha.sin()).abs(),
        },
        weak_field,
    })
}

/// Largest |ΔE| (MHz) between the sorted spectra of two Hamiltonians.
pub fn max_eigenvalue_deviation_mhz(a: &SpinHamiltonian, b: &SpinHamiltonian) -> f64 {
    a.eigenvalues()
        .iter()
        .zip(b.eigenvalues())
        .map(|(x, y)| (x - y).abs() / MHZ)
        .fold(0.0, f64::max)
}

/// 2π, for converting GHz to angular frequency in rad/ns.
pub(crate) const TWO_PI: f64 = 2.0 * PI;
