use nalgebra::{Complex, DMatrix};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Cartesian spin operators for spin j = two_j/2 in the descending m basis
/// (m = j, j-1, ..., -j).
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl SpinOperators {
    pub fn new(two_j: u32) -> Self {
        let dim = two_j as usize + 1;
        let j = two_j as f64 / 2.0;
        let m = |idx: usize| j - idx as f64;
        let mut z = CMatrix::zeros(dim, dim);
        let mut plus = CMatrix::zeros(dim, dim);
        for idx in 0..dim {
            z[(idx, idx)] = C64::new(m(idx), 0.0);
            // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits at idx-1.
            if idx > 0 {
                let mm = m(idx);
                plus[(idx - 1, idx)] = C64::new((j * (j + 1.0) - mm * (mm + 1.0)).sqrt(), 0.0);
            }
        }
        let minus = plus.adjoint();
        let x = (&plus + &minus) * C64::new(0.5, 0.0);
        let y = (&plus - &minus) * C64::new(0.0, -0.5);
        Self { x, y, z }
    }

    pub fn dim(&self) -> usize {
        self.z.nrows()
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim())
    }

    pub fn component(&self, axis: usize) -> &CMatrix {
        match axis {
            0 => &self.x,
            1 => &self.y,
            _ => &self.z,
        }
    }
}

pub(crate) fn real(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// Relative anti-Hermitian part ‖H − H†‖_F / ‖H‖_F (0 for the zero matrix).
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / norm
}
