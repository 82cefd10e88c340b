use super::TransportError;

/// Uniform cell-centered box grid. Cell (i, j, k) spans
/// `origin + [i, i+1]·dx` and so on; storage is z-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
}

impl Grid {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self, TransportError> {
        if dims.iter().any(|&n| n == 0) {
            return Err(TransportError::Domain(format!("grid dims must be positive, got {dims:?}")));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(TransportError::Domain(format!(
                "grid spacing must be positive, got {spacing:?}"
            )));
        }
        Ok(Self { dims, spacing, origin })
    }

    /// Grid covering the box `[lo, hi]` with the given cell counts.
    pub fn spanning(lo: [f64; 3], hi: [f64; 3], dims: [usize; 3]) -> Result<Self, TransportError> {
        let mut spacing = [0.0; 3];
        for d in 0..3 {
            spacing[d] = (hi[d] - lo[d]) / dims[d].max(1) as f64;
        }
        Self::new(dims, spacing, lo)
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let ij = idx / self.dims[2];
        [ij / self.dims[1], ij % self.dims[1], k]
    }

    pub fn center(&self, cell: [usize; 3]) -> [f64; 3] {
        std::array::from_fn(|d| self.origin[d] + (cell[d] as f64 + 0.5) * self.spacing[d])
    }

    pub fn upper(&self) -> [f64; 3] {
        std::array::from_fn(|d| self.origin[d] + self.dims[d] as f64 * self.spacing[d])
    }

    /// Cell containing a point; points on the upper faces belong to the last cell.
    pub fn cell_of(&self, p: [f64; 3]) -> Option<[usize; 3]> {
        let mut cell = [0; 3];
        for d in 0..3 {
            let s = (p[d] - self.origin[d]) / self.spacing[d];
            if !(s >= 0.0 && s <= self.dims[d] as f64) {
                return None;
            }
            cell[d] = (s.floor() as usize).min(self.dims[d] - 1);
        }
        Some(cell)
    }

    pub fn half_diagonal(&self) -> f64 {
        0.5 * self.spacing.iter().map(|h| h * h).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Material occupies x ≥ 0; the grid truncates the other directions.
    HalfSpace,
    /// Rectangular wire of cross-section l×l along z, length L.
    Nanowire { width: f64, length: f64 },
    FreeSpace,
}

/// Geometry, grid, applied field and center positions. Every grid face is
/// a zero-flux boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportDomain {
    pub geometry: Geometry,
    pub grid: Grid,
    /// Applied field in V/μm. Electrons drift along −E.
    pub e_applied: [f64; 3],
    pub r_injector: [f64; 3],
    pub r_capturer: [f64; 3],
}

impl TransportDomain {
    /// Wire occupying [0, l]² × [0, L] with the field pulling electrons toward
    /// the z = L endface. The injector sits l/2 from the z = 0 end and the
    /// capturer l/2 from the far endface.
    pub fn nanowire(
        width: f64,
        length: f64,
        field: f64,
        transverse_cells: usize,
        axial_cells: usize,
    ) -> Result<Self, TransportError> {
        if !(width > 0.0 && length > 0.0) {
            return Err(TransportError::Domain(format!(
                "nanowire dimensions must be positive (l = {width}, L = {length})"
            )));
        }
        if !(length > width) {
            return Err(TransportError::Domain("nanowire must be longer than it is wide".into()));
        }
        let grid = Grid::spanning(
            [0.0; 3],
            [width, width, length],
            [transverse_cells, transverse_cells, axial_cells],
        )?;
        let c = width / 2.0;
        Ok(Self {
            geometry: Geometry::Nanowire { width, length },
            grid,
            e_applied: [0.0, 0.0, -field],
            r_injector: [c, c, width / 2.0],
            r_capturer: [c, c, length - width / 2.0],
        })
    }

    /// Half-space box `[0, x_max] × [−y_width/2, y_width/2] × [z_lo, z_hi]`
    /// with uniform field −E ẑ and the injector at x_I x̂.
    pub fn half_space(
        x_injector: f64,
        field: f64,
        x_max: f64,
        y_width: f64,
        z_range: (f64, f64),
        dims: [usize; 3],
    ) -> Result<Self, TransportError> {
        let grid = Grid::spanning(
            [0.0, -y_width / 2.0, z_range.0],
            [x_max, y_width / 2.0, z_range.1],
            dims,
        )?;
        Ok(Self {
            geometry: Geometry::HalfSpace,
            grid,
            e_applied: [0.0, 0.0, -field],
            r_injector: [x_injector, 0.0, 0.0],
            r_capturer: [x_injector, 0.0, z_range.1 - (z_range.1 - z_range.0) / 8.0],
        })
    }

    pub fn injector_cell(&self) -> Result<[usize; 3], TransportError> {
        self.grid
            .cell_of(self.r_injector)
            .ok_or(TransportError::OffGrid("injector"))
    }

    pub fn capturer_cell(&self) -> Result<[usize; 3], TransportError> {
        self.grid
            .cell_of(self.r_capturer)
            .ok_or(TransportError::OffGrid("capturer"))
    }

    /// Injector–capturer separation measured in cells along the
    /// separation's dominant axis.
    pub fn separation_cells(&self) -> f64 {
        (0..3)
            .map(|d| (self.r_capturer[d] - self.r_injector[d]).abs() / self.grid.spacing[d])
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip_is_z_fastest() {
        let g = Grid::new([3, 4, 5], [1.0; 3], [0.0; 3]).unwrap();
        assert_eq!(g.index(0, 0, 1), 1);
        assert_eq!(g.index(0, 1, 0), 5);
        assert_eq!(g.index(1, 0, 0), 20);
        for idx in 0..g.len() {
            let [i, j, k] = g.unravel(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
    }

    #[test]
    fn cell_lookup() {
        let g = Grid::spanning([0.0, -1.0, 0.0], [2.0, 1.0, 4.0], [4, 4, 8]).unwrap();
        assert_eq!(g.cell_of([0.0, -1.0, 0.0]), Some([0, 0, 0]));
        assert_eq!(g.cell_of([2.0, 1.0, 4.0]), Some([3, 3, 7]));
        assert_eq!(g.cell_of([0.6, 0.1, 1.1]), Some([1, 2, 2]));
        assert_eq!(g.cell_of([-0.1, 0.0, 0.0]), None);
        assert_eq!(g.center([0, 0, 0]), [0.25, -0.75, 0.25]);
    }

    #[test]
    fn nanowire_layout() {
        let d = TransportDomain::nanowire(0.2, 2.0, 0.063, 4, 100).unwrap();
        assert_eq!(d.grid.dims, [4, 4, 100]);
        assert!((d.grid.spacing[2] - 0.02).abs() < 1e-15);
        assert!((2.0 - d.r_capturer[2] - 0.1).abs() < 1e-15);
        assert!(d.separation_cells() >= 8.0);
        assert!(TransportDomain::nanowire(0.0, 2.0, 0.1, 4, 10).is_err());
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid::new([0, 1, 1], [1.0; 3], [0.0; 3]).is_err());
        assert!(Grid::new([1, 1, 1], [1.0, 0.0, 1.0], [0.0; 3]).is_err());
    }
}
