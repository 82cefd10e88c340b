//! Plain-text grid dumps and CSV trajectories.

use std::fmt::Write as _;

use super::domain::Grid;
use super::solver::{TrajectoryPoint, TransportState};
use super::TransportError;

pub const TRAJECTORY_HEADER: &str =
    "t_ns,mean_x_um,mean_y_um,mean_z_um,spread_um,n_i,n_c,conservation_error";

/// Header lines (`dims`, `spacing`, `origin`, `time`, `n_i`, `n_c`) then one
/// density value per line, z-fastest.
pub fn write_grid_dump(grid: &Grid, state: &TransportState) -> String {
    let mut out = String::with_capacity(state.rho.len() * 24 + 256);
    let [nx, ny, nz] = grid.dims;
    let [dx, dy, dz] = grid.spacing;
    let [x0, y0, z0] = grid.origin;
    let _ = writeln!(out, "# density grid, um^-3, z-fastest");
    let _ = writeln!(out, "dims {nx} {ny} {nz}");
    let _ = writeln!(out, "spacing {dx} {dy} {dz}");
    let _ = writeln!(out, "origin {x0} {y0} {z0}");
    let _ = writeln!(out, "time {}", state.t);
    let _ = writeln!(out, "n_i {}", state.n_i);
    let _ = writeln!(out, "n_c {}", state.n_c);
    for v in &state.rho {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn read_grid_dump(text: &str) -> Result<(Grid, TransportState), TransportError> {
    let bad = |m: String| TransportError::Format(m);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let mut header = |key: &str, n: usize| -> Result<Vec<f64>, TransportError> {
        let line = lines.next().ok_or_else(|| bad(format!("missing `{key}` line")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(bad(format!("expected `{key}`, got `{line}`")));
        }
        let vals: Vec<f64> = parts
            .map(|p| p.parse::<f64>().map_err(|_| bad(format!("bad number `{p}` in `{key}`"))))
            .collect::<Result<_, _>>()?;
        if vals.len() != n {
            return Err(bad(format!("`{key}` needs {n} values")));
        }
        Ok(vals)
    };
    let dims = header("dims", 3)?;
    let spacing = header("spacing", 3)?;
    let origin = header("origin", 3)?;
    let t = header("time", 1)?[0];
    let n_i = header("n_i", 1)?[0];
    let n_c = header("n_c", 1)?[0];
    let dims = [dims[0] as usize, dims[1] as usize, dims[2] as usize];
    let grid = Grid::new(dims, [spacing[0], spacing[1], spacing[2]], [origin[0], origin[1], origin[2]])?;
    let rho: Vec<f64> = lines
        .map(|l| l.trim().parse::<f64>().map_err(|_| bad(format!("bad density `{l}`"))))
        .collect::<Result<_, _>>()?;
    if rho.len() != grid.len() {
        return Err(bad(format!("expected {} values, found {}", grid.len(), rho.len())));
    }
    Ok((grid, TransportState { rho, n_i, n_c, t }))
}

pub fn write_trajectory_csv(points: &[TrajectoryPoint]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            p.t, p.mean[0], p.mean[1], p.mean[2], p.spread, p.n_i, p.n_c, p.conservation_error
        );
    }
    out
}
