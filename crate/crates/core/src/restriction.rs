//! Smoothed sensor evaluation: sliding bicubic interpolation of nodal
//! wavefields at sensor positions, its transpose, and the spatial
//! derivative of the interpolant.
//!
//! Each sensor coordinate selects the four nearest nodes in that direction
//! (shifted inward near the boundary so four nodes are always available);
//! 2D weights are tensor products of 1D Lagrange-cubic weights. Values are
//! continuous as the stencil slides; derivatives jump at stencil switches.

use crate::error::{FwiError, Result};
use crate::grid::Grid;
use crate::helmholtz::cell_of;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Bounds and mobility of a single sensor coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordSpec {
    pub frozen: bool,
    pub lo: f64,
    pub hi: f64,
}

impl CoordSpec {
    pub fn frozen() -> Self {
        CoordSpec {
            frozen: true,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn free(lo: f64, hi: f64) -> Self {
        CoordSpec { frozen: false, lo, hi }
    }
}

/// Sensor positions with per-coordinate freeze flags and bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSet {
    /// (x, z) per sensor, km.
    pub points: Vec<(f64, f64)>,
    /// (x spec, z spec) per sensor.
    pub specs: Vec<(CoordSpec, CoordSpec)>,
}

impl SensorSet {
    /// All coordinates frozen (fixed acquisition).
    pub fn fixed(points: Vec<(f64, f64)>) -> Self {
        let specs = vec![(CoordSpec::frozen(), CoordSpec::frozen()); points.len()];
        SensorSet { points, specs }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        for &(x, z) in &self.points {
            if !grid.contains_strictly(x, z) {
                return Err(FwiError::OutOfDomain { x, z });
            }
        }
        for (j, ((sx, sz), &(x, z))) in self.specs.iter().zip(&self.points).enumerate() {
            for (spec, v) in [(sx, x), (sz, z)] {
                if !spec.frozen && !(spec.lo <= v && v <= spec.hi) {
                    return Err(FwiError::Config(format!(
                        "sensor {j}: free coordinate {v} outside [{}, {}]",
                        spec.lo, spec.hi
                    )));
                }
            }
        }
        Ok(())
    }

    /// Flat list of free coordinates as (sensor, axis) pairs; axis 0 is x.
    pub fn free_coords(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, (sx, sz)) in self.specs.iter().enumerate() {
            if !sx.frozen {
                out.push((j, 0));
            }
            if !sz.frozen {
                out.push((j, 1));
            }
        }
        out
    }

    pub fn coord(&self, j: usize, axis: usize) -> f64 {
        let (x, z) = self.points[j];
        if axis == 0 {
            x
        } else {
            z
        }
    }

    pub fn set_coord(&mut self, j: usize, axis: usize, v: f64) {
        let p = &mut self.points[j];
        if axis == 0 {
            p.0 = v;
        } else {
            p.1 = v;
        }
    }
}

/// 1D window of four consecutive nodes plus Lagrange-cubic weights for
/// value and derivative at a point.
#[derive(Debug, Clone, Copy)]
struct Window {
    start: usize,
    w: [f64; 4],
    dw: [f64; 4],
}

fn window_1d(p: f64, h: f64, n: usize) -> Window {
    debug_assert!(n >= 4, "bicubic restriction needs at least 4 nodes per direction");
    let cell = cell_of(p, h, n);
    // nominal window {cell-1 .. cell+2}, clamped inside the grid
    let start = cell.saturating_sub(1).min(n - 4);
    let t = p / h - start as f64;
    // Lagrange cubics on nodes {0,1,2,3} in local coordinates
    let w = [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ];
    let dt = [
        -((t - 2.0) * (t - 3.0) + (t - 1.0) * (t - 3.0) + (t - 1.0) * (t - 2.0)) / 6.0,
        ((t - 2.0) * (t - 3.0) + t * (t - 3.0) + t * (t - 2.0)) / 2.0,
        -((t - 1.0) * (t - 3.0) + t * (t - 3.0) + t * (t - 1.0)) / 2.0,
        ((t - 1.0) * (t - 2.0) + t * (t - 1.0) + t * (t - 2.0)) / 6.0,
    ];
    let dw = [dt[0] / h, dt[1] / h, dt[2] / h, dt[3] / h];
    Window { start, w, dw }
}

/// Per-sensor 4x4 interpolation stencil (node block plus value and
/// derivative weights).
#[derive(Debug, Clone)]
pub struct RestrictionStencil {
    pub grid: Grid,
    sensors: Vec<SensorStencil>,
}

#[derive(Debug, Clone)]
struct SensorStencil {
    nodes: [usize; 16],
    w: [f64; 16],
    wx: [f64; 16],
    wz: [f64; 16],
}

/// Build the stencil for every sensor in the set.
pub fn build_stencil(grid: &Grid, sensors: &SensorSet) -> Result<RestrictionStencil> {
    sensors.validate(grid)?;
    if grid.n1 < 4 || grid.n2 < 4 {
        return Err(FwiError::Config(
            "bicubic restriction needs at least a 4x4 grid".into(),
        ));
    }
    let mut out = Vec::with_capacity(sensors.len());
    for &(x, z) in &sensors.points {
        let wx = window_1d(x, grid.hx, grid.n1);
        let wz = window_1d(z, grid.hz, grid.n2);
        let mut nodes = [0usize; 16];
        let mut w = [0.0; 16];
        let mut dwx = [0.0; 16];
        let mut dwz = [0.0; 16];
        let mut idx = 0;
        for a in 0..4 {
            for b in 0..4 {
                nodes[idx] = grid.index(wx.start + a, wz.start + b);
                w[idx] = wx.w[a] * wz.w[b];
                dwx[idx] = wx.dw[a] * wz.w[b];
                dwz[idx] = wx.w[a] * wz.dw[b];
                idx += 1;
            }
        }
        out.push(SensorStencil {
            nodes,
            w,
            wx: dwx,
            wz: dwz,
        });
    }
    Ok(RestrictionStencil {
        grid: *grid,
        sensors: out,
    })
}

/// Evaluate the bicubic interpolant of `u` at every sensor.
pub fn restrict(stencil: &RestrictionStencil, u: &[Complex64]) -> Vec<Complex64> {
    stencil
        .sensors
        .iter()
        .map(|s| {
            let mut acc = Complex64::ZERO;
            for k in 0..16 {
                acc += s.w[k] * u[s.nodes[k]];
            }
            acc
        })
        .collect()
}

/// Transpose action: scatter sensor values back to the nodes with the same
/// weights, so that `<R u, z> = <u, R^T z>` holds exactly.
pub fn restrict_adjoint(
    stencil: &RestrictionStencil,
    z: &[Complex64],
    num_nodes: usize,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; num_nodes];
    for (s, zv) in stencil.sensors.iter().zip(z) {
        for k in 0..16 {
            out[s.nodes[k]] += s.w[k] * zv;
        }
    }
    out
}

/// Derivative of the interpolant of `u` at sensor `j` along `axis`
/// (0 = x, 1 = z).
pub fn sensor_derivative(
    stencil: &RestrictionStencil,
    u: &[Complex64],
    j: usize,
    axis: usize,
) -> Complex64 {
    let s = &stencil.sensors[j];
    let w = if axis == 0 { &s.wx } else { &s.wz };
    let mut acc = Complex64::ZERO;
    for k in 0..16 {
        acc += w[k] * u[s.nodes[k]];
    }
    acc
}
