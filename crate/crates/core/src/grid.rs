//! Uniform rectangular grid and the model vector living on it.
//!
//! Nodes are ordered lexicographically with the vertical (z) index running
//! fastest, so that the horizontal difference operator factorises as
//! `D_x = D_{n1} (x) I_{n2}` and the vertical one as `D_z = I_{n1} (x) D_{n2}`.

use crate::error::{FwiError, Result};
use serde::{Deserialize, Serialize};

/// Classification of a grid node by its position on the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Edge,
    Corner,
}

/// Uniform rectangular 2D grid on `[0, width_x] x [0, width_z]`.
///
/// `n1` nodes along x (horizontal), `n2` along z (vertical, increasing with
/// depth). Lengths are in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n1: usize,
    pub n2: usize,
    pub width_x: f64,
    pub width_z: f64,
    pub hx: f64,
    pub hz: f64,
}

/// Build a grid, rejecting degenerate node counts or extents.
pub fn build_grid(n1: usize, n2: usize, width_x: f64, width_z: f64) -> Result<Grid> {
    if n1 < 2 || n2 < 2 {
        return Err(FwiError::DegenerateGrid(format!(
            "need at least 2 nodes per direction, got {n1} x {n2}"
        )));
    }
    if !(width_x > 0.0) || !(width_z > 0.0) {
        return Err(FwiError::DegenerateGrid(format!(
            "widths must be positive, got {width_x} x {width_z}"
        )));
    }
    Ok(Grid {
        n1,
        n2,
        width_x,
        width_z,
        hx: width_x / (n1 - 1) as f64,
        hz: width_z / (n2 - 1) as f64,
    })
}

impl Grid {
    /// Total number of nodes.
    pub fn num_nodes(&self) -> usize {
        self.n1 * self.n2
    }

    /// Flat index of node (i, j); z runs fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n1 && j < self.n2);
        i * self.n2 + j
    }

    /// Inverse of [`Grid::index`].
    #[inline]
    pub fn coords_of(&self, k: usize) -> (usize, usize) {
        (k / self.n2, k % self.n2)
    }

    /// Physical position of node (i, j).
    #[inline]
    pub fn position(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx, j as f64 * self.hz)
    }

    pub fn classify(&self, i: usize, j: usize) -> NodeClass {
        let on_x = i == 0 || i == self.n1 - 1;
        let on_z = j == 0 || j == self.n2 - 1;
        match (on_x, on_z) {
            (true, true) => NodeClass::Corner,
            (false, false) => NodeClass::Interior,
            _ => NodeClass::Edge,
        }
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = self.coords_of(k);
        self.classify(i, j) != NodeClass::Interior
    }

    /// True if (x, z) lies inside the closed rectangle.
    pub fn contains(&self, x: f64, z: f64) -> bool {
        (0.0..=self.width_x).contains(&x) && (0.0..=self.width_z).contains(&z)
    }

    /// True if (x, z) lies strictly inside the rectangle.
    pub fn contains_strictly(&self, x: f64, z: f64) -> bool {
        x > 0.0 && x < self.width_x && z > 0.0 && z < self.width_z
    }

    /// Grid refined by an integer factor: every cell is subdivided
    /// `factor` times in each direction; node positions are preserved.
    pub fn refined(&self, factor: usize) -> Grid {
        assert!(factor >= 1);
        Grid {
            n1: factor * (self.n1 - 1) + 1,
            n2: factor * (self.n2 - 1) + 1,
            width_x: self.width_x,
            width_z: self.width_z,
            hx: self.hx / factor as f64,
            hz: self.hz / factor as f64,
        }
    }
}

/// Squared-slowness model vector (s^2/km^2), one value per grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub values: Vec<f64>,
}

impl Model {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(FwiError::Config(
                "model values must be positive and finite".into(),
            ));
        }
        Ok(Model { values })
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Model {
            values: vec![value; grid.num_nodes()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// Bilinear interpolation of the nodal values onto a grid refined by
    /// `factor`. Exact at coarse nodes.
    pub fn prolong(&self, grid: &Grid, factor: usize) -> Model {
        let fine = grid.refined(factor);
        let mut out = vec![0.0; fine.num_nodes()];
        let f = factor as f64;
        for fi in 0..fine.n1 {
            // coarse cell and local coordinate along x
            let (ci, tx) = split_fine_index(fi, factor, grid.n1);
            for fj in 0..fine.n2 {
                let (cj, tz) = split_fine_index(fj, factor, grid.n2);
                let _ = f;
                let v00 = self.values[grid.index(ci, cj)];
                let v10 = self.values[grid.index(ci + 1, cj)];
                let v01 = self.values[grid.index(ci, cj + 1)];
                let v11 = self.values[grid.index(ci + 1, cj + 1)];
                out[fine.index(fi, fj)] = (1.0 - tx) * (1.0 - tz) * v00
                    + tx * (1.0 - tz) * v10
                    + (1.0 - tx) * tz * v01
                    + tx * tz * v11;
            }
        }
        Model { values: out }
    }
}

/// Map a fine node index to its coarse cell and local coordinate in [0, 1].
fn split_fine_index(fi: usize, factor: usize, n_coarse: usize) -> (usize, f64) {
    let mut c = fi / factor;
    let mut r = fi % factor;
    if c >= n_coarse - 1 {
        // last fine node sits on the final coarse node
        c = n_coarse - 2;
        r = factor;
    }
    (c, r as f64 / factor as f64)
}
