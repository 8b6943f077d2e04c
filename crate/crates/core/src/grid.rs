//! Cell-centered radial mesh and the finite-difference stencils built on it.
//!
//! Nodes sit at `r_i = (i + 1/2) h` for `i = 0..cell_count`, so no node
//! coincides with the coordinate singularity at the origin. Fields are
//! continued oddly through `r = 0`, i.e. the ghost value at `-h/2` is
//! `-values[0]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of cells; the one-sided outer stencils need four nodes.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    cell_count: usize,
    r_max: f64,
    h: f64,
}

impl RadialGrid {
    pub fn new(cell_count: usize, r_max: f64) -> Result<Self> {
        if cell_count < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "cell_count = {cell_count} is below the minimum of {MIN_CELLS}"
            )));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!("r_max = {r_max} must be positive")));
        }
        Ok(Self {
            cell_count,
            r_max,
            h: r_max / cell_count as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.cell_count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Uniform spacing `r_max / cell_count`.
    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Coordinate of node `i` (zero based).
    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.cell_count).map(|i| self.r(i))
    }

    pub fn node_vec(&self) -> Vec<f64> {
        self.nodes().collect()
    }

    /// Index of the node closest to `r`, clamped to the grid.
    pub fn nearest_index(&self, r: f64) -> usize {
        let x = (r / self.h - 0.5).round();
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(self.cell_count - 1)
        }
    }

    /// Same domain with twice the cells.
    pub fn refined(&self) -> Self {
        Self {
            cell_count: self.cell_count * 2,
            r_max: self.r_max,
            h: self.h * 0.5,
        }
    }
}

/// Build a grid; rejects fewer than [`MIN_CELLS`] cells or a nonpositive extent.
pub fn build_grid(cell_count: usize, r_max: f64) -> Result<RadialGrid> {
    RadialGrid::new(cell_count, r_max)
}

/// First radial derivative: centered differences in the interior, the odd
/// ghost `-values[0]` at the first node, and a second-order one-sided
/// stencil at the last node.
///
/// A nonzero constant is not odd, so its derivative at the first node is
/// `2c / (2h)`; that is the expected result for the odd-extension contract.
pub fn radial_derivative(values: &[f64], grid: &RadialGrid) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    radial_derivative_into(values, grid, &mut out);
    out
}

pub fn radial_derivative_into(values: &[f64], grid: &RadialGrid, out: &mut [f64]) {
    let n = grid.len();
    debug_assert_eq!(values.len(), n);
    debug_assert_eq!(out.len(), n);
    let inv_2h = 0.5 / grid.spacing();
    out[0] = (values[1] + values[0]) * inv_2h;
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) * inv_2h;
    }
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) * inv_2h;
}

/// Second radial derivative with the same boundary treatment as
/// [`radial_derivative`]; the last node uses the four-point one-sided stencil.
pub fn radial_second_derivative(values: &[f64], grid: &RadialGrid) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    radial_second_derivative_into(values, grid, &mut out);
    out
}

pub fn radial_second_derivative_into(values: &[f64], grid: &RadialGrid, out: &mut [f64]) {
    let n = grid.len();
    debug_assert_eq!(values.len(), n);
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    out[0] = (values[1] - 3.0 * values[0]) * inv_h2;
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) * inv_h2;
    }
    out[n - 1] = (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3]
        - values[n - 4])
        * inv_h2;
}
