//! Rectangular unit lattice.
//!
//! Units are indexed row-major: unit `u` sits at row `u / cols`, column
//! `u % cols`. The grid is flat (no wraparound) and distances are Euclidean
//! in the grid plane.

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};

/// Row/column position of a unit on the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridCoord {
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridTopology {
    rows: usize,
    cols: usize,
}

impl GridTopology {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid must be at least 1x1, got {rows}x{cols}"
            )));
        }
        rows.checked_mul(cols)
            .ok_or_else(|| Error::InvalidParameter("grid too large".into()))?;
        Ok(GridTopology { rows, cols })
    }

    pub fn square(side: usize) -> Result<Self> {
        Self::new(side, side)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn unit_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn unit_coords(&self, u: usize) -> Result<GridCoord> {
        check_index(u, self.unit_count())?;
        Ok(self.coords_unchecked(u))
    }

    pub fn unit_index(&self, coord: GridCoord) -> Result<usize> {
        check_index(coord.row, self.rows)?;
        check_index(coord.col, self.cols)?;
        Ok(coord.row * self.cols + coord.col)
    }

    #[inline]
    pub(crate) fn coords_unchecked(&self, u: usize) -> GridCoord {
        GridCoord {
            row: u / self.cols,
            col: u % self.cols,
        }
    }

    pub fn grid_distance(&self, a: usize, b: usize) -> Result<f64> {
        let n = self.unit_count();
        check_index(a, n)?;
        check_index(b, n)?;
        Ok(self.distance_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, a: usize, b: usize) -> f64 {
        self.squared_distance_unchecked(a, b).sqrt()
    }

    #[inline]
    pub(crate) fn squared_distance_unchecked(&self, a: usize, b: usize) -> f64 {
        let pa = self.coords_unchecked(a);
        let pb = self.coords_unchecked(b);
        let dr = pa.row.abs_diff(pb.row) as f64;
        let dc = pa.col.abs_diff(pb.col) as f64;
        dr * dr + dc * dc
    }

    /// Units strictly closer than `radius` to `u`, excluding `u`, in
    /// ascending index order.
    pub fn neighbors_within(&self, u: usize, radius: f64) -> Result<Vec<usize>> {
        check_index(u, self.unit_count())?;
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let mut out = Vec::new();
        self.for_each_within(u, radius, |v, _| {
            if v != u {
                out.push(v);
            }
        });
        Ok(out)
    }

    /// Visits `u` and every unit strictly closer than `radius`, in ascending
    /// index order, passing the grid distance. Only the bounding box of the
    /// radius is scanned. `u` is always visited, even for tiny radii.
    pub(crate) fn for_each_within(&self, u: usize, radius: f64, mut f: impl FnMut(usize, f64)) {
        let c = self.coords_unchecked(u);
        let reach = if radius.is_finite() {
            (radius.ceil() as usize).min(self.rows.max(self.cols))
        } else {
            self.rows.max(self.cols)
        };
        let r0 = c.row.saturating_sub(reach);
        let r1 = (c.row + reach).min(self.rows - 1);
        let c0 = c.col.saturating_sub(reach);
        let c1 = (c.col + reach).min(self.cols - 1);
        for row in r0..=r1 {
            for col in c0..=c1 {
                let v = row * self.cols + col;
                let d = self.distance_unchecked(u, v);
                if v == u || d < radius {
                    f(v, d);
                }
            }
        }
    }
}
