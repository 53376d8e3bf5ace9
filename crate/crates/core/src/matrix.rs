use rand::Rng;

use crate::error::{check_index, Error, Result};

/// Dense `dim x units` matrix stored unit-major: the `dim` values for unit
/// `j` are contiguous, so per-unit scans touch one cache-friendly slice.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitMatrix {
    dim: usize,
    units: usize,
    data: Vec<f64>,
}

impl UnitMatrix {
    pub fn filled(dim: usize, units: usize, value: f64) -> Self {
        UnitMatrix {
            dim,
            units,
            data: vec![value; dim * units],
        }
    }

    /// Entries drawn uniformly from `[0, 1)`.
    pub fn uniform<R: Rng + ?Sized>(dim: usize, units: usize, rng: &mut R) -> Self {
        let data = (0..dim * units).map(|_| rng.random::<f64>()).collect();
        UnitMatrix { dim, units, data }
    }

    pub fn from_unit_major(dim: usize, units: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * units {
            return Err(Error::DimensionMismatch {
                expected: dim * units,
                actual: data.len(),
            });
        }
        Ok(UnitMatrix { dim, units, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn units(&self) -> usize {
        self.units
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn try_column(&self, j: usize) -> Result<&[f64]> {
        check_index(j, self.units)?;
        Ok(self.column(j))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.dim + i]
    }

    pub fn columns(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_distance(&self, other: &UnitMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[inline]
pub(crate) fn squared_l2(x: &[f64], m: &[f64]) -> f64 {
    x.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
