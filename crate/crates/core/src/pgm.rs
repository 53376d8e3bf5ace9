//! Binary PGM (P5) output for prototype grids and samples.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::UnitMatrix;
use crate::topology::GridTopology;

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_pgm()).map_err(|e| Error::file(path, e))
    }
}

pub fn to_pixel(v: f64) -> u8 {
    (255.0 * v.clamp(0.0, 1.0)).round() as u8
}

/// Side length of a square image with `dim` pixels.
pub fn square_side(dim: usize) -> Result<usize> {
    let s = (dim as f64).sqrt().round() as usize;
    if s == 0 || s * s != dim {
        return Err(Error::InvalidParameter(format!("dimension {dim} is not a perfect square")));
    }
    Ok(s)
}

/// Renders one feature vector as a square image.
pub fn vector_image(x: &[f64]) -> Result<GrayImage> {
    let s = square_side(x.len())?;
    Ok(GrayImage {
        width: s,
        height: s,
        pixels: x.iter().map(|&v| to_pixel(v)).collect(),
    })
}

/// Tiles every unit's prototype at its grid position: unit `(k, l)` fills
/// the `s x s` block at row `k * s`, column `l * s`.
pub fn prototype_grid(topology: &GridTopology, weights: &UnitMatrix) -> Result<GrayImage> {
    if weights.units() != topology.unit_count() {
        return Err(Error::DimensionMismatch {
            expected: topology.unit_count(),
            actual: weights.units(),
        });
    }
    let s = square_side(weights.dim())?;
    let width = topology.cols() * s;
    let height = topology.rows() * s;
    let mut pixels = vec![0u8; width * height];
    for (u, proto) in weights.columns().enumerate() {
        let c = topology.unit_coords(u)?;
        for (r, row) in proto.chunks_exact(s).enumerate() {
            let start = (c.row * s + r) * width + c.col * s;
            for (p, &v) in pixels[start..start + s].iter_mut().zip(row) {
                *p = to_pixel(v);
            }
        }
    }
    Ok(GrayImage { width, height, pixels })
}
