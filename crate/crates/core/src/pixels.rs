//! 8-bit grayscale pixel grids and the bilinear resampling shared by
//! augmentation, preprocessing and the baseline extractor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PixelError {
    #[error("pixel buffer holds {actual} values, expected {width}x{height}={}", width * height)]
    BufferSize {
        width: usize,
        height: usize,
        actual: usize,
    },
    #[error("rows have unequal lengths")]
    RaggedRows,
}

/// Row-major grayscale matrix. Zero-sized matrices are representable so that
/// the operations consuming them can report their own error.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayMatrix {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for GrayMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrayMatrix({}x{})", self.width, self.height)
    }
}

impl GrayMatrix {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, PixelError> {
        if data.len() != width * height {
            return Err(PixelError::BufferSize {
                width,
                height,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, PixelError> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(PixelError::RaggedRows);
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(if height == 0 { 0 } else { width }, height, data)
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.data[y * self.width + x] = value;
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.data.chunks(self.width.max(1)).map(<[u8]>::to_vec).collect()
    }

    /// Bilinear sample at a continuous coordinate, clamped to the grid edges.
    /// Integer coordinates return the stored value exactly.
    pub fn sample_bilinear(&self, sx: f64, sy: f64) -> f64 {
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        let sx = sx.clamp(0.0, max_x);
        let sy = sy.clamp(0.0, max_y);
        let x0 = sx.floor() as usize;
        let y0 = sy.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = sx - x0 as f64;
        let fy = sy - y0 as f64;
        let p00 = f64::from(self.get(x0, y0));
        let p10 = f64::from(self.get(x1, y0));
        let p01 = f64::from(self.get(x0, y1));
        let p11 = f64::from(self.get(x1, y1));
        let top = p00 + (p10 - p00) * fx;
        let bottom = p01 + (p11 - p01) * fx;
        top + (bottom - top) * fy
    }

    /// Half-pixel-centre bilinear resize into a real-valued grid (row-major).
    /// Resizing to the same dimensions reproduces the input values exactly.
    ///
    /// Panics if `self` is empty.
    pub fn resize_bilinear_f64(&self, width: usize, height: usize) -> Vec<f64> {
        assert!(!self.is_empty(), "cannot resample an empty matrix");
        let scale_x = self.width as f64 / width as f64;
        let scale_y = self.height as f64 / height as f64;
        let mut out = Vec::with_capacity(width * height);
        for y in 0..height {
            let sy = (y as f64 + 0.5) * scale_y - 0.5;
            for x in 0..width {
                let sx = (x as f64 + 0.5) * scale_x - 0.5;
                out.push(self.sample_bilinear(sx, sy));
            }
        }
        out
    }

    pub fn resize_bilinear(&self, width: usize, height: usize) -> GrayMatrix {
        let data = self
            .resize_bilinear_f64(width, height)
            .into_iter()
            .map(clamp_to_u8)
            .collect();
        GrayMatrix {
            width,
            height,
            data,
        }
    }
}

/// Round half away from zero and clamp into the 8-bit range.
#[inline]
pub fn clamp_to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_resize_is_exact() {
        let m = GrayMatrix::from_fn(7, 5, |x, y| (x * 31 + y * 17) as u8);
        assert_eq!(m.resize_bilinear(7, 5), m);
    }

    #[test]
    fn upsampling_constant_stays_constant() {
        let m = GrayMatrix::filled(3, 3, 77);
        let r = m.resize_bilinear_f64(10, 4);
        assert!(r.iter().all(|&v| v == 77.0));
    }

    #[test]
    fn bilinear_midpoint() {
        let m = GrayMatrix::from_rows(&[vec![0, 100], vec![200, 255]]).unwrap();
        assert_eq!(m.sample_bilinear(0.5, 0.0), 50.0);
        assert_eq!(m.sample_bilinear(0.0, 0.5), 100.0);
        assert!((m.sample_bilinear(0.5, 0.5) - 138.75).abs() < 1e-12);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert_eq!(
            GrayMatrix::from_rows(&[vec![1, 2], vec![3]]),
            Err(PixelError::RaggedRows)
        );
    }
}
