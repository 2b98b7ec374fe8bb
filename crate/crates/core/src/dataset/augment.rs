use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::pixels::{clamp_to_u8, GrayMatrix};

/// Background intensity for pixels exposed by rotation.
const FILL: u8 = 255;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AugmentOp {
    /// Counter-clockwise rotation about the image centre, same canvas size.
    Rotate { degrees: f64 },
    /// Resample to `round(factor * size)` in each dimension.
    Scale { factor: f64 },
    FlipHorizontal,
    FlipVertical,
    GaussianNoise { sigma: f64 },
}

impl AugmentOp {
    fn validate(&self) -> Result<(), DatasetError> {
        match *self {
            AugmentOp::Rotate { degrees } if !degrees.is_finite() => {
                Err(DatasetError::BadParameter(format!("rotation {degrees}")))
            }
            AugmentOp::Scale { factor } if !(factor.is_finite() && factor > 0.0) => {
                Err(DatasetError::BadParameter(format!("scale factor {factor}")))
            }
            AugmentOp::GaussianNoise { sigma } if !(sigma.is_finite() && sigma >= 0.0) => {
                Err(DatasetError::BadParameter(format!("noise sigma {sigma}")))
            }
            _ => Ok(()),
        }
    }
}

/// Apply each op independently to `pixels`, one output per op.
///
/// The noise generator for op `i` is seeded from `(seed, i)`, so an output
/// does not depend on which other ops were requested before it.
pub fn augment(pixels: &GrayMatrix, ops: &[AugmentOp], seed: u64) -> Result<Vec<GrayMatrix>, DatasetError> {
    if pixels.is_empty() {
        return Err(DatasetError::BadParameter("empty image".into()));
    }
    for op in ops {
        op.validate()?;
    }
    Ok(ops
        .iter()
        .enumerate()
        .map(|(i, op)| match *op {
            AugmentOp::Rotate { degrees } => rotate(pixels, degrees),
            AugmentOp::Scale { factor } => scale(pixels, factor),
            AugmentOp::FlipHorizontal => flip_horizontal(pixels),
            AugmentOp::FlipVertical => flip_vertical(pixels),
            AugmentOp::GaussianNoise { sigma } => add_noise(pixels, sigma, seed, i as u64),
        })
        .collect())
}

fn rotate(m: &GrayMatrix, degrees: f64) -> GrayMatrix {
    let (sin, cos) = degrees.to_radians().sin_cos();
    let cx = (m.width() - 1) as f64 / 2.0;
    let cy = (m.height() - 1) as f64 / 2.0;
    let max_x = (m.width() - 1) as f64;
    let max_y = (m.height() - 1) as f64;
    const EPS: f64 = 1e-9;
    GrayMatrix::from_fn(m.width(), m.height(), |x, y| {
        // inverse map: output pixel -> source coordinate (y axis points down)
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        let sx = cos * dx - sin * dy + cx;
        let sy = sin * dx + cos * dy + cy;
        if sx < -EPS || sy < -EPS || sx > max_x + EPS || sy > max_y + EPS {
            FILL
        } else {
            clamp_to_u8(m.sample_bilinear(sx, sy))
        }
    })
}

fn scale(m: &GrayMatrix, factor: f64) -> GrayMatrix {
    let w = ((m.width() as f64 * factor).round() as usize).max(1);
    let h = ((m.height() as f64 * factor).round() as usize).max(1);
    m.resize_bilinear(w, h)
}

fn flip_horizontal(m: &GrayMatrix) -> GrayMatrix {
    let w = m.width();
    GrayMatrix::from_fn(w, m.height(), |x, y| m.get(w - 1 - x, y))
}

fn flip_vertical(m: &GrayMatrix) -> GrayMatrix {
    let h = m.height();
    GrayMatrix::from_fn(m.width(), h, |x, y| m.get(x, h - 1 - y))
}

fn add_noise(m: &GrayMatrix, sigma: f64, seed: u64, op_index: u64) -> GrayMatrix {
    if sigma == 0.0 {
        return m.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(op_index);
    let normal = Normal::new(0.0, sigma).expect("sigma validated");
    GrayMatrix::from_fn(m.width(), m.height(), |x, y| {
        clamp_to_u8(f64::from(m.get(x, y)) + normal.sample(&mut rng))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> GrayMatrix {
        GrayMatrix::from_fn(9, 6, |x, y| (x * 23 + y * 41 + x * y) as u8)
    }

    #[test]
    fn flips_are_involutions() {
        let m = sample();
        for op in [AugmentOp::FlipHorizontal, AugmentOp::FlipVertical] {
            let once = augment(&m, &[op], 0).unwrap().remove(0);
            assert_ne!(once, m);
            let twice = augment(&once, &[op], 0).unwrap().remove(0);
            assert_eq!(twice, m);
        }
    }

    #[test]
    fn identities() {
        let m = sample();
        let out = augment(
            &m,
            &[
                AugmentOp::Rotate { degrees: 0.0 },
                AugmentOp::Scale { factor: 1.0 },
                AugmentOp::Rotate { degrees: 360.0 },
            ],
            7,
        )
        .unwrap();
        assert_eq!(out[0], m);
        assert_eq!(out[1], m);
        // 360 degrees leaves sin ~ -2.4e-16, still exact after rounding
        assert_eq!(out[2], m);
    }

    #[test]
    fn rotate_180_equals_double_flip() {
        let m = sample();
        let rot = augment(&m, &[AugmentOp::Rotate { degrees: 180.0 }], 0).unwrap().remove(0);
        let flipped = flip_vertical(&flip_horizontal(&m));
        assert_eq!(rot, flipped);
    }

    #[test]
    fn rotation_fills_corners_white() {
        let m = GrayMatrix::filled(20, 20, 0);
        let rot = augment(&m, &[AugmentOp::Rotate { degrees: 45.0 }], 0).unwrap().remove(0);
        assert_eq!(rot.get(0, 0), 255);
        assert_eq!(rot.get(19, 19), 255);
        assert_eq!(rot.get(10, 10), 0);
    }

    #[test]
    fn scale_dimensions() {
        let m = sample();
        let out = augment(&m, &[AugmentOp::Scale { factor: 2.0 }, AugmentOp::Scale { factor: 0.5 }], 0).unwrap();
        assert_eq!((out[0].width(), out[0].height()), (18, 12));
        assert_eq!((out[1].width(), out[1].height()), (5, 3));
    }

    #[test]
    fn noise_is_seeded() {
        let m = sample();
        let op = [AugmentOp::GaussianNoise { sigma: 2.0 }];
        let a = augment(&m, &op, 99).unwrap();
        let b = augment(&m, &op, 99).unwrap();
        let c = augment(&m, &op, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a[0], m);
    }

    #[test]
    fn bad_parameters() {
        let m = sample();
        for op in [
            AugmentOp::Scale { factor: 0.0 },
            AugmentOp::Scale { factor: -1.0 },
            AugmentOp::GaussianNoise { sigma: -0.1 },
            AugmentOp::Rotate { degrees: f64::NAN },
        ] {
            assert!(matches!(augment(&m, &[op], 0), Err(DatasetError::BadParameter(_))));
        }
    }

    proptest! {
        #[test]
        fn deterministic_for_any_ops(deg in -180.0f64..180.0, factor in 0.2f64..3.0, sigma in 0.0f64..10.0, seed in any::<u64>()) {
            let m = sample();
            let ops = [
                AugmentOp::Rotate { degrees: deg },
                AugmentOp::Scale { factor },
                AugmentOp::GaussianNoise { sigma },
            ];
            prop_assert_eq!(augment(&m, &ops, seed).unwrap(), augment(&m, &ops, seed).unwrap());
        }
    }
}
