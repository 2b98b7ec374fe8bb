//! Procedural stand-in for the SOCOFing Real-Altered subset.
//!
//! Produces a directory tree with the same layout, naming convention and
//! per-category counts (40 real, 90/89/82 altered) so the whole pipeline can
//! run without the original download. Each real print is a ridge pattern
//! drawn from per-finger parameters; altered prints are derived from the real
//! print of the same finger by obliteration, central rotation or a z-cut,
//! with severity growing from Easy to Hard.

use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{socofing_name, DatasetError, Finger, Gender, Hand, IdentityKey, Level, MethodTag};
use crate::pixels::{clamp_to_u8, GrayMatrix};

#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub subjects: u32,
    /// Altered image counts for Easy, Medium, Hard.
    pub altered_counts: [usize; 3],
    pub width: usize,
    pub height: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            subjects: 4,
            altered_counts: [90, 89, 82],
            width: 96,
            height: 103,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticImage {
    pub category: Level,
    pub file_name: String,
    pub identity: IdentityKey,
    pub pixels: GrayMatrix,
}

#[derive(Debug, Clone, Copy)]
struct RidgeParams {
    cx: f64,
    cy: f64,
    angle: f64,
    period: f64,
    radial: f64,
    arch: f64,
    spiral: f64,
    phase: f64,
}

impl RidgeParams {
    fn random(rng: &mut impl Rng, width: usize, height: usize) -> Self {
        Self {
            cx: width as f64 * rng.gen_range(0.38..0.62),
            cy: height as f64 * rng.gen_range(0.35..0.6),
            angle: rng.gen_range(-0.6..0.6),
            period: rng.gen_range(5.5..8.5),
            radial: rng.gen_range(0.0..1.0),
            arch: rng.gen_range(-1.5..1.5),
            spiral: f64::from(rng.gen_range(-2i32..=2)),
            phase: rng.gen_range(0.0..2.0 * PI),
        }
    }

    fn render(&self, width: usize, height: usize, noise: f64, rng: &mut impl Rng) -> GrayMatrix {
        let normal = Normal::new(0.0, noise.max(1e-12)).expect("positive sigma");
        let (sa, ca) = self.angle.sin_cos();
        let (ex, ey) = (width as f64 / 2.0, height as f64 / 2.0);
        GrayMatrix::from_fn(width, height, |x, y| {
            let dx = x as f64 - self.cx;
            let dy = y as f64 - self.cy;
            let u = dx * ca + dy * sa;
            let v = -dx * sa + dy * ca;
            let r = (u * u + v * v).sqrt();
            let linear = v + self.arch * u * u / 40.0;
            let phi = 2.0 * PI / self.period * (self.radial * r + (1.0 - self.radial) * linear)
                + self.spiral * v.atan2(u)
                + self.phase;
            let ridge = 0.5 + 0.5 * phi.cos();
            // elliptical finger pad with a soft rim
            let ux = (x as f64 - ex) / (ex * 0.92);
            let uy = (y as f64 - ey) / (ey * 0.95);
            let rim = (1.0 - (ux * ux + uy * uy)).clamp(0.0, 0.15) / 0.15;
            let value = 255.0 - rim * 190.0 * ridge + normal.sample(rng);
            clamp_to_u8(value)
        })
    }
}

fn severity(level: Level) -> f64 {
    match level {
        Level::Easy => 1.0,
        Level::Medium => 1.6,
        Level::Hard => 2.4,
        Level::Real => 0.0,
    }
}

fn obliterate(m: &GrayMatrix, level: Level, rng: &mut impl Rng) -> GrayMatrix {
    let s = severity(level);
    let mut out = m.clone();
    let blobs = s.round() as usize;
    for _ in 0..blobs {
        let bx = rng.gen_range(0.3..0.7) * m.width() as f64;
        let by = rng.gen_range(0.3..0.7) * m.height() as f64;
        let rx = 6.0 * s * rng.gen_range(0.8..1.2);
        let ry = 6.0 * s * rng.gen_range(0.8..1.2);
        let shade = rng.gen_range(200.0..250.0);
        for y in 0..m.height() {
            for x in 0..m.width() {
                let d = ((x as f64 - bx) / rx).powi(2) + ((y as f64 - by) / ry).powi(2);
                if d < 1.0 {
                    let w = 1.0 - d * d;
                    let v = f64::from(out.get(x, y)) * (1.0 - w) + shade * w;
                    out.set(x, y, clamp_to_u8(v));
                }
            }
        }
    }
    out
}

fn central_rotation(m: &GrayMatrix, level: Level, rng: &mut impl Rng) -> GrayMatrix {
    let s = severity(level);
    let radius = 10.0 + 7.0 * s;
    let theta = (25.0 * s * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).to_radians();
    let (sin, cos) = theta.sin_cos();
    let cx = m.width() as f64 / 2.0 + rng.gen_range(-4.0..4.0);
    let cy = m.height() as f64 / 2.0 + rng.gen_range(-4.0..4.0);
    GrayMatrix::from_fn(m.width(), m.height(), |x, y| {
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        if dx * dx + dy * dy > radius * radius {
            return m.get(x, y);
        }
        let sx = cos * dx - sin * dy + cx;
        let sy = sin * dx + cos * dy + cy;
        clamp_to_u8(m.sample_bilinear(sx, sy))
    })
}

fn z_cut(m: &GrayMatrix, level: Level, rng: &mut impl Rng) -> GrayMatrix {
    let s = severity(level);
    let band = (8.0 * s) as usize;
    let shift = (4.0 * s).round() as i64 * if rng.gen_bool(0.5) { 1 } else { -1 };
    let y0 = rng.gen_range(m.height() / 4..m.height() / 2);
    let slope = rng.gen_range(-0.4..0.4);
    GrayMatrix::from_fn(m.width(), m.height(), |x, y| {
        let top = y0 as f64 + slope * (x as f64 - m.width() as f64 / 2.0);
        let yf = y as f64;
        if yf >= top && yf < top + band as f64 {
            let sx = x as i64 - shift;
            if sx < 0 || sx >= m.width() as i64 {
                255
            } else {
                // scar along the cut edges
                if (yf - top) < 1.0 || (top + band as f64 - yf) <= 1.0 {
                    230
                } else {
                    m.get(sx as usize, y)
                }
            }
        } else {
            m.get(x, y)
        }
    })
}

fn alter(m: &GrayMatrix, level: Level, tag: MethodTag, rng: &mut impl Rng) -> GrayMatrix {
    match tag {
        MethodTag::Obl => obliterate(m, level, rng),
        MethodTag::CR => central_rotation(m, level, rng),
        MethodTag::Zcut => z_cut(m, level, rng),
    }
}

fn add_capture_noise(m: &GrayMatrix, sigma: f64, rng: &mut impl Rng) -> GrayMatrix {
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    GrayMatrix::from_fn(m.width(), m.height(), |x, y| {
        clamp_to_u8(f64::from(m.get(x, y)) + normal.sample(rng))
    })
}

/// Generate the full image set in memory, Real first then Easy/Medium/Hard.
pub fn generate(config: &SyntheticConfig) -> Vec<SyntheticImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut fingers = Vec::new();
    for subject in 1..=config.subjects {
        let gender = if rng.gen_bool(0.7) { Gender::M } else { Gender::F };
        for hand in [Hand::Left, Hand::Right] {
            for finger in Finger::ALL {
                let id = IdentityKey::new(subject, gender, hand, finger).expect("subject >= 1");
                let params = RidgeParams::random(&mut rng, config.width, config.height);
                let base = params.render(config.width, config.height, 0.0, &mut rng);
                fingers.push((id, base));
            }
        }
    }

    let mut images = Vec::new();
    for (id, base) in &fingers {
        images.push(SyntheticImage {
            category: Level::Real,
            file_name: socofing_name(id, None, "BMP"),
            identity: *id,
            pixels: add_capture_noise(base, 4.0, &mut rng),
        });
    }

    for (level, &count) in Level::ALTERED.iter().zip(&config.altered_counts) {
        let mut candidates: Vec<(usize, MethodTag)> = (0..fingers.len())
            .flat_map(|i| MethodTag::ALL.into_iter().map(move |t| (i, t)))
            .collect();
        candidates.shuffle(&mut rng);
        candidates.truncate(count.min(candidates.len()));
        candidates.sort();
        for (i, tag) in candidates {
            let (id, base) = &fingers[i];
            let altered = alter(base, *level, tag, &mut rng);
            images.push(SyntheticImage {
                category: *level,
                file_name: socofing_name(id, Some(tag), "BMP"),
                identity: *id,
                pixels: add_capture_noise(&altered, 4.0, &mut rng),
            });
        }
    }
    images
}

/// Write `<root>/{Real,Easy,Medium,Hard}/*.BMP`.
pub fn write_tree(root: &Path, config: &SyntheticConfig) -> Result<usize, DatasetError> {
    let images = generate(config);
    for level in Level::ALL {
        std::fs::create_dir_all(root.join(level.as_str()))?;
    }
    for img in &images {
        let path = root.join(img.category.as_str()).join(&img.file_name);
        image::GrayImage::from_raw(
            img.pixels.width() as u32,
            img.pixels.height() as u32,
            img.pixels.data().to_vec(),
        )
        .expect("dimensions match")
        .save_with_format(&path, image::ImageFormat::Bmp)
        .map_err(|e| DatasetError::Decode(format!("{}: {e}", path.display())))?;
    }
    Ok(images.len())
}
