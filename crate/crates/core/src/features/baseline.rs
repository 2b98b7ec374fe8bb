use super::{attach_ref, EmbeddingVector, Extractor, FeatureError};
use crate::dataset::FingerprintRecord;

pub const BASELINE_ID: &str = "baseline-ghist-v1";

const SIZE: usize = 128;
const CELLS: usize = 16;
const CELL: usize = SIZE / CELLS;
const BINS: usize = 9;
pub const BASELINE_DIM: usize = CELLS * CELLS * BINS;

/// Gradient-orientation histogram embedding.
///
/// The image is resized to 128x128; per-pixel gradients come from central
/// differences with edge replication; signed orientations in `[0, 2pi)` are
/// hard-binned into 9 bins, weighted by magnitude, over a 16x16 grid of 8x8
/// cells; the 2304-d result is L2-normalised.
#[derive(Debug, Clone, Copy, Default)]
pub struct BaselineExtractor;

impl BaselineExtractor {
    pub fn extract(&self, record: &FingerprintRecord) -> Result<EmbeddingVector, FeatureError> {
        if record.pixels.is_empty() {
            return Err(FeatureError::EmptyImage);
        }
        let img = record.pixels.resize_bilinear_f64(SIZE, SIZE);
        let at = |x: isize, y: isize| {
            let cx = x.clamp(0, SIZE as isize - 1) as usize;
            let cy = y.clamp(0, SIZE as isize - 1) as usize;
            img[cy * SIZE + cx]
        };
        let mut hist = vec![0.0f64; BASELINE_DIM];
        let bin_width = std::f64::consts::TAU / BINS as f64;
        for y in 0..SIZE {
            for x in 0..SIZE {
                let (xi, yi) = (x as isize, y as isize);
                let gx = (at(xi + 1, yi) - at(xi - 1, yi)) / 2.0;
                let gy = (at(xi, yi + 1) - at(xi, yi - 1)) / 2.0;
                let mag = gx.hypot(gy);
                if mag == 0.0 {
                    continue;
                }
                let angle = gy.atan2(gx).rem_euclid(std::f64::consts::TAU);
                let bin = ((angle / bin_width) as usize).min(BINS - 1);
                let cell = (y / CELL) * CELLS + x / CELL;
                hist[cell * BINS + bin] += mag;
            }
        }
        let norm = hist.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(FeatureError::DegenerateEmbedding(record.record_ref().to_string()));
        }
        let values = hist.iter().map(|v| (v / norm) as f32).collect();
        EmbeddingVector::new(record.record_ref(), values, BASELINE_ID)
    }
}

impl Extractor for BaselineExtractor {
    fn id(&self) -> &str {
        BASELINE_ID
    }

    fn dim(&self) -> usize {
        BASELINE_DIM
    }

    fn extract_batch(&self, records: &[FingerprintRecord]) -> Result<Vec<EmbeddingVector>, FeatureError> {
        records
            .iter()
            .map(|r| self.extract(r).map_err(|e| attach_ref(r, e)))
            .collect()
    }
}
