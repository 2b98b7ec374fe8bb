use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::dataset::{FingerprintRecord, RecordRef};

/// Backbone input edge length.
pub const INPUT_SIZE: usize = 224;

/// Per-channel ImageNet training means of the 16-layer VGG release, in the
/// B, G, R channel order that network expects, on the 0..255 scale.
pub const VGG_BGR_MEANS: [f32; 3] = [103.939, 116.779, 123.68];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub size: usize,
    pub channel_means: [f32; 3],
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            size: INPUT_SIZE,
            channel_means: VGG_BGR_MEANS,
        }
    }
}

/// Backbone input tensor, `size x size x 3`, channels-last, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessedImage {
    pub tensor: Vec<f32>,
    pub size: usize,
    pub provenance: RecordRef,
}

impl PreprocessedImage {
    pub fn at(&self, x: usize, y: usize, channel: usize) -> f32 {
        self.tensor[(y * self.size + x) * 3 + channel]
    }
}

/// Bilinear resize, grayscale replicated into three channels, then channel
/// means subtracted.
pub fn preprocess(record: &FingerprintRecord, config: &PreprocessConfig) -> Result<PreprocessedImage, FeatureError> {
    if record.pixels.is_empty() {
        return Err(FeatureError::EmptyImage);
    }
    let gray = record.pixels.resize_bilinear_f64(config.size, config.size);
    let mut tensor = Vec::with_capacity(gray.len() * 3);
    for g in gray {
        for mean in config.channel_means {
            tensor.push((g - f64::from(mean)) as f32);
        }
    }
    Ok(PreprocessedImage {
        tensor,
        size: config.size,
        provenance: record.record_ref(),
    })
}
