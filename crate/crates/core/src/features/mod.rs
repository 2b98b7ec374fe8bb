//! Fingerprint embeddings: preprocessing for the convolutional backbone, a
//! weight-free gradient-histogram baseline, batched extraction and the
//! on-disk embedding cache.

#[cfg(feature = "backbone")]
mod backbone;
mod baseline;
mod cache;
mod preprocess;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{FingerprintRecord, RecordRef};

#[cfg(feature = "backbone")]
pub use backbone::BackboneExtractor;
pub use baseline::{BaselineExtractor, BASELINE_DIM, BASELINE_ID};
pub use cache::{cache_load, cache_read, cache_save, cache_write, CACHE_MAGIC, CACHE_VERSION};
pub use preprocess::{preprocess, PreprocessConfig, PreprocessedImage, INPUT_SIZE, VGG_BGR_MEANS};

/// Environment variable naming the backbone model file.
pub const MODEL_PATH_ENV: &str = "AFRNET_MODEL_PATH";

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("empty image")]
    EmptyImage,
    #[error("cannot load model {path}: {reason}")]
    ModelLoadFailure { path: String, reason: String },
    #[error("model input shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("all-zero embedding for {0}")]
    DegenerateEmbedding(String),
    #[error("inference failed: {0}")]
    Inference(String),
    #[error("vectors from more than one extractor: {0:?} and {1:?}")]
    MixedExtractors(String, String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },
    #[error("corrupt embedding cache: {0}")]
    CorruptCache(String),
    #[error("batch size must be >= 1")]
    BadBatchSize,
    #[error("{record}: {source}")]
    Record {
        record: RecordRef,
        #[source]
        source: Box<FeatureError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub record_ref: RecordRef,
    values: Vec<f32>,
    extractor_id: String,
}

impl EmbeddingVector {
    /// Rejects empty and all-zero vectors.
    pub fn new(record_ref: RecordRef, values: Vec<f32>, extractor_id: impl Into<String>) -> Result<Self, FeatureError> {
        if values.is_empty() || values.iter().all(|&v| v == 0.0) {
            return Err(FeatureError::DegenerateEmbedding(record_ref.to_string()));
        }
        Ok(Self {
            record_ref,
            values,
            extractor_id: extractor_id.into(),
        })
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn extractor_id(&self) -> &str {
        &self.extractor_id
    }

    /// Copy with every component multiplied by `k`.
    pub fn scaled(&self, k: f32) -> Self {
        Self {
            record_ref: self.record_ref.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
            extractor_id: self.extractor_id.clone(),
        }
    }
}

/// Something that turns fingerprint records into fixed-dimension vectors.
pub trait Extractor: Sync {
    fn id(&self) -> &str;
    fn dim(&self) -> usize;
    /// Extract one batch; output order matches input order.
    fn extract_batch(&self, records: &[FingerprintRecord]) -> Result<Vec<EmbeddingVector>, FeatureError>;
    /// Whether batches may be run on several threads against this instance.
    fn concurrent(&self) -> bool {
        true
    }
}

pub fn batch_count(records: usize, batch_size: usize) -> usize {
    records.div_ceil(batch_size.max(1))
}

/// Split `records` into batches of `batch_size` and extract them.
/// Results are independent of the batch size.
pub fn batch_extract<E: Extractor + ?Sized>(
    records: &[FingerprintRecord],
    extractor: &E,
    batch_size: usize,
) -> Result<Vec<EmbeddingVector>, FeatureError> {
    if batch_size == 0 {
        return Err(FeatureError::BadBatchSize);
    }
    let run = |chunk: &[FingerprintRecord]| extractor.extract_batch(chunk);
    let batches: Vec<Vec<EmbeddingVector>> = if extractor.concurrent() {
        records.par_chunks(batch_size).map(run).collect::<Result<_, _>>()?
    } else {
        records.chunks(batch_size).map(run).collect::<Result<_, _>>()?
    };
    Ok(batches.into_iter().flatten().collect())
}

pub(crate) fn attach_ref(record: &FingerprintRecord, err: FeatureError) -> FeatureError {
    match err {
        e @ FeatureError::Record { .. } => e,
        e => FeatureError::Record {
            record: record.record_ref(),
            source: Box::new(e),
        },
    }
}
