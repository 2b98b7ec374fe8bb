use std::path::Path;

use tract_onnx::prelude::*;
use tract_onnx::tract_hir::internal::DimLike;

use super::{attach_ref, preprocess, EmbeddingVector, Extractor, FeatureError, PreprocessConfig};
use crate::dataset::FingerprintRecord;

type Plan = TypedRunnableModel<TypedModel>;

/// Pretrained convolutional backbone loaded from an ONNX file.
///
/// The model must take a channels-last `[N, 224, 224, 3]` float input
/// (mean-subtracted, see [`PreprocessConfig`]) and return the embedding
/// layer activations as its first output. A symbolic batch dimension runs
/// whole batches per call; a fixed batch of 1 runs image by image.
pub struct BackboneExtractor {
    plan: Plan,
    id: String,
    dim: usize,
    symbolic_batch: bool,
    preprocess: PreprocessConfig,
}

impl std::fmt::Debug for BackboneExtractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BackboneExtractor")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .finish()
    }
}

impl BackboneExtractor {
    pub fn load(path: &Path) -> Result<Self, FeatureError> {
        let load_err = |e: TractError| FeatureError::ModelLoadFailure {
            path: path.display().to_string(),
            reason: format!("{e:#}"),
        };
        if !path.is_file() {
            return Err(FeatureError::ModelLoadFailure {
                path: path.display().to_string(),
                reason: "no such file".into(),
            });
        }
        let preprocess = PreprocessConfig::default();
        let model = tract_onnx::onnx()
            .model_for_path(path)
            .and_then(|m| m.into_typed())
            .map_err(load_err)?;

        let dims: Vec<TDim> = model
            .input_fact(0)
            .map_err(load_err)?
            .shape
            .iter()
            .cloned()
            .collect();
        let expect = [preprocess.size, preprocess.size, 3];
        let spatial_ok = dims.len() == 4
            && dims[1..]
                .iter()
                .zip(expect)
                .all(|(d, e)| d.to_usize().ok() == Some(e));
        if !spatial_ok {
            return Err(FeatureError::ShapeMismatch(format!(
                "expected [N, {}, {}, 3], model declares {:?}",
                preprocess.size,
                preprocess.size,
                dims.iter().map(|d| d.to_string()).collect::<Vec<_>>()
            )));
        }
        let symbolic_batch = match dims[0].to_usize() {
            Ok(1) => false,
            Ok(n) => {
                return Err(FeatureError::ShapeMismatch(format!("fixed batch dimension {n}, expected 1 or symbolic")))
            }
            Err(_) => true,
        };
        let plan = model
            .into_optimized()
            .and_then(|m| m.into_runnable())
            .map_err(load_err)?;

        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
        let mut this = Self {
            plan,
            id: format!("backbone:{stem}"),
            dim: 0,
            symbolic_batch,
            preprocess,
        };
        let probe = vec![0.0f32; this.preprocess.size * this.preprocess.size * 3];
        this.dim = this.infer(&[probe.as_slice()])?.len();
        if this.dim == 0 {
            return Err(FeatureError::ShapeMismatch("model produced an empty output".into()));
        }
        Ok(this)
    }

    /// Run one forward pass over `inputs` (each a full HWC tensor) and return
    /// the concatenated per-image outputs.
    fn infer(&self, inputs: &[&[f32]]) -> Result<Vec<f32>, FeatureError> {
        let s = self.preprocess.size;
        let mut flat = Vec::with_capacity(inputs.len() * s * s * 3);
        for i in inputs {
            flat.extend_from_slice(i);
        }
        let tensor = tract_ndarray::Array4::from_shape_vec((inputs.len(), s, s, 3), flat)
            .map_err(|e| FeatureError::ShapeMismatch(e.to_string()))?
            .into_tensor();
        let out = self
            .plan
            .run(tvec!(tensor.into()))
            .map_err(|e| FeatureError::Inference(format!("{e:#}")))?;
        let view = out[0]
            .to_array_view::<f32>()
            .map_err(|e| FeatureError::Inference(format!("{e:#}")))?;
        Ok(view.iter().copied().collect())
    }
}

impl Extractor for BackboneExtractor {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn concurrent(&self) -> bool {
        false
    }

    fn extract_batch(&self, records: &[FingerprintRecord]) -> Result<Vec<EmbeddingVector>, FeatureError> {
        let images = records
            .iter()
            .map(|r| preprocess(r, &self.preprocess).map_err(|e| attach_ref(r, e)))
            .collect::<Result<Vec<_>, _>>()?;
        let outputs: Vec<Vec<f32>> = if self.symbolic_batch && !images.is_empty() {
            let inputs: Vec<&[f32]> = images.iter().map(|i| i.tensor.as_slice()).collect();
            let flat = self.infer(&inputs)?;
            if flat.len() != self.dim * images.len() {
                return Err(FeatureError::DimMismatch {
                    expected: self.dim * images.len(),
                    actual: flat.len(),
                });
            }
            flat.chunks(self.dim).map(<[f32]>::to_vec).collect()
        } else {
            images
                .iter()
                .zip(records)
                .map(|(img, r)| self.infer(&[img.tensor.as_slice()]).map_err(|e| attach_ref(r, e)))
                .collect::<Result<_, _>>()?
        };
        records
            .iter()
            .zip(outputs)
            .map(|(r, values)| {
                if values.len() != self.dim {
                    return Err(attach_ref(
                        r,
                        FeatureError::DimMismatch {
                            expected: self.dim,
                            actual: values.len(),
                        },
                    ));
                }
                EmbeddingVector::new(r.record_ref(), values, self.id.clone())
            })
            .collect()
    }
}
