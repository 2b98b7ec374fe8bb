//! Run an ONNX backbone over a few prints.
//!
//!     AFRNET_MODEL_PATH=vgg16_fc2.onnx cargo run --release --example backbone_extract
//!
//! The model must take `[N, 224, 224, 3]` (channels-last, BGR mean-subtracted);
//! `scripts/export_vgg16.py` produces one. A tiny test model lives at
//! `tests/fixtures/tiny_nhwc.onnx`.

use std::path::PathBuf;

use afrnet::dataset::synthetic::{generate, SyntheticConfig};
use afrnet::dataset::{AlterationLevel, FingerprintRecord, Level};
use afrnet::features::{batch_extract, BackboneExtractor, Extractor, MODEL_PATH_ENV};
use afrnet::matcher::cosine;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path: PathBuf = std::env::var_os(MODEL_PATH_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/tiny_nhwc.onnx").into());
    let model = BackboneExtractor::load(&path)?;
    println!("{} -> dim {}", model.id(), model.dim());

    let records: Vec<FingerprintRecord> = generate(&SyntheticConfig::default())
        .into_iter()
        .filter(|i| i.category == Level::Real)
        .take(4)
        .enumerate()
        .map(|(n, i)| FingerprintRecord {
            record_id: format!("{}.png", n + 1),
            identity: i.identity,
            alteration: AlterationLevel::real(),
            pixels: i.pixels,
            source_name: i.file_name,
        })
        .collect();
    let vecs = batch_extract(&records, &model, 2)?;
    for v in &vecs[1..] {
        println!("{} vs {}: {:.4}", vecs[0].record_ref, v.record_ref, cosine(&vecs[0], v)?.value);
    }
    Ok(())
}
