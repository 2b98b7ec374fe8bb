//! Embed the synthetic prints with the weight-free gradient-histogram
//! extractor, batched, and show that same-finger pairs score higher.

use afrnet::dataset::synthetic::{generate, SyntheticConfig};
use afrnet::dataset::{AlterationLevel, FingerprintRecord, Level};
use afrnet::features::{batch_count, batch_extract, BaselineExtractor, Extractor};
use afrnet::matcher::cosine;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let images = generate(&SyntheticConfig::default());
    let records = |level: Level| -> Vec<FingerprintRecord> {
        images
            .iter()
            .filter(|i| i.category == level)
            .enumerate()
            .map(|(n, i)| FingerprintRecord {
                record_id: format!("{}.png", n + 1),
                identity: i.identity,
                alteration: AlterationLevel::real(),
                pixels: i.pixels.clone(),
                source_name: i.file_name.clone(),
            })
            .collect()
    };
    let reals = records(Level::Real);
    let extractor = BaselineExtractor;
    let batch = 8;
    let vecs = batch_extract(&reals, &extractor, batch)?;
    println!(
        "{}: {} records in {} batches, dim {}",
        extractor.id(),
        vecs.len(),
        batch_count(reals.len(), batch),
        extractor.dim()
    );

    // a slightly noisier copy of the same finger against a different finger
    let probe = extractor.extract(&FingerprintRecord {
        pixels: afrnet::dataset::augment(&reals[0].pixels, &[afrnet::dataset::AugmentOp::GaussianNoise { sigma: 6.0 }], 1)?
            .remove(0),
        ..reals[0].clone()
    })?;
    println!("same finger:      {:.4}", cosine(&vecs[0], &probe)?.value);
    println!("different finger: {:.4}", cosine(&vecs[1], &probe)?.value);
    Ok(())
}
