//! Write embeddings to the binary cache and read them back bit-exactly.

use afrnet::dataset::{Level, RecordRef};
use afrnet::features::{cache_load, cache_save, EmbeddingVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vectors: Vec<EmbeddingVector> = (1..=3)
        .map(|i| {
            let values = (0..8).map(|k| ((i * 8 + k) as f32).sin()).collect();
            EmbeddingVector::new(RecordRef::new(Level::Easy, format!("{i}.png")), values, "demo")
        })
        .collect::<Result<_, _>>()?;
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("Easy.afre");
    cache_save(&vectors, &path)?;
    let back = cache_load(&path)?;
    println!("{} bytes, {} vectors, identical: {}", std::fs::metadata(&path)?.len(), back.len(), back == vectors);
    Ok(())
}
