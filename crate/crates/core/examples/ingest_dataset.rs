//! Relabel a SOCOFing-style tree into numbered PNGs plus manifests, the same
//! steps `afrnet ingest` performs.
//!
//!     cargo run --example ingest_dataset -- <source-root> <out-root>
//!
//! Without arguments a synthetic tree is generated in a temp directory.

use std::path::PathBuf;

use afrnet::dataset::synthetic::{write_tree, SyntheticConfig};
use afrnet::dataset::{
    category_counts, convert_format, find_category_dir, list_image_files, load_image, relabel, ImageFormat, Level,
    MANIFEST_FILE,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp = tempfile::tempdir()?;
    let mut args = std::env::args().skip(1);
    let src: PathBuf = match args.next() {
        Some(p) => p.into(),
        None => {
            let p = tmp.path().join("src");
            write_tree(&p, &SyntheticConfig::default())?;
            p
        }
    };
    let dst: PathBuf = args.next().map(PathBuf::from).unwrap_or_else(|| tmp.path().join("ingested"));

    let mut manifests = Vec::new();
    for level in Level::ALL {
        let dir = find_category_dir(&src, level).ok_or(format!("no {level} directory under {}", src.display()))?;
        let manifest = relabel(&list_image_files(&dir)?, level)?;
        let out = dst.join(level.as_str());
        std::fs::create_dir_all(&out)?;
        for e in &manifest.entries {
            let png = convert_format(&load_image(&dir.join(&e.source_name))?, ImageFormat::Png)?;
            std::fs::write(out.join(&e.record_id), png)?;
        }
        manifest.write_csv(std::fs::File::create(out.join(MANIFEST_FILE))?)?;
        let first = &manifest.entries[0];
        println!("{level}: {} -> {}", first.source_name, first.record_id);
        manifests.push(manifest);
    }
    let counts = category_counts(&manifests);
    for level in Level::ALL {
        println!("{level:<6} {}", counts.get(level));
    }
    println!("total  {}", counts.total);
    Ok(())
}
