//! Write a synthetic SOCOFing-style tree (Real/Easy/Medium/Hard BMPs).
//!
//!     cargo run --example synth_dataset -- /tmp/socofing-synth

use std::path::PathBuf;

use afrnet::dataset::synthetic::{write_tree, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "socofing-synth".into()).into();
    let config = SyntheticConfig::default();
    let n = write_tree(&root, &config)?;
    println!("wrote {n} images under {}", root.display());
    for dir in ["Real", "Easy", "Medium", "Hard"] {
        let count = std::fs::read_dir(root.join(dir))?.count();
        println!("  {dir:<6} {count}");
    }
    Ok(())
}
