//! Rotate, scale, flip and add noise to one print; writes the variants as PNG.
//!
//!     cargo run --example augment_images -- [out-dir]

use afrnet::dataset::synthetic::{generate, SyntheticConfig};
use afrnet::dataset::{augment, convert_format, AugmentOp, ImageFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "augmented".into());
    std::fs::create_dir_all(&out)?;
    let image = generate(&SyntheticConfig::default()).remove(0);
    let ops = [
        AugmentOp::Rotate { degrees: 15.0 },
        AugmentOp::Scale { factor: 1.25 },
        AugmentOp::FlipHorizontal,
        AugmentOp::FlipVertical,
        AugmentOp::GaussianNoise { sigma: 8.0 },
    ];
    let variants = augment(&image.pixels, &ops, 42)?;
    for (op, v) in ops.iter().zip(&variants) {
        let name = format!("{out}/{}.png", format!("{op:?}").split([' ', '{']).next().unwrap_or("op").to_lowercase());
        std::fs::write(&name, convert_format(v, ImageFormat::Png)?)?;
        println!("{op:?}: {}x{} -> {name}", v.width(), v.height());
    }
    Ok(())
}
