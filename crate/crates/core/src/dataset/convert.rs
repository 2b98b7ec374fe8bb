use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, GrayImage};

use super::DatasetError;
use crate::pixels::GrayMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
}

/// Encode a grayscale matrix losslessly.
pub fn convert_format(pixels: &GrayMatrix, target: ImageFormat) -> Result<Vec<u8>, DatasetError> {
    let fail = || DatasetError::EncodeFailure {
        width: pixels.width(),
        height: pixels.height(),
    };
    if pixels.is_empty() {
        return Err(fail());
    }
    let img = GrayImage::from_raw(
        pixels.width() as u32,
        pixels.height() as u32,
        pixels.data().to_vec(),
    )
    .ok_or_else(fail)?;
    let mut out = Vec::new();
    match target {
        ImageFormat::Png => img
            .write_to(&mut Cursor::new(&mut out), image::ImageFormat::Png)
            .map_err(|_| fail())?,
    }
    Ok(out)
}

pub fn decode_png(bytes: &[u8]) -> Result<GrayMatrix, DatasetError> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| DatasetError::Decode(e.to_string()))?;
    Ok(to_gray(img))
}

/// Read any supported image (BMP or PNG) as 8-bit luma.
pub fn load_image(path: &Path) -> Result<GrayMatrix, DatasetError> {
    let img = image::open(path).map_err(|e| DatasetError::Decode(format!("{}: {e}", path.display())))?;
    Ok(to_gray(img))
}

fn to_gray(img: DynamicImage) -> GrayMatrix {
    let luma = img.into_luma8();
    let (w, h) = luma.dimensions();
    GrayMatrix::new(w as usize, h as usize, luma.into_raw()).expect("luma buffer matches dimensions")
}
