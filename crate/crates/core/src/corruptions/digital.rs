//! Digitization artifacts: pixelation and JPEG compression.

use image::codecs::jpeg::JpegEncoder;
use image::ExtendedColorType;

use crate::imgcore::{resize_float, Exec, ImgError, PixelBuffer};

use super::CorruptionError;

/// Bilinear downsample to `(⌈w·factor⌉, ⌈h·factor⌉)` and back, quantizing once.
pub fn pixelate(img: &PixelBuffer, factor: f64, exec: Exec) -> Result<PixelBuffer, CorruptionError> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(CorruptionError::InvalidParameter(format!("pixelate factor {factor}")));
    }
    let (w, h) = (img.width(), img.height());
    let small_w = ((w as f64 * factor).ceil() as usize).max(1);
    let small_h = ((h as f64 * factor).ceil() as usize).max(1);
    let src = img.to_float();
    let small = resize_float(&src, small_w, small_h, exec)?;
    Ok(resize_float(&small, w, h, exec)?.quantize())
}

/// Baseline JPEG encode at `quality` (1–100) and decode back.
pub fn jpeg_compress(img: &PixelBuffer, quality: u8) -> Result<PixelBuffer, CorruptionError> {
    if !(1..=100).contains(&quality) {
        return Err(CorruptionError::InvalidParameter(format!("jpeg quality {quality}")));
    }
    let mut bytes = Vec::new();
    JpegEncoder::new_with_quality(&mut bytes, quality)
        .encode(
            img.data(),
            img.width() as u32,
            img.height() as u32,
            ExtendedColorType::Rgb8,
        )
        .map_err(ImgError::from)?;
    Ok(PixelBuffer::decode(&bytes)?)
}
