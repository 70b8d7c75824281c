//! Weather effects. Only snow is implemented.

use crate::imgcore::{Distribution, Exec, FloatImage, PixelBuffer, SeededRng, CHANNELS};

use super::blur::{center_zoom, motion_blur};
use super::{CorruptionError, SnowParams};

/// Substream reserved for scalar draws (the motion angle); rows use 0..h.
const SCALAR_STREAM: u64 = u64::MAX - 1;

/// Single-channel snow layer after noise, zoom, threshold and motion blur.
pub fn snow_layer(
    width: usize,
    height: usize,
    p: &SnowParams,
    rng: &SeededRng,
    exec: Exec,
) -> Result<FloatImage, CorruptionError> {
    let draw = Distribution::Normal {
        mean: p.mean,
        std_dev: p.std_dev,
    };
    rng.clone().sample(draw, 0)?;
    let mut layer = FloatImage::zeros(width, height, 1);
    exec.for_each_row(layer.data_mut(), width, |y, row| {
        rng.substream(y as u64)
            .sample_into(draw, row)
            .expect("parameters validated above");
    });
    let layer = center_zoom(&layer, p.zoom, exec);
    // Clamp to [0,1]; only flakes strictly brighter than the threshold survive.
    let layer = layer.map(|v| {
        let v = v.clamp(0.0, 1.0);
        if v > p.threshold {
            v
        } else {
            0.0
        }
    });
    let angle = -135.0 + 90.0 * rng.substream(SCALAR_STREAM).uniform();
    let blurred = motion_blur(&layer, p.blur_radius, p.blur_sigma, angle, exec);
    Ok(blurred.map(|v| v.clamp(0.0, 1.0)))
}

/// Snow: builds the flake layer, brightens the scene toward a lifted
/// grayscale (`blend` is the weight kept on the original), then adds the
/// layer and its 180°-rotated copy.
pub fn snow(img: &PixelBuffer, p: &SnowParams, rng: &SeededRng, exec: Exec) -> Result<PixelBuffer, CorruptionError> {
    let (w, h) = (img.width(), img.height());
    let layer = snow_layer(w, h, p, rng, exec)?;
    let src = img.to_float();
    let gray = src.channel_mean();
    let mut out = src.clone();
    let row_len = out.row_len();
    exec.for_each_row(out.data_mut(), row_len, |y, row| {
        for x in 0..w {
            let lifted = gray.get(x, y, 0) * 1.5 + 0.5;
            let flakes = layer.get(x, y, 0) + layer.get(w - 1 - x, h - 1 - y, 0);
            for c in 0..CHANNELS {
                let v = &mut row[x * CHANNELS + c];
                *v = p.blend * *v + (1.0 - p.blend) * v.max(lifted) + flakes;
            }
        }
    });
    Ok(out.quantize())
}
