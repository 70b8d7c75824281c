//! Blurring effects: defocus (disk kernel), zoom, frosted glass, and the
//! directional motion blur used by the snow pipeline.

use crate::imgcore::{
    convolve_float, disk_kernel, gaussian_blur, sample_bilinear, Exec, FloatImage, PixelBuffer, SeededRng,
};

use super::CorruptionError;

/// Channel-wise convolution with an anti-aliased disk of `radius` pixels.
pub fn defocus_blur(
    img: &PixelBuffer,
    radius: f64,
    alias_blur: f64,
    exec: Exec,
) -> Result<PixelBuffer, CorruptionError> {
    let k = disk_kernel(radius, alias_blur)?;
    Ok(convolve_float(&img.to_float(), &k, exec).quantize())
}

/// Magnifies `img` by `factor` about its center, keeping the size: output
/// pixel `p` samples the source at `center + (p - center) / factor`.
pub fn center_zoom(img: &FloatImage, factor: f64, exec: Exec) -> FloatImage {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let mut out = FloatImage::zeros(w, h, ch);
    let row_len = out.row_len();
    exec.for_each_row(out.data_mut(), row_len, |y, row| {
        let sy = cy + (y as f64 - cy) / factor;
        for x in 0..w {
            let sx = cx + (x as f64 - cx) / factor;
            for c in 0..ch {
                row[x * ch + c] = sample_bilinear(img, sx, sy, c);
            }
        }
    });
    out
}

/// Zoom factors `1 + k·step` for `k ≥ 1` up to `max_zoom` (inclusive, with a
/// small tolerance for accumulated rounding).
pub fn zoom_factors(max_zoom: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 1;
    loop {
        let z = 1.0 + k as f64 * step;
        if z > max_zoom + 1e-9 {
            break;
        }
        out.push(z);
        k += 1;
    }
    out
}

/// Averages the original with center-zoomed copies at every factor in
/// [`zoom_factors`]. With no factors (max_zoom below `1 + step`) the image
/// is returned unchanged.
pub fn zoom_blur(img: &PixelBuffer, max_zoom: f64, step: f64, exec: Exec) -> Result<PixelBuffer, CorruptionError> {
    if !(max_zoom >= 1.0 && step > 0.0) {
        return Err(CorruptionError::InvalidParameter(format!(
            "zoom blur max_zoom {max_zoom}, step {step}"
        )));
    }
    let factors = zoom_factors(max_zoom, step);
    if factors.is_empty() {
        return Ok(img.clone());
    }
    let src = img.to_float();
    let mut acc = src.clone();
    for z in &factors {
        let zoomed = center_zoom(&src, *z, exec);
        acc.data_mut().iter_mut().zip(zoomed.data()).for_each(|(a, b)| *a += b);
    }
    let n = (factors.len() + 1) as f64;
    Ok(acc.map(|v| v / n).quantize())
}

/// The pixel-shuffling stage of glass blur. Scans the interior bottom-up,
/// swapping each pixel with one at a random offset in `[-max_delta, max_delta)`
/// on each axis. A pure permutation of pixels.
pub fn glass_swaps(img: &PixelBuffer, max_delta: u32, iterations: u32, rng: &SeededRng) -> PixelBuffer {
    let mut out = img.clone();
    let (w, h) = (img.width() as i64, img.height() as i64);
    let d = i64::from(max_delta);
    if d == 0 {
        return out;
    }
    let mut rng = rng.clone();
    for _ in 0..iterations {
        let mut y = h - d;
        while y > d {
            let mut x = w - d;
            while x > d {
                let dx = rng.uniform_int(-d, d);
                let dy = rng.uniform_int(-d, d);
                let (x2, y2) = (x + dx, y + dy);
                let a = out.pixel(x as usize, y as usize);
                let b = out.pixel(x2 as usize, y2 as usize);
                out.set_pixel(x as usize, y as usize, b);
                out.set_pixel(x2 as usize, y2 as usize, a);
                x -= 1;
            }
            y -= 1;
        }
    }
    out
}

/// Frosted-glass blur: [`glass_swaps`] followed by Gaussian smoothing.
pub fn glass_blur(
    img: &PixelBuffer,
    sigma: f64,
    max_delta: u32,
    iterations: u32,
    rng: &SeededRng,
    exec: Exec,
) -> PixelBuffer {
    let swapped = glass_swaps(img, max_delta, iterations, rng);
    if sigma <= 0.0 {
        return swapped;
    }
    gaussian_blur(&swapped.to_float(), sigma, exec).quantize()
}

/// One-sided directional blur: taps `k = 0..=radius` along `angle_deg`
/// with Gaussian weights `exp(-k²/2σ²)`, bilinear sampled, edge-replicated.
pub fn motion_blur(img: &FloatImage, radius: u32, sigma: f64, angle_deg: f64, exec: Exec) -> FloatImage {
    if radius == 0 {
        return img.clone();
    }
    let weights: Vec<f64> = (0..=radius)
        .map(|k| {
            if sigma > 0.0 {
                (-(f64::from(k * k)) / (2.0 * sigma * sigma)).exp()
            } else if k == 0 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let (dx, dy) = (angle_deg.to_radians().cos(), angle_deg.to_radians().sin());
    let (w, ch) = (img.width(), img.channels());
    let mut out = FloatImage::zeros(w, img.height(), ch);
    let row_len = out.row_len();
    exec.for_each_row(out.data_mut(), row_len, |y, row| {
        for x in 0..w {
            for c in 0..ch {
                let acc: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(k, wk)| {
                        let k = k as f64;
                        wk * sample_bilinear(img, x as f64 - k * dx, y as f64 - k * dy, c)
                    })
                    .sum();
                row[x * ch + c] = acc / total;
            }
        }
    });
    out
}
