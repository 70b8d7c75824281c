//! Physical effects: liquid splatter and elastic deformation.

use crate::imgcore::{
    gaussian_blur, sample_bilinear, Distribution, Exec, FloatImage, PixelBuffer, SeededRng, CHANNELS,
};

use super::{CorruptionError, SplatterParams};

/// Smoothed uniform noise, one substream per row starting at `stream_offset`.
fn smooth_noise(
    width: usize,
    height: usize,
    low: f64,
    sigma: f64,
    stream_offset: u64,
    rng: &SeededRng,
    exec: Exec,
) -> FloatImage {
    let draw = Distribution::Uniform { low, high: 1.0 };
    let mut noise = FloatImage::zeros(width, height, 1);
    exec.for_each_row(noise.data_mut(), width, |y, row| {
        rng.substream(stream_offset + y as u64)
            .sample_into(draw, row)
            .expect("valid uniform bounds");
    });
    gaussian_blur(&noise, sigma, exec)
}

/// Boolean droplet mask covering `round(density · pixels)` pixels: those
/// where smoothed noise exceeds the matching upper quantile.
pub fn splatter_mask(width: usize, height: usize, p: &SplatterParams, rng: &SeededRng, exec: Exec) -> Vec<bool> {
    let n = width * height;
    let covered = (p.density * n as f64).round() as usize;
    if covered == 0 {
        return vec![false; n];
    }
    if covered >= n {
        return vec![true; n];
    }
    let sigma = p.sigma_frac * width.min(height) as f64;
    let field = smooth_noise(width, height, 0.0, sigma, 0, rng, exec);
    let mut sorted = field.data().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let threshold = sorted[n - covered - 1];
    field.data().iter().map(|&v| v > threshold).collect()
}

/// Composites droplets of `color` at `opacity` over the masked pixels.
pub fn splatter(
    img: &PixelBuffer,
    p: &SplatterParams,
    rng: &SeededRng,
    exec: Exec,
) -> Result<PixelBuffer, CorruptionError> {
    if !(0.0..=1.0).contains(&p.density) || !(0.0..=1.0).contains(&p.opacity) {
        return Err(CorruptionError::InvalidParameter(format!(
            "splatter density {} opacity {}",
            p.density, p.opacity
        )));
    }
    if p.density == 0.0 {
        return Ok(img.clone());
    }
    let mask = splatter_mask(img.width(), img.height(), p, rng, exec);
    let mut out = img.to_float();
    for (px, &hit) in out.data_mut().chunks_exact_mut(CHANNELS).zip(&mask) {
        if hit {
            for (v, c) in px.iter_mut().zip(p.color) {
                *v = *v * (1.0 - p.opacity) + c * p.opacity;
            }
        }
    }
    Ok(out.quantize())
}

/// Per-pixel displacement vectors (in pixels).
#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementField {
    pub width: usize,
    pub height: usize,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

impl DisplacementField {
    pub fn max_magnitude(&self) -> f64 {
        self.dx
            .iter()
            .zip(&self.dy)
            .map(|(x, y)| x.hypot(*y))
            .fold(0.0, f64::max)
    }
}

/// Gaussian-smoothed uniform noise on each axis, rescaled so the largest
/// vector has length exactly `alpha`.
pub fn displacement_field(
    width: usize,
    height: usize,
    alpha: f64,
    sigma: f64,
    rng: &SeededRng,
    exec: Exec,
) -> DisplacementField {
    let sx = smooth_noise(width, height, -1.0, sigma, 0, rng, exec);
    let sy = smooth_noise(width, height, -1.0, sigma, height as u64, rng, exec);
    let mut field = DisplacementField {
        width,
        height,
        dx: sx.data().to_vec(),
        dy: sy.data().to_vec(),
    };
    let peak = field.max_magnitude();
    let scale = if peak > 0.0 { alpha / peak } else { 0.0 };
    field.dx.iter_mut().for_each(|v| *v *= scale);
    field.dy.iter_mut().for_each(|v| *v *= scale);
    field
}

/// Warps the image by a smooth random field of peak magnitude `alpha`
/// pixels, smoothing scale `sigma` pixels, bilinear resampling.
pub fn elastic(
    img: &PixelBuffer,
    alpha: f64,
    sigma: f64,
    rng: &SeededRng,
    exec: Exec,
) -> Result<PixelBuffer, CorruptionError> {
    if !(alpha.is_finite() && alpha >= 0.0) || !(sigma.is_finite() && sigma >= 0.0) {
        return Err(CorruptionError::InvalidParameter(format!(
            "elastic alpha {alpha} sigma {sigma}"
        )));
    }
    if alpha == 0.0 {
        return Ok(img.clone());
    }
    let (w, h) = (img.width(), img.height());
    let field = displacement_field(w, h, alpha, sigma, rng, exec);
    let src = img.to_float();
    let mut out = FloatImage::zeros(w, h, CHANNELS);
    let row_len = out.row_len();
    exec.for_each_row(out.data_mut(), row_len, |y, row| {
        for x in 0..w {
            let i = y * w + x;
            let (sx, sy) = (x as f64 + field.dx[i], y as f64 + field.dy[i]);
            for c in 0..CHANNELS {
                row[x * CHANNELS + c] = sample_bilinear(&src, sx, sy, c);
            }
        }
    });
    Ok(out.quantize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corruptions::{CorruptionId, CorruptionParams, SeverityTable};
    use crate::imgcore::StreamKey;

    fn rng(c: &str, level: u8) -> SeededRng {
        SeededRng::new(17, &StreamKey::new("img", c, level))
    }

    fn scene() -> PixelBuffer {
        PixelBuffer::from_fn(64, 48, |x, y| [(x * 4) as u8, (y * 5) as u8, ((x * y) % 251) as u8]).unwrap()
    }

    fn splatter_params(level: u8) -> SplatterParams {
        match SeverityTable::default().params(CorruptionId::Splatter, level).unwrap() {
            CorruptionParams::Splatter(p) => p,
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_density_is_identity() {
        let img = scene();
        let p = SplatterParams {
            density: 0.0,
            ..splatter_params(3)
        };
        assert_eq!(splatter(&img, &p, &rng("splatter", 3), Exec::Parallel).unwrap(), img);
    }

    #[test]
    fn altered_fraction_grows_with_level() {
        // Oracle: count pixels that differ from the input at each shipped level.
        let img = PixelBuffer::filled(80, 60, [128, 128, 128]).unwrap();
        let mut last = 0usize;
        for level in 1..=5 {
            let out = splatter(&img, &splatter_params(level), &rng("splatter", level), Exec::Parallel).unwrap();
            let altered = img
                .data()
                .chunks(3)
                .zip(out.data().chunks(3))
                .filter(|(a, b)| a != b)
                .count();
            assert!(altered > last, "level {level}: {altered} <= {last}");
            last = altered;
        }
    }

    #[test]
    fn mask_covers_density_fraction() {
        let p = splatter_params(4);
        let mask = splatter_mask(100, 50, &p, &rng("splatter", 4), Exec::Parallel);
        let covered = mask.iter().filter(|&&m| m).count();
        assert_eq!(covered, (p.density * 5000.0).round() as usize);
    }

    #[test]
    fn splatter_is_deterministic() {
        let img = scene();
        let p = splatter_params(5);
        let a = splatter(&img, &p, &rng("splatter", 5), Exec::Parallel).unwrap();
        let b = splatter(&img, &p, &rng("splatter", 5), Exec::Sequential).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn elastic_identity_and_constant() {
        let img = scene();
        assert_eq!(
            elastic(&img, 0.0, 3.0, &rng("elastic_transform", 1), Exec::Parallel).unwrap(),
            img
        );
        let c = PixelBuffer::filled(40, 30, [12, 200, 99]).unwrap();
        assert_eq!(
            elastic(&c, 5.0, 2.0, &rng("elastic_transform", 1), Exec::Parallel).unwrap(),
            c
        );
        assert!(elastic(&img, -1.0, 2.0, &rng("elastic_transform", 1), Exec::Parallel).is_err());
    }

    #[test]
    fn field_magnitude_bounded_by_alpha() {
        for (alpha, sigma) in [(1.5, 2.0), (4.0, 0.0), (7.0, 5.0)] {
            let f = displacement_field(50, 40, alpha, sigma, &rng("elastic_transform", 2), Exec::Parallel);
            let peak = f.max_magnitude();
            assert!(peak <= alpha + 1e-12, "{peak} > {alpha}");
            assert!((peak - alpha).abs() < 1e-9);
        }
    }

    #[test]
    fn elastic_moves_pixels() {
        let img = scene();
        let out = elastic(&img, 3.0, 4.0, &rng("elastic_transform", 3), Exec::Parallel).unwrap();
        assert_ne!(out, img);
    }
}
