//! Image attribute transformations: brightness, saturation, contrast,
//! grayscale, inversion and binary thresholding. All deterministic.

use crate::imgcore::{FloatImage, HsvBuffer, PixelBuffer, CHANNELS};

/// `255 - r` per channel.
pub fn color_invert(img: &PixelBuffer) -> PixelBuffer {
    img.to_float().map(|v| 1.0 - v).quantize()
}

/// Per channel: `r > threshold` → 255, else 0. `threshold` is in 8-bit units.
pub fn binary_threshold(img: &PixelBuffer, threshold: f64) -> PixelBuffer {
    let data = img
        .data()
        .iter()
        .map(|&v| if f64::from(v) > threshold { 255 } else { 0 })
        .collect();
    PixelBuffer::new(img.width(), img.height(), data).expect("shape preserved")
}

/// Adds `shift` to the HSV value channel, clamping it to [0,1].
pub fn brightness(img: &PixelBuffer, shift: f64) -> PixelBuffer {
    map_hsv(img, |[h, s, v]| [h, s, (v + shift).clamp(0.0, 1.0)])
}

/// Maps HSV saturation to `s·multiplier + offset`, clamped to [0,1].
pub fn saturation(img: &PixelBuffer, multiplier: f64, offset: f64) -> PixelBuffer {
    map_hsv(img, |[h, s, v]| [h, (s * multiplier + offset).clamp(0.0, 1.0), v])
}

fn map_hsv(img: &PixelBuffer, f: impl Fn([f64; 3]) -> [f64; 3]) -> PixelBuffer {
    let mut hsv = HsvBuffer::from_float(&img.to_float());
    hsv.pixels_mut().iter_mut().for_each(|px| *px = f(*px));
    hsv.to_float().quantize()
}

/// `(r - μ)·factor + μ`, where μ is the mean over all pixels and channels.
pub fn contrast(img: &PixelBuffer, factor: f64) -> PixelBuffer {
    let work = img.to_float();
    let mu = work.mean();
    work.map(|v| (v - mu) * factor + mu).quantize()
}

/// Sets every channel to the pixel's channel mean; with `invert`,
/// to `255 - mean`.
pub fn grayscale(img: &PixelBuffer, invert: bool) -> PixelBuffer {
    let mean = img.to_float().channel_mean();
    let data = mean
        .data()
        .iter()
        .flat_map(|&m| [if invert { 1.0 - m } else { m }; CHANNELS])
        .collect();
    FloatImage::new(img.width(), img.height(), CHANNELS, data)
        .expect("shape preserved")
        .quantize()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn px(rgb: [u8; 3]) -> PixelBuffer {
        PixelBuffer::filled(1, 1, rgb).unwrap()
    }

    fn varied() -> PixelBuffer {
        PixelBuffer::from_fn(17, 9, |x, y| [(x * 15) as u8, (y * 28) as u8, (x * y) as u8]).unwrap()
    }

    #[test]
    fn invert_examples() {
        assert_eq!(color_invert(&px([0, 0, 0])).pixel(0, 0), [255, 255, 255]);
        assert_eq!(color_invert(&px([255, 128, 0])).pixel(0, 0), [0, 127, 255]);
        let img = varied();
        assert_eq!(color_invert(&color_invert(&img)), img);
    }

    #[test]
    fn threshold_is_strict() {
        assert!(binary_threshold(&varied(), 255.0).data().iter().all(|&v| v == 0));
        assert_eq!(binary_threshold(&px([200, 128, 129]), 128.0).pixel(0, 0), [255, 0, 255]);
    }

    #[test]
    fn brightness_examples() {
        let img = varied();
        assert_eq!(brightness(&img, 0.0), img);
        let white = px([255, 255, 255]);
        assert_eq!(brightness(&white, 0.3), white);
        // Gray 128 -> v = 128/255, + 0.2 -> 179.0
        assert_eq!(brightness(&px([128, 128, 128]), 0.2).pixel(0, 0), [179, 179, 179]);
        assert_eq!(brightness(&px([10, 10, 10]), -0.5).pixel(0, 0), [0, 0, 0]);
    }

    #[test]
    fn saturation_examples() {
        let img = varied();
        assert_eq!(saturation(&img, 1.0, 0.0), img);
        let desat = saturation(&img, 0.0, 0.0);
        assert!(desat.data().chunks(3).all(|p| p[0] == p[1] && p[1] == p[2]));
        let half = saturation(&px([255, 0, 0]), 0.5, 0.0).pixel(0, 0);
        assert_eq!(half[0], 255);
        assert!((i32::from(half[1]) - 128).abs() <= 1 && half[1] == half[2], "{half:?}");
    }

    #[test]
    fn contrast_examples() {
        let img = varied();
        assert_eq!(contrast(&img, 1.0), img);
        let flat = contrast(&img, 0.0);
        let first = flat.pixel(0, 0);
        assert!(flat.data().chunks(3).all(|p| p == first));
        // Pixels 0.2 and 0.8 (51 and 204), μ = 0.5, c = 0.5 -> 0.35 and 0.65.
        let two = PixelBuffer::new(2, 1, vec![51, 51, 51, 204, 204, 204]).unwrap();
        let out = contrast(&two, 0.5);
        assert_eq!(out.pixel(0, 0), [89, 89, 89]); // 0.35 * 255 = 89.25
        assert_eq!(out.pixel(1, 0), [166, 166, 166]); // 0.65 * 255 = 165.75
    }

    #[test]
    fn grayscale_examples() {
        assert_eq!(grayscale(&px([10, 20, 30]), false).pixel(0, 0), [20, 20, 20]);
        assert_eq!(grayscale(&px([10, 20, 30]), true).pixel(0, 0), [235, 235, 235]);
        let g = PixelBuffer::from_fn(5, 5, |x, y| {
            let v = (x * 40 + y) as u8;
            [v, v, v]
        })
        .unwrap();
        assert_eq!(grayscale(&g, false), g);
    }
}
