use super::buffer::{quantize_sample, CHANNELS};
use super::{FloatImage, PixelBuffer};

/// Hexcone HSV image: hue in degrees [0,360), saturation and value in [0,1].
#[derive(Clone, Debug, PartialEq)]
pub struct HsvBuffer {
    width: usize,
    height: usize,
    data: Vec<[f64; 3]>,
}

impl HsvBuffer {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn pixels_mut(&mut self) -> &mut [[f64; 3]] {
        &mut self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.data[y * self.width + x]
    }

    pub(crate) fn from_float(img: &FloatImage) -> Self {
        assert_eq!(img.channels(), CHANNELS);
        let data = img
            .data()
            .chunks_exact(CHANNELS)
            .map(|px| rgb_to_hsv_px([px[0], px[1], px[2]]))
            .collect();
        Self {
            width: img.width(),
            height: img.height(),
            data,
        }
    }

    pub(crate) fn to_float(&self) -> FloatImage {
        let data = self.data.iter().flat_map(|&hsv| hsv_to_rgb_px(hsv)).collect();
        FloatImage::new(self.width, self.height, CHANNELS, data).expect("shape preserved")
    }
}

/// Converts one [0,1] RGB triple. Achromatic pixels get hue 0.
pub fn rgb_to_hsv_px([r, g, b]: [f64; 3]) -> [f64; 3] {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    if delta <= 0.0 {
        return [0.0, s, max];
    }
    let sector = if max == r {
        ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let mut h = 60.0 * sector;
    if h >= 360.0 {
        h -= 360.0;
    }
    [h, s, max]
}

/// Inverse of [`rgb_to_hsv_px`]; output is [0,1] RGB (unclamped for out-of-range input).
pub fn hsv_to_rgb_px([h, s, v]: [f64; 3]) -> [f64; 3] {
    let c = v * s;
    let hp = h.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    [r + m, g + m, b + m]
}

pub fn rgb_to_hsv(img: &PixelBuffer) -> HsvBuffer {
    HsvBuffer::from_float(&img.to_float())
}

/// Converts back to 8-bit, rounding half away from zero and clamping.
pub fn hsv_to_rgb(img: &HsvBuffer) -> PixelBuffer {
    let data = img
        .data
        .iter()
        .flat_map(|&hsv| hsv_to_rgb_px(hsv).map(quantize_sample))
        .collect();
    PixelBuffer::new(img.width, img.height, data).expect("shape preserved")
}
