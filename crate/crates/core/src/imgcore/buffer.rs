use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbImage};
use sha2::{Digest, Sha256};

use super::ImgError;

/// Number of color channels carried by every [`PixelBuffer`] (RGB order).
pub const CHANNELS: usize = 3;

/// An 8-bit RGB image, row-major, interleaved channels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PixelBuffer {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl PixelBuffer {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImgError> {
        if width == 0 || height == 0 {
            return Err(ImgError::InvalidDimensions { width, height });
        }
        if data.len() != width * height * CHANNELS {
            return Err(ImgError::DataLength {
                width,
                height,
                channels: CHANNELS,
                actual: data.len(),
            });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self, ImgError> {
        Self::from_fn(width, height, |_, _| rgb)
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self, ImgError> {
        let mut data = Vec::with_capacity(width * height * CHANNELS);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * CHANNELS;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * CHANNELS;
        self.data[i..i + CHANNELS].copy_from_slice(&rgb);
    }

    /// Promotes to the [0,1] working representation.
    pub fn to_float(&self) -> FloatImage {
        FloatImage {
            width: self.width,
            height: self.height,
            channels: CHANNELS,
            data: self.data.iter().map(|&v| f64::from(v) / 255.0).collect(),
        }
    }

    /// Mean stored intensity over all pixels and channels, in [0,255].
    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&v| f64::from(v)).sum::<f64>() / self.data.len() as f64
    }

    /// SHA-256 over the dimensions and raw samples, hex encoded.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.width as u64).to_le_bytes());
        hasher.update((self.height as u64).to_le_bytes());
        hasher.update(&self.data);
        hex::encode(hasher.finalize())
    }

    pub fn from_rgb_image(img: RgbImage) -> Result<Self, ImgError> {
        let (w, h) = img.dimensions();
        Self::new(w as usize, h as usize, img.into_raw())
    }

    pub fn to_rgb_image(&self) -> RgbImage {
        RgbImage::from_raw(self.width as u32, self.height as u32, self.data.clone())
            .expect("dimensions checked at construction")
    }

    /// Reads any PNG or JPEG file, dropping alpha and converting to RGB8.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ImgError> {
        let img = image::open(path)?;
        Self::from_rgb_image(img.to_rgb8())
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, ImgError> {
        let img = image::load_from_memory(bytes)?;
        Self::from_rgb_image(img.to_rgb8())
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, ImgError> {
        let mut out = Cursor::new(Vec::new());
        self.to_rgb_image().write_to(&mut out, ImageFormat::Png)?;
        Ok(out.into_inner())
    }
}

/// Real-valued working image. Intensities are nominally in [0,1] but may
/// leave that range between pipeline stages; [`FloatImage::quantize`] clamps.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl FloatImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self, ImgError> {
        if width == 0 || height == 0 {
            return Err(ImgError::InvalidDimensions { width, height });
        }
        if data.len() != width * height * channels {
            return Err(ImgError::DataLength {
                width,
                height,
                channels,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// All-zero image. Panics on zero dimensions.
    pub fn zeros(width: usize, height: usize, channels: usize) -> Self {
        Self::new(width, height, channels, vec![0.0; width * height * channels]).expect("non-zero dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row_len(&self) -> usize {
        self.width * self.channels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    /// Sample with coordinates clamped to the image (edge replication).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize, c: usize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y, c)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..*self
        }
    }

    /// Per-pixel channel mean as a single-channel image.
    pub fn channel_mean(&self) -> Self {
        let data = self
            .data
            .chunks_exact(self.channels)
            .map(|px| px.iter().sum::<f64>() / self.channels as f64)
            .collect();
        Self {
            width: self.width,
            height: self.height,
            channels: 1,
            data,
        }
    }

    /// Clamp to [0,1], scale to [0,255], round half away from zero.
    /// Only valid for 3-channel images.
    pub fn quantize(&self) -> PixelBuffer {
        assert_eq!(self.channels, CHANNELS, "quantize needs an RGB image");
        let data = self.data.iter().map(|&v| quantize_sample(v)).collect();
        PixelBuffer {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

#[inline]
pub(crate) fn quantize_sample(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
