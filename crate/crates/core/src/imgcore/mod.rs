//! Pixel-level primitives shared by every corruption function.

mod buffer;
mod color;
mod exec;
mod kernel;
mod resize;
mod rng;

pub use buffer::{FloatImage, PixelBuffer, CHANNELS};
pub use color::{hsv_to_rgb, hsv_to_rgb_px, rgb_to_hsv, rgb_to_hsv_px, HsvBuffer};
pub use exec::Exec;
pub use kernel::{convolve, convolve_float, disk_kernel, gaussian_blur, gaussian_weights, Kernel};
pub use resize::{resize_bilinear, resize_float, sample_bilinear};
pub use rng::{Distribution, SeededRng, StreamKey};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImgError {
    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("buffer length {actual} does not match {width}x{height}x{channels}")]
    DataLength {
        width: usize,
        height: usize,
        channels: usize,
        actual: usize,
    },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid distribution parameters: {0}")]
    InvalidDistribution(String),
    #[error("codec error: {0}")]
    Codec(#[from] image::ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
