use super::{Exec, FloatImage, ImgError, PixelBuffer};

/// Square convolution kernel with odd side length, row-major weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self, ImgError> {
        if size.is_multiple_of(2) {
            return Err(ImgError::InvalidKernel(format!("size {size} is not odd")));
        }
        if weights.len() != size * size {
            return Err(ImgError::InvalidKernel(format!(
                "{} weights for a {size}x{size} kernel",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(ImgError::InvalidKernel("non-finite weight".into()));
        }
        Ok(Self { size, weights })
    }

    pub fn identity() -> Self {
        Self {
            size: 1,
            weights: vec![1.0],
        }
    }

    /// Normalized k×k averaging kernel.
    pub fn box_filter(size: usize) -> Result<Self, ImgError> {
        let n = (size * size) as f64;
        Self::new(size, vec![1.0 / n; size * size])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at offset (dx, dy) from the center.
    pub fn at(&self, dx: isize, dy: isize) -> f64 {
        let r = self.radius() as isize;
        self.weights[((dy + r) as usize) * self.size + (dx + r) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn normalize(mut self) -> Self {
        let s = self.sum();
        self.weights.iter_mut().for_each(|w| *w /= s);
        self
    }
}

/// Normalized 1-D Gaussian taps truncated at 4σ (radius at least 1 tap).
/// `sigma == 0` yields the single tap `[1.0]`.
pub fn gaussian_weights(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = ((4.0 * sigma).ceil() as usize).max(1);
    gaussian_taps(sigma, radius)
}

fn gaussian_taps(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let taps: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / s).collect()
}

/// Disk of the given radius, optionally anti-aliased by a small Gaussian of
/// standard deviation `alias_blur` (3×3 up to radius 8, 5×5 beyond), and
/// normalized to unit sum.
pub fn disk_kernel(radius: f64, alias_blur: f64) -> Result<Kernel, ImgError> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(ImgError::InvalidKernel(format!("disk radius {radius}")));
    }
    if alias_blur.is_nan() || alias_blur < 0.0 {
        return Err(ImgError::InvalidKernel(format!("alias blur {alias_blur}")));
    }
    let half = radius.floor() as isize;
    let size = (2 * half + 1) as usize;
    let r2 = radius * radius;
    let mut weights = Vec::with_capacity(size * size);
    for y in -half..=half {
        for x in -half..=half {
            weights.push(if ((x * x + y * y) as f64) <= r2 { 1.0 } else { 0.0 });
        }
    }
    let disk = Kernel::new(size, weights)?.normalize();
    if alias_blur == 0.0 {
        return Ok(disk);
    }
    let g = gaussian_taps(alias_blur, if radius <= 8.0 { 1 } else { 2 });
    Ok(full_convolve_kernels(&disk, &g).normalize())
}

/// Full (output grows) convolution of a kernel with a separable 1-D filter.
fn full_convolve_kernels(k: &Kernel, taps: &[f64]) -> Kernel {
    let g = taps.len() / 2;
    let n = k.size + 2 * g;
    let mut out = vec![0.0; n * n];
    for ky in 0..k.size {
        for kx in 0..k.size {
            let w = k.weights[ky * k.size + kx];
            if w == 0.0 {
                continue;
            }
            for (i, ty) in taps.iter().enumerate() {
                for (j, tx) in taps.iter().enumerate() {
                    out[(ky + i) * n + (kx + j)] += w * ty * tx;
                }
            }
        }
    }
    Kernel { size: n, weights: out }
}

/// Channel-wise 2-D convolution on the working representation, edge-replicated.
pub fn convolve_float(img: &FloatImage, k: &Kernel, exec: Exec) -> FloatImage {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let r = k.radius() as isize;
    let mut out = FloatImage::zeros(w, h, ch);
    let row_len = out.row_len();
    exec.for_each_row(out.data_mut(), row_len, |y, row| {
        let y = y as isize;
        for x in 0..w as isize {
            for c in 0..ch {
                let mut acc = 0.0;
                for dy in -r..=r {
                    for dx in -r..=r {
                        let wgt = k.at(dx, dy);
                        if wgt != 0.0 {
                            acc += wgt * img.get_clamped(x - dx, y - dy, c);
                        }
                    }
                }
                row[x as usize * ch + c] = acc;
            }
        }
    });
    out
}

/// Channel-wise 2-D convolution of an 8-bit image; output clamped and rounded.
pub fn convolve(img: &PixelBuffer, k: &Kernel) -> PixelBuffer {
    convolve_float(&img.to_float(), k, Exec::default()).quantize()
}

/// Separable Gaussian smoothing, edge-replicated. `sigma == 0` is identity.
pub fn gaussian_blur(img: &FloatImage, sigma: f64, exec: Exec) -> FloatImage {
    if sigma <= 0.0 {
        return img.clone();
    }
    let taps = gaussian_weights(sigma);
    let r = (taps.len() / 2) as isize;
    let (w, h, ch) = (img.width(), img.height(), img.channels());

    let mut horiz = FloatImage::zeros(w, h, ch);
    let row_len = horiz.row_len();
    exec.for_each_row(horiz.data_mut(), row_len, |y, row| {
        for x in 0..w as isize {
            for c in 0..ch {
                let acc: f64 = taps
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t * img.get_clamped(x + i as isize - r, y as isize, c))
                    .sum();
                row[x as usize * ch + c] = acc;
            }
        }
    });

    let mut out = FloatImage::zeros(w, h, ch);
    exec.for_each_row(out.data_mut(), row_len, |y, row| {
        for x in 0..w {
            for c in 0..ch {
                let acc: f64 = taps
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t * horiz.get_clamped(x as isize, y as isize + i as isize - r, c))
                    .sum();
                row[x * ch + c] = acc;
            }
        }
    });
    out
}
