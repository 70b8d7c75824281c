use super::{Exec, FloatImage, ImgError, PixelBuffer};

/// Bilinear sample at real coordinates, edge-replicated outside the image.
#[inline]
pub fn sample_bilinear(img: &FloatImage, x: f64, y: f64, c: usize) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (xi, yi) = (x0 as isize, y0 as isize);
    let a = img.get_clamped(xi, yi, c);
    let b = img.get_clamped(xi + 1, yi, c);
    let cc = img.get_clamped(xi, yi + 1, c);
    let d = img.get_clamped(xi + 1, yi + 1, c);
    let top = a + (b - a) * fx;
    let bottom = cc + (d - cc) * fx;
    top + (bottom - top) * fy
}

/// Source coordinate for output index `i` under corner alignment: the first
/// and last output samples land exactly on the first and last input samples.
#[inline]
fn corner_aligned(i: usize, n_in: usize, n_out: usize) -> f64 {
    if n_out == 1 {
        (n_in as f64 - 1.0) / 2.0
    } else {
        i as f64 * (n_in as f64 - 1.0) / (n_out as f64 - 1.0)
    }
}

pub fn resize_float(img: &FloatImage, new_w: usize, new_h: usize, exec: Exec) -> Result<FloatImage, ImgError> {
    if new_w == 0 || new_h == 0 {
        return Err(ImgError::InvalidDimensions {
            width: new_w,
            height: new_h,
        });
    }
    if new_w == img.width() && new_h == img.height() {
        return Ok(img.clone());
    }
    let ch = img.channels();
    let mut out = FloatImage::zeros(new_w, new_h, ch);
    let row_len = out.row_len();
    exec.for_each_row(out.data_mut(), row_len, |y, row| {
        let sy = corner_aligned(y, img.height(), new_h);
        for x in 0..new_w {
            let sx = corner_aligned(x, img.width(), new_w);
            for c in 0..ch {
                row[x * ch + c] = sample_bilinear(img, sx, sy, c);
            }
        }
    });
    Ok(out)
}

pub fn resize_bilinear(img: &PixelBuffer, new_w: usize, new_h: usize) -> Result<PixelBuffer, ImgError> {
    Ok(resize_float(&img.to_float(), new_w, new_h, Exec::default())?.quantize())
}
