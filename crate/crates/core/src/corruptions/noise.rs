//! Arithmetic and value-assignment noise.
//!
//! Each image row draws from its own substream (`rng.substream(row)`), so the
//! row loops can run in parallel without changing a single output byte.

use crate::imgcore::{Distribution, Exec, ImgError, PixelBuffer, SeededRng, CHANNELS};

use super::{CorruptionError, ImpulseVariant};

/// Distribution of the additive term `Y` in `r + Y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Additive {
    /// `Y ~ N(0, sigma²)`
    Gaussian { sigma: f64 },
    /// `Y = P / scale` with `P ~ Poisson(lambda)`. Note the mean shift of
    /// `lambda / scale`: additive Poisson noise brightens the image.
    Poisson { lambda: f64, scale: f64 },
}

/// Fills every row of a float copy of `img` via `f(row_rng, row)`.
fn per_row<F>(img: &PixelBuffer, rng: &SeededRng, exec: Exec, f: F) -> Result<PixelBuffer, CorruptionError>
where
    F: Fn(&mut SeededRng, &mut [f64]) -> Result<(), ImgError> + Send + Sync,
{
    let mut work = img.to_float();
    let row_len = work.row_len();
    let failure = std::sync::Mutex::new(None);
    exec.for_each_row(work.data_mut(), row_len, |y, row| {
        let mut r = rng.substream(y as u64);
        if let Err(e) = f(&mut r, row) {
            failure.lock().unwrap().get_or_insert(e);
        }
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e.into());
    }
    Ok(work.quantize())
}

/// `r + Y` per pixel and channel, independent draws, clamped.
pub fn additive_noise(
    img: &PixelBuffer,
    dist: Additive,
    rng: &SeededRng,
    exec: Exec,
) -> Result<PixelBuffer, CorruptionError> {
    let (draw, scale) = match dist {
        Additive::Gaussian { sigma } => (
            Distribution::Normal {
                mean: 0.0,
                std_dev: sigma,
            },
            1.0,
        ),
        Additive::Poisson { lambda, scale } => {
            if !(scale.is_finite() && scale > 0.0) {
                return Err(CorruptionError::InvalidParameter(format!("poisson scale {scale}")));
            }
            (Distribution::Poisson { lambda }, scale)
        }
    };
    // Validate up front so the error does not depend on image size.
    rng.clone().sample(draw, 0)?;
    per_row(img, rng, exec, |r, row| {
        let mut noise = vec![0.0; row.len()];
        r.sample_into(draw, &mut noise)?;
        for (v, n) in row.iter_mut().zip(noise) {
            *v += n / scale;
        }
        Ok(())
    })
}

/// Photon-count formulation: each intensity is resampled as
/// `Poisson(r * scale) / scale`.
pub fn signal_dependent_shot_noise(
    img: &PixelBuffer,
    scale: f64,
    rng: &SeededRng,
    exec: Exec,
) -> Result<PixelBuffer, CorruptionError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CorruptionError::InvalidParameter(format!("poisson scale {scale}")));
    }
    per_row(img, rng, exec, |r, row| {
        for v in row.iter_mut() {
            *v = r.poisson(*v * scale)? / scale;
        }
        Ok(())
    })
}

/// Multiplicative noise `r + r·X`, `X ~ N(0, sigma²)`.
pub fn speckle_noise(
    img: &PixelBuffer,
    sigma: f64,
    rng: &SeededRng,
    exec: Exec,
) -> Result<PixelBuffer, CorruptionError> {
    let draw = Distribution::Normal {
        mean: 0.0,
        std_dev: sigma,
    };
    rng.clone().sample(draw, 0)?;
    per_row(img, rng, exec, |r, row| {
        let mut noise = vec![0.0; row.len()];
        r.sample_into(draw, &mut noise)?;
        for (v, n) in row.iter_mut().zip(noise) {
            *v += *v * n;
        }
        Ok(())
    })
}

/// With probability `p` a pixel gets one value on all channels: black or
/// white with equal odds (salt-and-pepper) or a uniform draw from [0,1]
/// (random-valued).
pub fn impulse_noise(
    img: &PixelBuffer,
    p: f64,
    variant: ImpulseVariant,
    rng: &SeededRng,
    exec: Exec,
) -> Result<PixelBuffer, CorruptionError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CorruptionError::InvalidParameter(format!("impulse probability {p}")));
    }
    per_row(img, rng, exec, |r, row| {
        for px in row.chunks_exact_mut(CHANNELS) {
            // Two draws per pixel regardless of outcome keeps streams aligned.
            let hit = r.uniform();
            let value = r.uniform();
            if hit < p {
                let k = match variant {
                    ImpulseVariant::SaltPepper => {
                        if value < 0.5 {
                            0.0
                        } else {
                            1.0
                        }
                    }
                    ImpulseVariant::RandomValued => value,
                };
                px.fill(k);
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::StreamKey;

    fn rng(tag: &str) -> SeededRng {
        SeededRng::new(11, &StreamKey::new(tag, "noise", 1))
    }

    fn gray(w: usize, h: usize, v: u8) -> PixelBuffer {
        PixelBuffer::filled(w, h, [v, v, v]).unwrap()
    }

    fn sample_std(img: &PixelBuffer) -> f64 {
        let f = img.to_float();
        let m = f.mean();
        (f.data().iter().map(|v| (v - m).powi(2)).sum::<f64>() / f.data().len() as f64).sqrt()
    }

    #[test]
    fn zero_parameters_are_identity() {
        let img = PixelBuffer::from_fn(13, 7, |x, y| [(x * 19) as u8, (y * 30) as u8, 200]).unwrap();
        let r = rng("a");
        assert_eq!(
            additive_noise(&img, Additive::Gaussian { sigma: 0.0 }, &r, Exec::Sequential).unwrap(),
            img
        );
        assert_eq!(
            additive_noise(
                &img,
                Additive::Poisson {
                    lambda: 0.0,
                    scale: 10.0
                },
                &r,
                Exec::Sequential
            )
            .unwrap(),
            img
        );
        assert_eq!(speckle_noise(&img, 0.0, &r, Exec::Sequential).unwrap(), img);
        assert_eq!(
            impulse_noise(&img, 0.0, ImpulseVariant::SaltPepper, &r, Exec::Sequential).unwrap(),
            img
        );
    }

    #[test]
    fn rejects_invalid_parameters() {
        let img = gray(4, 4, 100);
        let r = rng("b");
        assert!(additive_noise(&img, Additive::Gaussian { sigma: -0.1 }, &r, Exec::Sequential).is_err());
        assert!(additive_noise(
            &img,
            Additive::Poisson {
                lambda: -1.0,
                scale: 1.0
            },
            &r,
            Exec::Sequential
        )
        .is_err());
        assert!(speckle_noise(&img, -0.2, &r, Exec::Sequential).is_err());
        assert!(impulse_noise(&img, 1.5, ImpulseVariant::SaltPepper, &r, Exec::Sequential).is_err());
    }

    #[test]
    fn gaussian_std_matches_sigma() {
        // 320*320*3 ≈ 3e5 samples at mid-gray; clamping at 0.1 sigma is rare.
        let img = gray(320, 320, 128);
        let out = additive_noise(&img, Additive::Gaussian { sigma: 0.1 }, &rng("c"), Exec::Parallel).unwrap();
        let s = sample_std(&out);
        // Quantization adds variance 1/(12*255²) ≈ 1.3e-6, negligible.
        assert!((s - 0.1).abs() < 0.002, "std {s}");
    }

    #[test]
    fn additive_poisson_brightens_on_average() {
        let img = gray(200, 200, 100);
        let out = additive_noise(
            &img,
            Additive::Poisson {
                lambda: 2.0,
                scale: 40.0,
            },
            &rng("d"),
            Exec::Parallel,
        )
        .unwrap();
        let shift = out.mean() / 255.0 - img.mean() / 255.0;
        assert!((shift - 2.0 / 40.0).abs() < 0.003, "shift {shift}");
    }

    #[test]
    fn signal_dependent_preserves_mean() {
        let img = gray(200, 200, 128);
        let out = signal_dependent_shot_noise(&img, 30.0, &rng("e"), Exec::Parallel).unwrap();
        assert!((out.mean() - img.mean()).abs() < 1.0);
        assert_ne!(out, img);
    }

    #[test]
    fn speckle_annihilated_on_black() {
        let img = gray(30, 30, 0);
        assert_eq!(speckle_noise(&img, 0.8, &rng("f"), Exec::Parallel).unwrap(), img);
    }

    #[test]
    fn speckle_std_scales_with_intensity() {
        // Var(r·X) = r²σ² -> 0.5 * 0.2 = 0.1.
        let v = 127.5f64.round() as u8; // 128 -> r = 0.50196
        let img = gray(320, 320, v);
        let out = speckle_noise(&img, 0.2, &rng("g"), Exec::Parallel).unwrap();
        let expected = (f64::from(v) / 255.0) * 0.2;
        let s = sample_std(&out);
        assert!((s - expected).abs() < 0.002, "std {s} vs {expected}");
    }

    #[test]
    fn salt_pepper_full_probability() {
        let img = gray(40, 40, 90);
        let out = impulse_noise(&img, 1.0, ImpulseVariant::SaltPepper, &rng("h"), Exec::Parallel).unwrap();
        assert!(out.data().iter().all(|&v| v == 0 || v == 255));
        // Both values appear, and all channels of a pixel agree.
        assert!(out.data().contains(&0) && out.data().contains(&255));
        assert!(out.data().chunks(3).all(|p| p[0] == p[1] && p[1] == p[2]));
    }

    #[test]
    fn impulse_alteration_fraction() {
        for variant in [ImpulseVariant::SaltPepper, ImpulseVariant::RandomValued] {
            let img = gray(400, 400, 77);
            let out = impulse_noise(&img, 0.05, variant, &rng("i"), Exec::Parallel).unwrap();
            let n = (img.width() * img.height()) as f64;
            let changed = img
                .data()
                .chunks(3)
                .zip(out.data().chunks(3))
                .filter(|(a, b)| a != b)
                .count() as f64;
            let frac = changed / n;
            // Binomial sd = sqrt(0.05*0.95/1.6e5) ≈ 5.4e-4; random-valued may
            // hit 77 itself with probability ~1/255.
            assert!((frac - 0.05).abs() < 0.003, "{variant:?}: {frac}");
        }
    }
}
