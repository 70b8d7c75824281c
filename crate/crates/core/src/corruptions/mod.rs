//! The corruption catalog and its dispatcher.
//!
//! Every function computes on the [0,1] working representation and quantizes
//! once at the end. Level 0 is the identity for every corruption. Stochastic
//! corruptions draw only from the [`SeededRng`] stream keyed by
//! (root seed, image id, corruption id, level), so outputs are reproducible
//! and independent of scheduling.

pub mod attribute;
pub mod blur;
pub mod digital;
pub mod noise;
pub mod physical;
mod severity;
pub mod weather;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgcore::{Exec, ImgError, PixelBuffer, SeededRng, StreamKey};

pub use severity::{
    BrightnessParams, ContrastParams, CorruptionParams, DefocusParams, ElasticParams, GaussianParams, GlassParams,
    ImpulseParams, ImpulseVariant, JpegParams, PixelateParams, SaturateParams, SeverityTable, ShotMode, ShotParams,
    SnowParams, SpeckleParams, SplatterParams, ThresholdParams, ZoomParams, LEVELS,
};

#[derive(Debug, Error)]
pub enum CorruptionError {
    #[error("unknown corruption id `{0}`")]
    UnknownCorruption(String),
    #[error("severity level {0} outside [0,5]")]
    InvalidLevel(u8),
    #[error("corruption `{0}` is not configured in the severity table")]
    NotInTable(String),
    #[error("parameters for `{actual}` given to `{expected}`")]
    ParamMismatch { expected: String, actual: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("severity table: {0}")]
    Table(String),
    #[error(transparent)]
    Image(#[from] ImgError),
}

/// Catalog of corruption functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionId {
    ShotNoise,
    GaussianNoise,
    ImpulseNoise,
    SpeckleNoise,
    DefocusBlur,
    ZoomBlur,
    Snow,
    Brightness,
    Contrast,
    Saturate,
    ElasticTransform,
    Splatter,
    Pixelate,
    JpegCompression,
    GlassBlur,
    Grayscale,
    ColorInvert,
    GrayscaleInvert,
    BinaryThreshold,
}

impl CorruptionId {
    pub const ALL: [CorruptionId; 19] = [
        Self::ShotNoise,
        Self::GaussianNoise,
        Self::ImpulseNoise,
        Self::SpeckleNoise,
        Self::DefocusBlur,
        Self::ZoomBlur,
        Self::Snow,
        Self::Brightness,
        Self::Contrast,
        Self::Saturate,
        Self::ElasticTransform,
        Self::Splatter,
        Self::Pixelate,
        Self::JpegCompression,
        Self::GlassBlur,
        Self::Grayscale,
        Self::ColorInvert,
        Self::GrayscaleInvert,
        Self::BinaryThreshold,
    ];

    /// The fourteen corruptions of the standard benchmark, in report order.
    pub const BENCHMARK: [CorruptionId; 14] = [
        Self::ShotNoise,
        Self::GaussianNoise,
        Self::ImpulseNoise,
        Self::SpeckleNoise,
        Self::DefocusBlur,
        Self::ZoomBlur,
        Self::Snow,
        Self::Brightness,
        Self::Contrast,
        Self::Saturate,
        Self::ElasticTransform,
        Self::Splatter,
        Self::Pixelate,
        Self::JpegCompression,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ShotNoise => "shot_noise",
            Self::GaussianNoise => "gaussian_noise",
            Self::ImpulseNoise => "impulse_noise",
            Self::SpeckleNoise => "speckle_noise",
            Self::DefocusBlur => "defocus_blur",
            Self::ZoomBlur => "zoom_blur",
            Self::Snow => "snow",
            Self::Brightness => "brightness",
            Self::Contrast => "contrast",
            Self::Saturate => "saturate",
            Self::ElasticTransform => "elastic_transform",
            Self::Splatter => "splatter",
            Self::Pixelate => "pixelate",
            Self::JpegCompression => "jpeg_compression",
            Self::GlassBlur => "glass_blur",
            Self::Grayscale => "grayscale",
            Self::ColorInvert => "color_invert",
            Self::GrayscaleInvert => "grayscale_invert",
            Self::BinaryThreshold => "binary_threshold",
        }
    }

    /// Whether the output depends on the random stream.
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Self::ShotNoise
                | Self::GaussianNoise
                | Self::ImpulseNoise
                | Self::SpeckleNoise
                | Self::GlassBlur
                | Self::Snow
                | Self::Splatter
                | Self::ElasticTransform
        )
    }
}

impl fmt::Display for CorruptionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorruptionId {
    type Err = CorruptionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CorruptionError::UnknownCorruption(s.to_string()))
    }
}

/// Everything needed to reproduce one augmentation of one image.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorruptionSpec {
    corruption: CorruptionId,
    level: u8,
    params: Option<CorruptionParams>,
    root_seed: u64,
    image_id: String,
}

impl CorruptionSpec {
    /// `params` must be `None` exactly when `level == 0`.
    pub fn new(
        corruption: CorruptionId,
        level: u8,
        params: Option<CorruptionParams>,
        root_seed: u64,
        image_id: impl Into<String>,
    ) -> Result<Self, CorruptionError> {
        if level as usize > LEVELS {
            return Err(CorruptionError::InvalidLevel(level));
        }
        match (&params, level) {
            (None, 0) => {}
            (Some(p), l) if l > 0 => {
                if p.corruption() != corruption {
                    return Err(CorruptionError::ParamMismatch {
                        expected: corruption.to_string(),
                        actual: p.corruption().to_string(),
                    });
                }
                p.validate().map_err(CorruptionError::InvalidParameter)?;
            }
            (None, _) => {
                return Err(CorruptionError::InvalidParameter(format!(
                    "level {level} needs a parameter record"
                )))
            }
            (Some(_), _) => return Err(CorruptionError::InvalidParameter("level 0 takes no parameters".into())),
        }
        Ok(Self {
            corruption,
            level,
            params,
            root_seed,
            image_id: image_id.into(),
        })
    }

    pub fn corruption(&self) -> CorruptionId {
        self.corruption
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn params(&self) -> Option<&CorruptionParams> {
        self.params.as_ref()
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn stream_key(&self) -> StreamKey {
        StreamKey::new(self.image_id.clone(), self.corruption.as_str(), self.level)
    }

    pub fn rng(&self) -> SeededRng {
        SeededRng::new(self.root_seed, &self.stream_key())
    }
}

/// Applies a corruption with the default execution strategy.
pub fn apply(spec: &CorruptionSpec, img: &PixelBuffer) -> Result<PixelBuffer, CorruptionError> {
    apply_with(spec, img, Exec::default())
}

pub fn apply_with(spec: &CorruptionSpec, img: &PixelBuffer, exec: Exec) -> Result<PixelBuffer, CorruptionError> {
    let Some(params) = spec.params else {
        return Ok(img.clone());
    };
    let rng = spec.rng();
    use CorruptionParams as P;
    let out = match params {
        P::GaussianNoise(p) => noise::additive_noise(img, noise::Additive::Gaussian { sigma: p.sigma }, &rng, exec)?,
        P::ShotNoise(p) => match p.mode {
            ShotMode::Additive => noise::additive_noise(
                img,
                noise::Additive::Poisson {
                    lambda: p.lambda,
                    scale: p.scale,
                },
                &rng,
                exec,
            )?,
            ShotMode::SignalDependent => noise::signal_dependent_shot_noise(img, p.scale, &rng, exec)?,
        },
        P::ImpulseNoise(p) => noise::impulse_noise(img, p.p, p.variant, &rng, exec)?,
        P::SpeckleNoise(p) => noise::speckle_noise(img, p.sigma, &rng, exec)?,
        P::DefocusBlur(p) => blur::defocus_blur(img, p.radius, p.alias_blur, exec)?,
        P::ZoomBlur(p) => blur::zoom_blur(img, p.max_zoom, p.zoom_step, exec)?,
        P::GlassBlur(p) => blur::glass_blur(img, p.sigma, p.max_delta, p.iterations, &rng, exec),
        P::Snow(p) => weather::snow(img, &p, &rng, exec)?,
        P::Brightness(p) => attribute::brightness(img, p.shift),
        P::Contrast(p) => attribute::contrast(img, p.factor),
        P::Saturate(p) => attribute::saturation(img, p.multiplier, p.offset),
        P::Grayscale => attribute::grayscale(img, false),
        P::ColorInvert => attribute::color_invert(img),
        P::GrayscaleInvert => attribute::grayscale(img, true),
        P::BinaryThreshold(p) => attribute::binary_threshold(img, p.threshold),
        P::Splatter(p) => physical::splatter(img, &p, &rng, exec)?,
        P::ElasticTransform(p) => {
            let side = img.width().min(img.height()) as f64;
            physical::elastic(img, p.alpha_frac * side, p.sigma_frac * side, &rng, exec)?
        }
        P::Pixelate(p) => digital::pixelate(img, p.factor, exec)?,
        P::JpegCompression(p) => digital::jpeg_compress(img, p.quality)?,
    };
    Ok(out)
}
