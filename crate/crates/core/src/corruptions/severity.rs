//! Severity tables: the per-level parameter records for every corruption.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{CorruptionError, CorruptionId, CorruptionSpec};

/// Number of non-identity severity levels.
pub const LEVELS: usize = 5;

const DEFAULT_TABLE: &str = include_str!("../../data/severity_v1.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotMode {
    /// `r + Poisson(lambda) / scale`
    Additive,
    /// `Poisson(r * scale) / scale`
    SignalDependent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpulseVariant {
    SaltPepper,
    RandomValued,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianParams {
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotParams {
    pub lambda: f64,
    pub scale: f64,
    #[serde(default = "default_shot_mode")]
    pub mode: ShotMode,
}

fn default_shot_mode() -> ShotMode {
    ShotMode::Additive
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpulseParams {
    pub p: f64,
    #[serde(default = "default_impulse_variant")]
    pub variant: ImpulseVariant,
}

fn default_impulse_variant() -> ImpulseVariant {
    ImpulseVariant::SaltPepper
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeckleParams {
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefocusParams {
    pub radius: f64,
    pub alias_blur: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoomParams {
    pub max_zoom: f64,
    pub zoom_step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlassParams {
    pub sigma: f64,
    pub max_delta: u32,
    pub iterations: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnowParams {
    pub mean: f64,
    pub std_dev: f64,
    pub zoom: f64,
    pub threshold: f64,
    pub blur_radius: u32,
    pub blur_sigma: f64,
    pub blend: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrightnessParams {
    pub shift: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContrastParams {
    pub factor: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturateParams {
    pub multiplier: f64,
    pub offset: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdParams {
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplatterParams {
    pub density: f64,
    pub sigma_frac: f64,
    pub color: [f64; 3],
    pub opacity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticParams {
    pub alpha_frac: f64,
    pub sigma_frac: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PixelateParams {
    pub factor: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JpegParams {
    pub quality: u8,
}

/// One resolved parameter record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "corruption", rename_all = "snake_case")]
pub enum CorruptionParams {
    GaussianNoise(GaussianParams),
    ShotNoise(ShotParams),
    ImpulseNoise(ImpulseParams),
    SpeckleNoise(SpeckleParams),
    DefocusBlur(DefocusParams),
    ZoomBlur(ZoomParams),
    GlassBlur(GlassParams),
    Snow(SnowParams),
    Brightness(BrightnessParams),
    Contrast(ContrastParams),
    Saturate(SaturateParams),
    Grayscale,
    ColorInvert,
    GrayscaleInvert,
    BinaryThreshold(ThresholdParams),
    Splatter(SplatterParams),
    ElasticTransform(ElasticParams),
    Pixelate(PixelateParams),
    JpegCompression(JpegParams),
}

impl CorruptionParams {
    pub fn corruption(&self) -> CorruptionId {
        use CorruptionId as C;
        match self {
            Self::GaussianNoise(_) => C::GaussianNoise,
            Self::ShotNoise(_) => C::ShotNoise,
            Self::ImpulseNoise(_) => C::ImpulseNoise,
            Self::SpeckleNoise(_) => C::SpeckleNoise,
            Self::DefocusBlur(_) => C::DefocusBlur,
            Self::ZoomBlur(_) => C::ZoomBlur,
            Self::GlassBlur(_) => C::GlassBlur,
            Self::Snow(_) => C::Snow,
            Self::Brightness(_) => C::Brightness,
            Self::Contrast(_) => C::Contrast,
            Self::Saturate(_) => C::Saturate,
            Self::Grayscale => C::Grayscale,
            Self::ColorInvert => C::ColorInvert,
            Self::GrayscaleInvert => C::GrayscaleInvert,
            Self::BinaryThreshold(_) => C::BinaryThreshold,
            Self::Splatter(_) => C::Splatter,
            Self::ElasticTransform(_) => C::ElasticTransform,
            Self::Pixelate(_) => C::Pixelate,
            Self::JpegCompression(_) => C::JpegCompression,
        }
    }

    /// Checks the documented valid range of every field.
    pub fn validate(&self) -> Result<(), String> {
        fn nonneg(name: &str, v: f64) -> Result<(), String> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(format!("{name} must be finite and >= 0, got {v}"))
            }
        }
        fn unit(name: &str, v: f64) -> Result<(), String> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(format!("{name} must lie in [0,1], got {v}"))
            }
        }
        fn finite(name: &str, v: f64) -> Result<(), String> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite, got {v}"))
            }
        }
        match *self {
            Self::GaussianNoise(p) => nonneg("sigma", p.sigma),
            Self::ShotNoise(p) => {
                nonneg("lambda", p.lambda)?;
                if !(p.scale.is_finite() && p.scale > 0.0) {
                    return Err(format!("scale must be > 0, got {}", p.scale));
                }
                Ok(())
            }
            Self::ImpulseNoise(p) => unit("p", p.p),
            Self::SpeckleNoise(p) => nonneg("sigma", p.sigma),
            Self::DefocusBlur(p) => {
                if !(p.radius.is_finite() && p.radius > 0.0) {
                    return Err(format!("radius must be > 0, got {}", p.radius));
                }
                nonneg("alias_blur", p.alias_blur)
            }
            Self::ZoomBlur(p) => {
                if !(p.max_zoom.is_finite() && p.max_zoom >= 1.0) {
                    return Err(format!("max_zoom must be >= 1, got {}", p.max_zoom));
                }
                if !(p.zoom_step.is_finite() && p.zoom_step > 0.0) {
                    return Err(format!("zoom_step must be > 0, got {}", p.zoom_step));
                }
                Ok(())
            }
            Self::GlassBlur(p) => nonneg("sigma", p.sigma),
            Self::Snow(p) => {
                finite("mean", p.mean)?;
                nonneg("std_dev", p.std_dev)?;
                if !(p.zoom.is_finite() && p.zoom >= 1.0) {
                    return Err(format!("zoom must be >= 1, got {}", p.zoom));
                }
                unit("threshold", p.threshold)?;
                nonneg("blur_sigma", p.blur_sigma)?;
                unit("blend", p.blend)
            }
            Self::Brightness(p) => finite("shift", p.shift),
            Self::Contrast(p) => nonneg("factor", p.factor),
            Self::Saturate(p) => {
                finite("multiplier", p.multiplier)?;
                finite("offset", p.offset)
            }
            Self::Grayscale | Self::ColorInvert | Self::GrayscaleInvert => Ok(()),
            Self::BinaryThreshold(p) => {
                if (0.0..=255.0).contains(&p.threshold) {
                    Ok(())
                } else {
                    Err(format!("threshold must lie in [0,255], got {}", p.threshold))
                }
            }
            Self::Splatter(p) => {
                unit("density", p.density)?;
                nonneg("sigma_frac", p.sigma_frac)?;
                for c in p.color {
                    unit("color", c)?;
                }
                unit("opacity", p.opacity)
            }
            Self::ElasticTransform(p) => {
                nonneg("alpha_frac", p.alpha_frac)?;
                nonneg("sigma_frac", p.sigma_frac)
            }
            Self::Pixelate(p) => {
                if p.factor > 0.0 && p.factor <= 1.0 {
                    Ok(())
                } else {
                    Err(format!("factor must lie in (0,1], got {}", p.factor))
                }
            }
            Self::JpegCompression(p) => {
                if (1..=100).contains(&p.quality) {
                    Ok(())
                } else {
                    Err(format!("quality must lie in [1,100], got {}", p.quality))
                }
            }
        }
    }
}

#[derive(Deserialize)]
struct Section<T> {
    levels: Vec<T>,
}

#[derive(Deserialize)]
struct TableFile {
    version: String,
    #[serde(flatten)]
    sections: BTreeMap<String, toml::Value>,
}

/// Maps every configured corruption to its five ordered parameter records.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeverityTable {
    version: String,
    entries: BTreeMap<CorruptionId, [CorruptionParams; LEVELS]>,
}

impl Default for SeverityTable {
    /// The shipped table (version "1").
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_TABLE).expect("shipped severity table is valid")
    }
}

impl SeverityTable {
    pub fn from_toml_str(src: &str) -> Result<Self, CorruptionError> {
        let file: TableFile = toml::from_str(src).map_err(|e| CorruptionError::Table(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for (name, value) in file.sections {
            let id: CorruptionId = name.parse()?;
            let records = parse_section(id, value).map_err(|e| CorruptionError::Table(format!("[{name}]: {e}")))?;
            entries.insert(id, records);
        }
        Ok(Self {
            version: file.version,
            entries,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorruptionError> {
        let path = path.as_ref();
        let src =
            std::fs::read_to_string(path).map_err(|e| CorruptionError::Table(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&src)
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn corruptions(&self) -> impl Iterator<Item = CorruptionId> + '_ {
        self.entries.keys().copied()
    }

    pub fn contains(&self, id: CorruptionId) -> bool {
        self.entries.contains_key(&id)
    }

    /// Parameter record for a level in 1..=5.
    pub fn params(&self, id: CorruptionId, level: u8) -> Result<CorruptionParams, CorruptionError> {
        if level == 0 || level as usize > LEVELS {
            return Err(CorruptionError::InvalidLevel(level));
        }
        let records = self
            .entries
            .get(&id)
            .ok_or_else(|| CorruptionError::NotInTable(id.to_string()))?;
        Ok(records[level as usize - 1])
    }

    /// Builds the full [`CorruptionSpec`] for one image.
    pub fn resolve(
        &self,
        id: CorruptionId,
        level: u8,
        root_seed: u64,
        image_id: &str,
    ) -> Result<CorruptionSpec, CorruptionError> {
        let params = match level {
            0 => None,
            l => Some(self.params(id, l)?),
        };
        CorruptionSpec::new(id, level, params, root_seed, image_id)
    }

    pub fn resolve_str(
        &self,
        id: &str,
        level: u8,
        root_seed: u64,
        image_id: &str,
    ) -> Result<CorruptionSpec, CorruptionError> {
        self.resolve(id.parse()?, level, root_seed, image_id)
    }
}

fn records<T: DeserializeOwned>(value: toml::Value) -> Result<Vec<T>, String> {
    let section: Section<T> = value.try_into().map_err(|e: toml::de::Error| e.to_string())?;
    Ok(section.levels)
}

fn parse_section(id: CorruptionId, value: toml::Value) -> Result<[CorruptionParams; LEVELS], String> {
    use CorruptionId as C;
    use CorruptionParams as P;
    let parsed: Vec<CorruptionParams> = match id {
        C::GaussianNoise => records(value)?.into_iter().map(P::GaussianNoise).collect(),
        C::ShotNoise => records(value)?.into_iter().map(P::ShotNoise).collect(),
        C::ImpulseNoise => records(value)?.into_iter().map(P::ImpulseNoise).collect(),
        C::SpeckleNoise => records(value)?.into_iter().map(P::SpeckleNoise).collect(),
        C::DefocusBlur => records(value)?.into_iter().map(P::DefocusBlur).collect(),
        C::ZoomBlur => records(value)?.into_iter().map(P::ZoomBlur).collect(),
        C::GlassBlur => records(value)?.into_iter().map(P::GlassBlur).collect(),
        C::Snow => records(value)?.into_iter().map(P::Snow).collect(),
        C::Brightness => records(value)?.into_iter().map(P::Brightness).collect(),
        C::Contrast => records(value)?.into_iter().map(P::Contrast).collect(),
        C::Saturate => records(value)?.into_iter().map(P::Saturate).collect(),
        C::Grayscale => records::<NoParams>(value)?.into_iter().map(|_| P::Grayscale).collect(),
        C::ColorInvert => records::<NoParams>(value)?
            .into_iter()
            .map(|_| P::ColorInvert)
            .collect(),
        C::GrayscaleInvert => records::<NoParams>(value)?
            .into_iter()
            .map(|_| P::GrayscaleInvert)
            .collect(),
        C::BinaryThreshold => records(value)?.into_iter().map(P::BinaryThreshold).collect(),
        C::Splatter => records(value)?.into_iter().map(P::Splatter).collect(),
        C::ElasticTransform => records(value)?.into_iter().map(P::ElasticTransform).collect(),
        C::Pixelate => records(value)?.into_iter().map(P::Pixelate).collect(),
        C::JpegCompression => records(value)?.into_iter().map(P::JpegCompression).collect(),
    };
    for (i, p) in parsed.iter().enumerate() {
        p.validate().map_err(|e| format!("level {}: {e}", i + 1))?;
    }
    let n = parsed.len();
    parsed
        .try_into()
        .map_err(|_| format!("expected exactly {LEVELS} level records, found {n}"))
}
