use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal, Poisson};
use sha2::{Digest, Sha256};

use super::ImgError;

/// Identifies one independent random stream: one image under one corruption
/// at one severity level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub image_id: String,
    pub corruption: String,
    pub level: u8,
}

impl StreamKey {
    pub fn new(image_id: impl Into<String>, corruption: impl Into<String>, level: u8) -> Self {
        Self {
            image_id: image_id.into(),
            corruption: corruption.into(),
            level,
        }
    }
}

/// Distribution descriptor for [`SeededRng::sample`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distribution {
    Normal { mean: f64, std_dev: f64 },
    Poisson { lambda: f64 },
    Uniform { low: f64, high: f64 },
}

/// Counter-based generator keyed by (root seed, [`StreamKey`]).
///
/// The ChaCha key is a SHA-256 of the root seed and the stream key, so the
/// draws for one key never depend on which other keys were processed or in
/// what order. [`SeededRng::substream`] splits a key further (e.g. per image
/// row) by selecting a different ChaCha stream under the same key.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: [u8; 32],
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(root_seed: u64, key: &StreamKey) -> Self {
        let mut h = Sha256::new();
        h.update(b"visrobust.rng.v1");
        h.update(root_seed.to_le_bytes());
        for part in [key.image_id.as_bytes(), key.corruption.as_bytes()] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(part);
        }
        h.update([key.level]);
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&h.finalize());
        Self::from_key_bytes(seed, 0)
    }

    fn from_key_bytes(seed: [u8; 32], stream: u64) -> Self {
        let mut inner = ChaCha8Rng::from_seed(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    /// Independent child stream `index` under the same key. Stream 0 is the
    /// parent itself, so children start at 1.
    pub fn substream(&self, index: u64) -> Self {
        Self::from_key_bytes(self.seed, index.wrapping_add(1))
    }

    /// Draws `n` samples. Rejects σ < 0, λ < 0, low > high and non-finite
    /// parameters. Degenerate N(μ, 0) and P(0) return constants.
    pub fn sample(&mut self, dist: Distribution, n: usize) -> Result<Vec<f64>, ImgError> {
        let mut out = vec![0.0; n];
        self.sample_into(dist, &mut out)?;
        Ok(out)
    }

    pub fn sample_into(&mut self, dist: Distribution, out: &mut [f64]) -> Result<(), ImgError> {
        match dist {
            Distribution::Normal { mean, std_dev } => {
                let normal = normal(mean, std_dev)?;
                if std_dev == 0.0 {
                    out.fill(mean);
                } else {
                    out.iter_mut().for_each(|v| *v = normal.sample(&mut self.inner));
                }
            }
            Distribution::Poisson { lambda } => match poisson(lambda)? {
                None => out.fill(0.0),
                Some(p) => out.iter_mut().for_each(|v| *v = p.sample(&mut self.inner)),
            },
            Distribution::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low <= high) {
                    return Err(ImgError::InvalidDistribution(format!("uniform [{low}, {high}]")));
                }
                out.iter_mut()
                    .for_each(|v| *v = low + (high - low) * self.inner.random::<f64>());
            }
        }
        Ok(())
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform integer in `[low, high)`.
    pub fn uniform_int(&mut self, low: i64, high: i64) -> i64 {
        self.inner.random_range(low..high)
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> Result<f64, ImgError> {
        Ok(normal(mean, std_dev)?.sample(&mut self.inner))
    }

    pub fn poisson(&mut self, lambda: f64) -> Result<f64, ImgError> {
        Ok(match poisson(lambda)? {
            None => 0.0,
            Some(p) => p.sample(&mut self.inner),
        })
    }
}

fn normal(mean: f64, std_dev: f64) -> Result<Normal<f64>, ImgError> {
    if !mean.is_finite() || !std_dev.is_finite() || std_dev < 0.0 {
        return Err(ImgError::InvalidDistribution(format!(
            "normal mean {mean} sigma {std_dev}"
        )));
    }
    Normal::new(mean, std_dev).map_err(|e| ImgError::InvalidDistribution(e.to_string()))
}

fn poisson(lambda: f64) -> Result<Option<Poisson<f64>>, ImgError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(ImgError::InvalidDistribution(format!("poisson lambda {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(None);
    }
    Poisson::new(lambda)
        .map(Some)
        .map_err(|e| ImgError::InvalidDistribution(e.to_string()))
}
