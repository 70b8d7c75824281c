use serde::{Deserialize, Serialize};

use super::{aggregate, Axis, MetricsError, PerSubMetric, SubMetric, SubMetricSet};

/// Allowed deviation of a weight vector's sum from 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Sub-metric weights `W_ℳ`, each in [0,1], summing to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PerSubMetric<f64>", try_from = "PerSubMetric<f64>")]
pub struct WeightVector([f64; 5]);

impl WeightVector {
    /// Weights in [`SubMetric::ALL`] order.
    pub fn new(weights: [f64; 5]) -> Result<Self, MetricsError> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && (0.0..=1.0).contains(*w))) {
            return Err(MetricsError::InvalidWeights(format!("weight {w} outside [0,1]")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(MetricsError::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(weights))
    }

    /// The default: 0.2 each.
    pub fn equal() -> Self {
        Self([0.2; 5])
    }

    /// Softmax of preference scores, see [`softmax_weights`].
    pub fn from_preferences(preferences: [f64; 5]) -> Result<Self, MetricsError> {
        softmax_weights(preferences)
    }

    pub fn get(&self, m: SubMetric) -> f64 {
        self.0[m.index()]
    }

    pub fn as_array(&self) -> [f64; 5] {
        self.0
    }
}

impl Default for WeightVector {
    fn default() -> Self {
        Self::equal()
    }
}

impl From<WeightVector> for PerSubMetric<f64> {
    fn from(w: WeightVector) -> Self {
        PerSubMetric::from_fn(|m| w.get(m))
    }
}

impl TryFrom<PerSubMetric<f64>> for WeightVector {
    type Error = MetricsError;

    fn try_from(p: PerSubMetric<f64>) -> Result<Self, Self::Error> {
        Self::new(SubMetric::ALL.map(|m| *p.get(m)))
    }
}

/// `W_ℳ = e^{p_ℳ} / Σ e^{p_m}`, computed with the maximum subtracted first
/// for range safety.
pub fn softmax_weights(preferences: [f64; 5]) -> Result<WeightVector, MetricsError> {
    if let Some(p) = preferences.iter().find(|p| !p.is_finite()) {
        return Err(MetricsError::InvalidWeights(format!(
            "preference score {p} is not finite"
        )));
    }
    let max = preferences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp = preferences.map(|p| (p - max).exp());
    let total: f64 = exp.iter().sum();
    WeightVector::new(exp.map(|e| e / total))
}

/// `Σ_ℳ W_ℳ · ℳ` where `ℳ` is each scaled sub-metric aggregated along
/// `axis`. Zero-weight terms are left out; a value is `None` when a
/// weighted aggregate has no defined cells.
pub fn vre(scaled: &SubMetricSet, weights: &WeightVector, axis: Axis) -> Vec<Option<f64>> {
    let aggregates = PerSubMetric::from_fn(|m| aggregate(scaled.get(m), axis));
    let n = aggregates.first_drop.len();
    (0..n)
        .map(|i| {
            let mut total = 0.0;
            for m in SubMetric::ALL {
                let w = weights.get(m);
                if w == 0.0 {
                    continue;
                }
                total += w * aggregates.get(m)[i].value?;
            }
            Some(total)
        })
        .collect()
}
