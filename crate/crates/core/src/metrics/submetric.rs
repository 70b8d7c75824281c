use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EvaluationGrid, Matrix, MetricsError, GRID_LEVELS};

/// The five severity-aggregated error sub-metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubMetric {
    /// ℱ
    FirstDrop,
    /// ℛ
    Range,
    /// ρ
    ErrorRate,
    /// μ
    AverageError,
    /// Δ
    Adce,
}

impl SubMetric {
    pub const ALL: [SubMetric; 5] = [
        Self::FirstDrop,
        Self::Range,
        Self::ErrorRate,
        Self::AverageError,
        Self::Adce,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::FirstDrop => "first_drop",
            Self::Range => "range",
            Self::ErrorRate => "error_rate",
            Self::AverageError => "average_error",
            Self::Adce => "adce",
        }
    }

    /// Short ASCII name used in reports and on the command line.
    pub fn symbol(self) -> &'static str {
        match self {
            Self::FirstDrop => "F",
            Self::Range => "R",
            Self::ErrorRate => "rho",
            Self::AverageError => "mu",
            Self::Adce => "delta",
        }
    }
}

impl fmt::Display for SubMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for SubMetric {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_lowercase();
        Self::ALL
            .into_iter()
            .find(|m| key == m.as_str() || key == m.symbol().to_lowercase())
            .or(match key.as_str() {
                "ℱ" => Some(Self::FirstDrop),
                "ℛ" => Some(Self::Range),
                "ρ" => Some(Self::ErrorRate),
                "μ" => Some(Self::AverageError),
                "δ" | "Δ" => Some(Self::Adce),
                _ => None,
            })
            .ok_or_else(|| MetricsError::UnknownSubMetric(s.to_string()))
    }
}

/// One value per sub-metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerSubMetric<T> {
    pub first_drop: T,
    pub range: T,
    pub error_rate: T,
    pub average_error: T,
    pub adce: T,
}

impl<T> PerSubMetric<T> {
    pub fn from_fn(mut f: impl FnMut(SubMetric) -> T) -> Self {
        Self {
            first_drop: f(SubMetric::FirstDrop),
            range: f(SubMetric::Range),
            error_rate: f(SubMetric::ErrorRate),
            average_error: f(SubMetric::AverageError),
            adce: f(SubMetric::Adce),
        }
    }

    pub fn get(&self, m: SubMetric) -> &T {
        match m {
            SubMetric::FirstDrop => &self.first_drop,
            SubMetric::Range => &self.range,
            SubMetric::ErrorRate => &self.error_rate,
            SubMetric::AverageError => &self.average_error,
            SubMetric::Adce => &self.adce,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(SubMetric, &T) -> U) -> PerSubMetric<U> {
        PerSubMetric::from_fn(|m| f(m, self.get(m)))
    }
}

/// ℱ = `(E_1 − E_0) / E_0`. Undefined when `E_0 = 0 < E_1`; 0 when both are 0.
pub fn first_drop(errors: &[f64; GRID_LEVELS]) -> Option<f64> {
    let (e0, e1) = (errors[0], errors[1]);
    if e0 == 0.0 {
        return (e1 == 0.0).then_some(0.0);
    }
    Some((e1 - e0) / e0)
}

/// ℛ = `(max − min) / min` over levels 0..=5. Undefined when the minimum
/// is 0 unless every level is 0.
pub fn range_of_error(errors: &[f64; GRID_LEVELS]) -> Option<f64> {
    let max = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        return (max == 0.0).then_some(0.0);
    }
    Some((max - min) / min)
}

/// ρ: least-squares slope of error against level over levels 0..=5.
pub fn error_rate(errors: &[f64; GRID_LEVELS]) -> f64 {
    let n = GRID_LEVELS as f64;
    let x_mean = (0..GRID_LEVELS).map(|l| l as f64).sum::<f64>() / n;
    let e_mean = errors.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (l, e) in errors.iter().enumerate() {
        let dx = l as f64 - x_mean;
        num += dx * (e - e_mean);
        den += dx * dx;
    }
    num / den
}

/// μ = `1 − A_{v,c}`, the mean error over levels 0..=5.
pub fn average_error(accuracies: &[f64; GRID_LEVELS]) -> f64 {
    1.0 - accuracies.iter().sum::<f64>() / GRID_LEVELS as f64
}

/// Δ = `(1/5) Σ_{l=1..5} (E_l − E_0)`.
pub fn adce(errors: &[f64; GRID_LEVELS]) -> f64 {
    let corrupted = GRID_LEVELS - 1;
    errors[1..].iter().map(|e| e - errors[0]).sum::<f64>() / corrupted as f64
}

/// Per-(model, corruption) values of each sub-metric; `None` marks an
/// undefined cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubMetricSet {
    pub values: PerSubMetric<Matrix<Option<f64>>>,
}

impl SubMetricSet {
    pub fn compute(grid: &EvaluationGrid) -> Self {
        let (rows, cols) = (grid.n_models(), grid.n_corruptions());
        let cell = |f: &dyn Fn(usize, usize) -> Option<f64>| Matrix::from_fn(rows, cols, f);
        Self {
            values: PerSubMetric {
                first_drop: cell(&|v, c| first_drop(&grid.errors(v, c))),
                range: cell(&|v, c| range_of_error(&grid.errors(v, c))),
                error_rate: cell(&|v, c| Some(error_rate(&grid.errors(v, c)))),
                average_error: cell(&|v, c| Some(average_error(grid.accuracies(v, c)))),
                adce: cell(&|v, c| Some(adce(&grid.errors(v, c)))),
            },
        }
    }

    pub fn get(&self, m: SubMetric) -> &Matrix<Option<f64>> {
        self.values.get(m)
    }

    pub fn undefined(&self, m: SubMetric) -> usize {
        self.get(m).values().iter().filter(|v| v.is_none()).count()
    }
}

/// The population extremes used to scale one sub-metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// `max == min`: every defined cell scales to 0.
    pub degenerate: bool,
    pub undefined_cells: usize,
}

/// Scales each sub-metric by `(x − min) / (max − min)` over all defined
/// (model, corruption) cells of the set.
pub fn min_max_scale(set: &SubMetricSet) -> (SubMetricSet, PerSubMetric<ScaleRange>) {
    let ranges = PerSubMetric::from_fn(|m| {
        let defined = set.get(m).values().iter().flatten().copied();
        let min = defined.clone().reduce(f64::min);
        let max = defined.reduce(f64::max);
        let degenerate = min == max;
        if degenerate {
            log::warn!("sub-metric {m}: degenerate population (max = min), scaled values set to 0");
        }
        ScaleRange {
            min,
            max,
            degenerate,
            undefined_cells: set.undefined(m),
        }
    });
    let values = PerSubMetric::from_fn(|m| {
        let r = ranges.get(m);
        set.get(m).map(|x| {
            x.map(|x| match (r.min, r.max) {
                (Some(lo), Some(hi)) if hi > lo => (x - lo) / (hi - lo),
                _ => 0.0,
            })
        })
    });
    (SubMetricSet { values }, ranges)
}

/// Which index survives aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// One value per model (mean over corruptions).
    Model,
    /// One value per corruption (mean over models).
    Corruption,
}

/// Mean over the defined cells of a row or column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub value: Option<f64>,
    pub skipped: usize,
}

pub fn aggregate(m: &Matrix<Option<f64>>, axis: Axis) -> Vec<Aggregate> {
    let (outer, inner) = match axis {
        Axis::Model => (m.rows(), m.cols()),
        Axis::Corruption => (m.cols(), m.rows()),
    };
    (0..outer)
        .map(|i| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for j in 0..inner {
                let cell = match axis {
                    Axis::Model => m.get(i, j),
                    Axis::Corruption => m.get(j, i),
                };
                if let Some(x) = cell {
                    sum += x;
                    count += 1;
                }
            }
            Aggregate {
                value: (count > 0).then(|| sum / count as f64),
                skipped: inner - count,
            }
        })
        .collect()
}
