//! Robustness metrics: VQA accuracy, the evaluation grid, accuracy
//! aggregates and relative drops, the five error sub-metrics, min-max
//! scaling, weighting and VRE.
//!
//! Level populations: averages, μ, ρ and ℛ use levels 0..=5; Δ averages the
//! five differences `E_l − E_0` for l in 1..=5; ℱ uses levels 0 and 1.

mod accuracy;
mod answer;
mod grid;
mod report;
mod submetric;
mod weights;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use accuracy::{average_accuracy, corruption_average, model_average, relative_accuracy_drop, RelativeDrop};
pub use answer::{normalize_answer, vqa_accuracy, AnswerMatching};
pub use grid::{build_grid, EvaluationGrid, GridCell, GRID_LEVELS};
pub use report::{CellReport, CorruptionReport, MetricReport, ModelReport};
pub use submetric::{
    adce, aggregate, average_error, error_rate, first_drop, min_max_scale, range_of_error, Aggregate, Axis,
    PerSubMetric, ScaleRange, SubMetric, SubMetricSet,
};
pub use weights::{softmax_weights, vre, WeightVector, WEIGHT_SUM_TOLERANCE};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("empty human answer list")]
    EmptyAnswers,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid cell {model}/{corruption}/{level} missing")]
    MissingCell {
        model: String,
        corruption: String,
        level: u8,
    },
    #[error("grid cell {model}/{corruption}/{level} given twice")]
    DuplicateCell {
        model: String,
        corruption: String,
        level: u8,
    },
    #[error("model {0}: clean accuracy differs across corruptions")]
    InconsistentClean(String),
    #[error("model {0}: base accuracy is zero")]
    ZeroBaseAccuracy(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("unknown sub-metric `{0}`")]
    UnknownSubMetric(String),
}

/// Dense row-major (model × corruption) matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        assert!(
            r < self.rows && c < self.cols,
            "({r},{c}) outside {}x{}",
            self.rows,
            self.cols
        );
        &self.data[r * self.cols + c]
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(&mut f).collect(),
        }
    }
}
