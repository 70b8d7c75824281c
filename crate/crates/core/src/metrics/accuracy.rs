use serde::{Deserialize, Serialize};

use super::{EvaluationGrid, Matrix, MetricsError, GRID_LEVELS};

/// `A_{v,c}`: mean accuracy over levels 0..=5.
pub fn average_accuracy(grid: &EvaluationGrid) -> Matrix<f64> {
    Matrix::from_fn(grid.n_models(), grid.n_corruptions(), |v, c| {
        grid.accuracies(v, c).iter().sum::<f64>() / GRID_LEVELS as f64
    })
}

/// `A_v`: row means of `A_{v,c}`.
pub fn model_average(avg: &Matrix<f64>) -> Vec<f64> {
    (0..avg.rows())
        .map(|v| (0..avg.cols()).map(|c| avg.get(v, c)).sum::<f64>() / avg.cols() as f64)
        .collect()
}

/// `A_c`: column means of `A_{v,c}`.
pub fn corruption_average(avg: &Matrix<f64>) -> Vec<f64> {
    (0..avg.cols())
        .map(|c| (0..avg.rows()).map(|v| avg.get(v, c)).sum::<f64>() / avg.rows() as f64)
        .collect()
}

/// Relative accuracy drops as fractions (multiply by 100 for percent).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeDrop {
    /// `(A_{v,0} − A_{v,c}) / A_{v,0}`
    pub cell: Matrix<f64>,
    /// `(A_{v,0} − A_v) / A_{v,0}`
    pub model: Vec<f64>,
    /// `Σ_v (A_{v,0} − A_{v,c}) / Σ_v A_{v,0}`
    pub corruption: Vec<f64>,
}

pub fn relative_accuracy_drop(grid: &EvaluationGrid) -> Result<RelativeDrop, MetricsError> {
    let base: Vec<f64> = (0..grid.n_models()).map(|v| grid.clean_accuracy(v)).collect();
    if let Some(v) = base.iter().position(|&b| b <= 0.0) {
        return Err(MetricsError::ZeroBaseAccuracy(grid.models()[v].clone()));
    }
    let avg = average_accuracy(grid);
    let cell = Matrix::from_fn(avg.rows(), avg.cols(), |v, c| (base[v] - avg.get(v, c)) / base[v]);
    let model = model_average(&avg)
        .iter()
        .zip(&base)
        .map(|(a, b)| (b - a) / b)
        .collect();
    let base_sum: f64 = base.iter().sum();
    let corruption = (0..avg.cols())
        .map(|c| (0..avg.rows()).map(|v| base[v] - avg.get(v, c)).sum::<f64>() / base_sum)
        .collect();
    Ok(RelativeDrop {
        cell,
        model,
        corruption,
    })
}
