use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{vqa_accuracy, AnswerMatching, MetricsError};
use crate::dataset::JoinedDataset;

/// Levels per grid cell: 0 (clean) through 5.
pub const GRID_LEVELS: usize = 6;

/// Error grid shipped with the crate: four models (ViLT, BLIP, VLE, PNP) on
/// the 14 benchmark corruptions, 3-decimal published values.
const REFERENCE_ERRORS: &str = include_str!("../../data/reference_error_grid.csv");

/// One row of the flat grid file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub model: String,
    pub corruption: String,
    pub level: u8,
    pub accuracy: f64,
    pub error: f64,
}

/// Accuracy tensor `A[v][c][l]`. Errors are always derived as `1 − A`, so
/// the identity holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationGrid {
    models: Vec<String>,
    corruptions: Vec<String>,
    accuracy: Vec<[f64; GRID_LEVELS]>,
}

fn check_names(kind: &str, names: &[String]) -> Result<(), MetricsError> {
    if names.is_empty() {
        return Err(MetricsError::InvalidGrid(format!("no {kind}s")));
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(MetricsError::InvalidGrid(format!("duplicate {kind} `{n}`")));
        }
    }
    Ok(())
}

impl EvaluationGrid {
    /// `accuracy[v * C + c]` holds levels 0..=5 of model `v`, corruption `c`.
    pub fn from_accuracy(
        models: Vec<String>,
        corruptions: Vec<String>,
        accuracy: Vec<[f64; GRID_LEVELS]>,
    ) -> Result<Self, MetricsError> {
        check_names("model", &models)?;
        check_names("corruption", &corruptions)?;
        let n_c = corruptions.len();
        if accuracy.len() != models.len() * n_c {
            return Err(MetricsError::InvalidGrid(format!(
                "{} cells for {}x{} grid",
                accuracy.len(),
                models.len(),
                n_c
            )));
        }
        for (i, cell) in accuracy.iter().enumerate() {
            if let Some(a) = cell.iter().find(|a| !(0.0..=1.0).contains(*a)) {
                return Err(MetricsError::InvalidGrid(format!(
                    "accuracy {a} outside [0,1] at {}/{}",
                    models[i / n_c],
                    corruptions[i % n_c]
                )));
            }
        }
        for (v, m) in models.iter().enumerate() {
            let clean = accuracy[v * n_c][0];
            if accuracy[v * n_c..(v + 1) * n_c].iter().any(|cell| cell[0] != clean) {
                return Err(MetricsError::InconsistentClean(m.clone()));
            }
        }
        Ok(Self {
            models,
            corruptions,
            accuracy,
        })
    }

    /// Same layout as [`from_accuracy`](Self::from_accuracy), given errors.
    pub fn from_errors(
        models: Vec<String>,
        corruptions: Vec<String>,
        errors: Vec<[f64; GRID_LEVELS]>,
    ) -> Result<Self, MetricsError> {
        let accuracy = errors.iter().map(|e| e.map(|x| 1.0 - x)).collect();
        Self::from_accuracy(models, corruptions, accuracy)
    }

    /// Builds a grid from flat rows in any order. Models and corruptions keep
    /// first-appearance order. The `error` column must agree with
    /// `1 − accuracy` to 1e-9; the stored value is derived from accuracy.
    pub fn from_cells(cells: impl IntoIterator<Item = GridCell>) -> Result<Self, MetricsError> {
        let mut models: Vec<String> = Vec::new();
        let mut corruptions: Vec<String> = Vec::new();
        let mut seen: HashMap<(usize, usize, u8), f64> = HashMap::new();
        for cell in cells {
            if cell.level as usize >= GRID_LEVELS {
                return Err(MetricsError::InvalidGrid(format!("level {} outside 0..=5", cell.level)));
            }
            if !cell.accuracy.is_finite() || (cell.error - (1.0 - cell.accuracy)).abs() > 1e-9 {
                return Err(MetricsError::InvalidGrid(format!(
                    "{}/{}/{}: error {} is not 1 - accuracy {}",
                    cell.model, cell.corruption, cell.level, cell.error, cell.accuracy
                )));
            }
            let v = position_or_push(&mut models, &cell.model);
            let c = position_or_push(&mut corruptions, &cell.corruption);
            if seen.insert((v, c, cell.level), cell.accuracy).is_some() {
                return Err(MetricsError::DuplicateCell {
                    model: cell.model,
                    corruption: cell.corruption,
                    level: cell.level,
                });
            }
        }
        let mut accuracy = Vec::with_capacity(models.len() * corruptions.len());
        for (v, m) in models.iter().enumerate() {
            for (c, name) in corruptions.iter().enumerate() {
                let mut levels = [0.0; GRID_LEVELS];
                for (l, slot) in levels.iter_mut().enumerate() {
                    *slot = *seen.get(&(v, c, l as u8)).ok_or_else(|| MetricsError::MissingCell {
                        model: m.clone(),
                        corruption: name.clone(),
                        level: l as u8,
                    })?;
                }
                accuracy.push(levels);
            }
        }
        Self::from_accuracy(models, corruptions, accuracy)
    }

    /// The shipped reference error grid.
    pub fn reference() -> Self {
        Self::parse_error_table(REFERENCE_ERRORS).expect("shipped reference grid is valid")
    }

    /// Parses `model,corruption,level,error` rows (header first, no quoting).
    pub fn parse_error_table(text: &str) -> Result<Self, MetricsError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some("model,corruption,level,error") {
            return Err(MetricsError::InvalidGrid(
                "expected header model,corruption,level,error".into(),
            ));
        }
        let cells = lines
            .enumerate()
            .map(|(i, line)| {
                let bad = || MetricsError::InvalidGrid(format!("row {}: `{line}`", i + 1));
                let f: Vec<&str> = line.split(',').map(str::trim).collect();
                if f.len() != 4 {
                    return Err(bad());
                }
                let error: f64 = f[3].parse().map_err(|_| bad())?;
                Ok(GridCell {
                    model: f[0].to_string(),
                    corruption: f[1].to_string(),
                    level: f[2].parse().map_err(|_| bad())?,
                    accuracy: 1.0 - error,
                    error: 1.0 - (1.0 - error),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_cells(cells)
    }

    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn corruptions(&self) -> &[String] {
        &self.corruptions
    }

    pub fn n_models(&self) -> usize {
        self.models.len()
    }

    pub fn n_corruptions(&self) -> usize {
        self.corruptions.len()
    }

    pub fn accuracies(&self, v: usize, c: usize) -> &[f64; GRID_LEVELS] {
        assert!(c < self.corruptions.len());
        &self.accuracy[v * self.corruptions.len() + c]
    }

    pub fn errors(&self, v: usize, c: usize) -> [f64; GRID_LEVELS] {
        self.accuracies(v, c).map(|a| 1.0 - a)
    }

    pub fn accuracy(&self, v: usize, c: usize, level: usize) -> f64 {
        self.accuracies(v, c)[level]
    }

    pub fn error(&self, v: usize, c: usize, level: usize) -> f64 {
        1.0 - self.accuracy(v, c, level)
    }

    /// `A_{v,0}`.
    pub fn clean_accuracy(&self, v: usize) -> f64 {
        self.accuracy(v, 0, 0)
    }

    pub fn model_index(&self, name: &str) -> Option<usize> {
        self.models.iter().position(|m| m == name)
    }

    pub fn corruption_index(&self, name: &str) -> Option<usize> {
        self.corruptions.iter().position(|c| c == name)
    }

    /// Flat rows in (model, corruption, level) order.
    pub fn cells(&self) -> impl Iterator<Item = GridCell> + '_ {
        self.models.iter().enumerate().flat_map(move |(v, m)| {
            self.corruptions.iter().enumerate().flat_map(move |(c, name)| {
                (0..GRID_LEVELS).map(move |l| GridCell {
                    model: m.clone(),
                    corruption: name.clone(),
                    level: l as u8,
                    accuracy: self.accuracy(v, c, l),
                    error: self.error(v, c, l),
                })
            })
        })
    }

    /// Grid restricted to and reordered by the given model and corruption indices.
    pub fn select(&self, models: &[usize], corruptions: &[usize]) -> Result<Self, MetricsError> {
        let accuracy = models
            .iter()
            .flat_map(|&v| corruptions.iter().map(move |&c| *self.accuracies(v, c)))
            .collect();
        Self::from_accuracy(
            models.iter().map(|&v| self.models[v].clone()).collect(),
            corruptions.iter().map(|&c| self.corruptions[c].clone()).collect(),
            accuracy,
        )
    }
}

fn position_or_push(names: &mut Vec<String>, name: &str) -> usize {
    match names.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            names.push(name.to_string());
            names.len() - 1
        }
    }
}

/// Cell accuracy is the mean per-question VQA accuracy, summed in question
/// id order and divided by the question count.
pub fn build_grid(joined: &JoinedDataset, matching: AnswerMatching) -> Result<EvaluationGrid, MetricsError> {
    let records = joined.records();
    if records.is_empty() {
        return Err(MetricsError::InvalidGrid("no questions".into()));
    }
    let humans: Vec<Vec<String>> = records
        .iter()
        .map(|r| r.human_answers.iter().map(|a| matching.prepare(a)).collect())
        .collect();
    let n = records.len() as f64;
    let cell_accuracy = |v: usize, c: usize, l: usize| -> Result<f64, MetricsError> {
        let mut sum = 0.0;
        for (pred, answers) in joined.predictions(v, c, l).iter().zip(&humans) {
            sum += vqa_accuracy(&matching.prepare(pred), answers)?;
        }
        Ok(sum / n)
    };
    let n_c = joined.corruptions().len();
    let mut accuracy = Vec::with_capacity(joined.models().len() * n_c);
    for v in 0..joined.models().len() {
        let clean = cell_accuracy(v, 0, 0)?;
        for c in 0..n_c {
            let mut levels = [clean; GRID_LEVELS];
            for (l, slot) in levels.iter_mut().enumerate().skip(1) {
                *slot = cell_accuracy(v, c, l)?;
            }
            accuracy.push(levels);
        }
    }
    EvaluationGrid::from_accuracy(joined.models().to_vec(), joined.corruptions().to_vec(), accuracy)
}
