use std::collections::{BTreeMap, BTreeSet};

use super::{CellKey, DatasetError, PredictionSet, QARecord};
use crate::corruptions::LEVELS;

/// Corruption name of the clean (level 0) prediction run.
pub const CLEAN: &str = "clean";

/// Questions plus, for every (model, corruption, level 0..=5) cell, the
/// predicted answers aligned with the records. Level 0 of every corruption
/// is the model's single clean run.
#[derive(Clone, Debug, PartialEq)]
pub struct JoinedDataset {
    records: Vec<QARecord>,
    models: Vec<String>,
    corruptions: Vec<String>,
    clean: Vec<Vec<String>>,
    corrupted: Vec<Vec<String>>,
}

impl JoinedDataset {
    /// Records sorted by question id.
    pub fn records(&self) -> &[QARecord] {
        &self.records
    }

    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn corruptions(&self) -> &[String] {
        &self.corruptions
    }

    /// Predictions of model `v` on corruption `c` at `level`, aligned with
    /// [`records`](Self::records).
    pub fn predictions(&self, v: usize, c: usize, level: usize) -> &[String] {
        assert!(c < self.corruptions.len() && level <= LEVELS);
        if level == 0 {
            &self.clean[v]
        } else {
            &self.corrupted[(v * self.corruptions.len() + c) * LEVELS + level - 1]
        }
    }

    /// `(record, prediction)` tuples of one cell.
    pub fn tuples(&self, v: usize, c: usize, level: usize) -> impl Iterator<Item = (&QARecord, &str)> {
        self.records
            .iter()
            .zip(self.predictions(v, c, level).iter().map(String::as_str))
    }

    /// Total tuple count over all cells.
    pub fn len(&self) -> usize {
        self.models.len() * self.corruptions.len() * (LEVELS + 1) * self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn aligned(set: &PredictionSet, records: &[QARecord]) -> Result<Vec<String>, DatasetError> {
    let missing: Vec<u64> = records
        .iter()
        .map(|r| r.question_id)
        .filter(|id| !set.entries.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(DatasetError::MissingPredictions {
            cell: set.cell.clone(),
            ids: missing,
        });
    }
    if set.entries.len() != records.len() {
        let known: BTreeSet<u64> = records.iter().map(|r| r.question_id).collect();
        let ids = set.entries.keys().filter(|id| !known.contains(id)).copied().collect();
        return Err(DatasetError::UnknownPredictions {
            cell: set.cell.clone(),
            ids,
        });
    }
    Ok(records.iter().map(|r| set.entries[&r.question_id].clone()).collect())
}

/// Joins records with prediction sets. Models and corruptions keep the order
/// of their first appearance in `sets`. Every model needs one clean set and
/// one set per (corruption, level 1..=5) seen for any model.
pub fn join(mut records: Vec<QARecord>, sets: Vec<PredictionSet>) -> Result<JoinedDataset, DatasetError> {
    records.sort_by_key(|r| r.question_id);
    if let Some(w) = records.windows(2).find(|w| w[0].question_id == w[1].question_id) {
        return Err(DatasetError::DuplicateQuestion(w[0].question_id));
    }
    if let Some(r) = records.iter().find(|r| r.human_answers.is_empty()) {
        return Err(DatasetError::EmptyAnswers(r.question_id));
    }

    let mut models: Vec<String> = Vec::new();
    let mut corruptions: Vec<String> = Vec::new();
    let mut by_cell: BTreeMap<CellKey, PredictionSet> = BTreeMap::new();
    for set in sets {
        let key = set.cell.clone();
        let clean = key.corruption == CLEAN;
        if clean != (key.level == 0) || key.level as usize > LEVELS {
            return Err(DatasetError::InvalidCell {
                cell: key,
                reason: format!("level 0 is reserved for the `{CLEAN}` run and other levels must be 1..={LEVELS}"),
            });
        }
        if !models.contains(&key.model) {
            models.push(key.model.clone());
        }
        if !clean && !corruptions.contains(&key.corruption) {
            corruptions.push(key.corruption.clone());
        }
        if by_cell.contains_key(&key) {
            return Err(DatasetError::DuplicateCell(key));
        }
        by_cell.insert(key, set);
    }

    let mut take = |key: CellKey| -> Result<Vec<String>, DatasetError> {
        let set = by_cell.remove(&key).ok_or(DatasetError::MissingCell(key))?;
        aligned(&set, &records)
    };
    let mut clean = Vec::with_capacity(models.len());
    let mut corrupted = Vec::with_capacity(models.len() * corruptions.len() * LEVELS);
    for m in &models {
        clean.push(take(CellKey::new(m, CLEAN, 0))?);
        for c in &corruptions {
            for level in 1..=LEVELS as u8 {
                corrupted.push(take(CellKey::new(m, c, level))?);
            }
        }
    }
    Ok(JoinedDataset {
        records,
        models,
        corruptions,
        clean,
        corrupted,
    })
}
