//! VQAv2-schema ingestion, prediction files, the cell join consumed by the
//! metric engine, and the manifest of an augmented-image tree.

mod join;
mod manifest;
mod vqa;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use join::{join, JoinedDataset, CLEAN};
pub use manifest::{file_digest, Manifest, ManifestCell, ManifestImage, MANIFEST_FORMAT};
pub use vqa::{
    load_annotations, load_predictions, load_questions, parse_annotations, parse_predictions, parse_questions, records,
    Annotation, PredictionSet, QARecord, Question,
};

/// One (model, corruption, level) cell of a benchmark run. The clean run is
/// corruption [`CLEAN`] at level 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub model: String,
    pub corruption: String,
    pub level: u8,
}

impl CellKey {
    pub fn new(model: impl Into<String>, corruption: impl Into<String>, level: u8) -> Self {
        Self {
            model: model.into(),
            corruption: corruption.into(),
            level,
        }
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.model, self.corruption, self.level)
    }
}

/// Shows at most the first few ids of a long list.
fn id_list(ids: &[u64]) -> String {
    const SHOWN: usize = 10;
    let head: Vec<String> = ids.iter().take(SHOWN).map(u64::to_string).collect();
    if ids.len() > SHOWN {
        format!("{} ... ({} total)", head.join(", "), ids.len())
    } else {
        head.join(", ")
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{context}: malformed record at index {index}: {message}")]
    Malformed {
        context: String,
        index: usize,
        message: String,
    },
    #[error("duplicate question_id {0}")]
    DuplicateQuestion(u64),
    #[error("question_id {0} has no human answers")]
    EmptyAnswers(u64),
    #[error("annotation for question_id {0} has no matching question")]
    AnnotationWithoutQuestion(u64),
    #[error("question_id {0} has no annotation")]
    QuestionWithoutAnnotation(u64),
    #[error("cell {cell}: duplicate prediction for question_id {id}")]
    DuplicatePrediction { cell: CellKey, id: u64 },
    #[error("cell {cell}: missing predictions for question ids {}", id_list(.ids))]
    MissingPredictions { cell: CellKey, ids: Vec<u64> },
    #[error("cell {cell}: predictions for unknown question ids {}", id_list(.ids))]
    UnknownPredictions { cell: CellKey, ids: Vec<u64> },
    #[error("missing prediction set for cell {0}")]
    MissingCell(CellKey),
    #[error("duplicate prediction set for cell {0}")]
    DuplicateCell(CellKey),
    #[error("invalid cell {cell}: {reason}")]
    InvalidCell { cell: CellKey, reason: String },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("manifest digest mismatch for {0}")]
    DigestMismatch(String),
}

impl DatasetError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
