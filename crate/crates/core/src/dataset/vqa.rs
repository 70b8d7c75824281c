use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CellKey, DatasetError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub question_id: u64,
    pub image_id: u64,
    pub question: String,
}

/// Human answers for one question, verbatim (no normalization).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub question_id: u64,
    pub image_id: u64,
    pub answers: Vec<String>,
    /// Stored for diagnostics; accuracy uses `answers` only.
    pub multiple_choice_answer: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QARecord {
    pub question_id: u64,
    pub image_id: u64,
    pub question: String,
    pub human_answers: Vec<String>,
    pub ground_truth: String,
}

/// Predicted answers of one model on one (corruption, level) dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictionSet {
    pub cell: CellKey,
    pub entries: BTreeMap<u64, String>,
}

#[derive(Deserialize)]
struct RawAnswer {
    answer: String,
}

#[derive(Deserialize)]
struct RawAnnotation {
    question_id: u64,
    image_id: u64,
    answers: Vec<RawAnswer>,
    #[serde(default)]
    multiple_choice_answer: String,
}

#[derive(Deserialize)]
struct RawPrediction {
    question_id: u64,
    answer: String,
}

fn read(path: &Path) -> Result<String, DatasetError> {
    std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))
}

fn parse_json(text: &str, context: &str) -> Result<Value, DatasetError> {
    serde_json::from_str(text).map_err(|source| DatasetError::Json {
        context: context.to_string(),
        source,
    })
}

/// Deserializes each element of `array`, reporting the index of the first bad one.
fn records_of<T: DeserializeOwned>(array: Vec<Value>, context: &str) -> Result<Vec<T>, DatasetError> {
    array
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            T::deserialize(v).map_err(|e| DatasetError::Malformed {
                context: context.to_string(),
                index,
                message: e.to_string(),
            })
        })
        .collect()
}

/// The array under `key` of a top-level object.
fn top_level_array(text: &str, key: &str) -> Result<Vec<Value>, DatasetError> {
    if let Value::Object(mut map) = parse_json(text, key)? {
        if let Some(Value::Array(items)) = map.remove(key) {
            return Ok(items);
        }
    }
    Err(DatasetError::Malformed {
        context: key.to_string(),
        index: 0,
        message: format!("expected an object with a `{key}` array"),
    })
}

/// Parses the VQAv2 questions schema (`{"questions": [...]}`).
pub fn parse_questions(text: &str) -> Result<Vec<Question>, DatasetError> {
    let questions: Vec<Question> = records_of(top_level_array(text, "questions")?, "questions")?;
    if questions.is_empty() {
        log::warn!("question file contains no questions");
    }
    let mut seen = BTreeSet::new();
    for q in &questions {
        if !seen.insert(q.question_id) {
            return Err(DatasetError::DuplicateQuestion(q.question_id));
        }
    }
    Ok(questions)
}

pub fn load_questions(path: impl AsRef<Path>) -> Result<Vec<Question>, DatasetError> {
    parse_questions(&read(path.as_ref())?)
}

/// Parses the VQAv2 annotations schema (`{"annotations": [...]}`), keyed by question id.
pub fn parse_annotations(text: &str) -> Result<BTreeMap<u64, Annotation>, DatasetError> {
    let raw: Vec<RawAnnotation> = records_of(top_level_array(text, "annotations")?, "annotations")?;
    let mut out = BTreeMap::new();
    for a in raw {
        if a.answers.is_empty() {
            return Err(DatasetError::EmptyAnswers(a.question_id));
        }
        let ann = Annotation {
            question_id: a.question_id,
            image_id: a.image_id,
            answers: a.answers.into_iter().map(|r| r.answer).collect(),
            multiple_choice_answer: a.multiple_choice_answer,
        };
        if out.insert(a.question_id, ann).is_some() {
            return Err(DatasetError::DuplicateQuestion(a.question_id));
        }
    }
    Ok(out)
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<BTreeMap<u64, Annotation>, DatasetError> {
    parse_annotations(&read(path.as_ref())?)
}

/// Pairs questions with annotations; the result is sorted by question id.
pub fn records(questions: &[Question], annotations: &BTreeMap<u64, Annotation>) -> Result<Vec<QARecord>, DatasetError> {
    let asked: BTreeSet<u64> = questions.iter().map(|q| q.question_id).collect();
    if let Some(id) = annotations.keys().find(|id| !asked.contains(id)) {
        return Err(DatasetError::AnnotationWithoutQuestion(*id));
    }
    let mut out = questions
        .iter()
        .map(|q| {
            let a = annotations
                .get(&q.question_id)
                .ok_or(DatasetError::QuestionWithoutAnnotation(q.question_id))?;
            Ok(QARecord {
                question_id: q.question_id,
                image_id: q.image_id,
                question: q.question.clone(),
                human_answers: a.answers.clone(),
                ground_truth: a.multiple_choice_answer.clone(),
            })
        })
        .collect::<Result<Vec<_>, DatasetError>>()?;
    out.sort_by_key(|r| r.question_id);
    Ok(out)
}

/// Parses a `[{question_id, answer}, ...]` results array for `cell` and
/// checks it covers exactly the question ids of `dataset`.
pub fn parse_predictions(text: &str, cell: CellKey, dataset: &[QARecord]) -> Result<PredictionSet, DatasetError> {
    let context = format!("predictions {cell}");
    let items = match parse_json(text, &context)? {
        Value::Array(items) => items,
        _ => {
            return Err(DatasetError::Malformed {
                context,
                index: 0,
                message: "expected a JSON array".into(),
            })
        }
    };
    let raw: Vec<RawPrediction> = records_of(items, &context)?;
    let mut entries = BTreeMap::new();
    for p in raw {
        if entries.insert(p.question_id, p.answer).is_some() {
            return Err(DatasetError::DuplicatePrediction {
                cell,
                id: p.question_id,
            });
        }
    }
    let expected: BTreeSet<u64> = dataset.iter().map(|r| r.question_id).collect();
    let missing: Vec<u64> = expected
        .iter()
        .filter(|id| !entries.contains_key(id))
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(DatasetError::MissingPredictions { cell, ids: missing });
    }
    let unknown: Vec<u64> = entries.keys().filter(|id| !expected.contains(id)).copied().collect();
    if !unknown.is_empty() {
        return Err(DatasetError::UnknownPredictions { cell, ids: unknown });
    }
    Ok(PredictionSet { cell, entries })
}

pub fn load_predictions(
    path: impl AsRef<Path>,
    cell: CellKey,
    dataset: &[QARecord],
) -> Result<PredictionSet, DatasetError> {
    parse_predictions(&read(path.as_ref())?, cell, dataset)
}
