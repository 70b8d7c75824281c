use serde::{Deserialize, Serialize};

use super::MetricsError;

/// How answers are compared before counting matches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerMatching {
    /// Apply [`normalize_answer`] to both sides.
    #[default]
    Normalized,
    /// Bit-exact string equality.
    Exact,
}

impl AnswerMatching {
    pub fn prepare(self, raw: &str) -> String {
        match self {
            Self::Normalized => normalize_answer(raw),
            Self::Exact => raw.to_string(),
        }
    }
}

const NUMBER_WORDS: [&str; 11] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
];

/// Lowercases, removes punctuation, drops articles, maps number words
/// zero..ten to digits and collapses whitespace. A period between two
/// digits is kept so decimals survive ("2.5" stays "2.5").
pub fn normalize_answer(raw: &str) -> String {
    let lower = raw.trim().to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut cleaned = String::with_capacity(lower.len());
    for (i, &ch) in chars.iter().enumerate() {
        if ch.is_ascii_punctuation() {
            let decimal = ch == '.'
                && i > 0
                && chars[i - 1].is_ascii_digit()
                && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit());
            if decimal {
                cleaned.push(ch);
            }
        } else {
            cleaned.push(ch);
        }
    }
    cleaned
        .split_whitespace()
        .filter(|w| !matches!(*w, "a" | "an" | "the"))
        .map(|w| match NUMBER_WORDS.iter().position(|n| *n == w) {
            Some(d) => d.to_string(),
            None => w.to_string(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `min(#matches / 3, 1)` over the full human answer list. Both sides are
/// compared as given; normalize beforehand if wanted.
pub fn vqa_accuracy<S: AsRef<str>>(predicted: &str, human_answers: &[S]) -> Result<f64, MetricsError> {
    if human_answers.is_empty() {
        return Err(MetricsError::EmptyAnswers);
    }
    let matches = human_answers.iter().filter(|a| a.as_ref() == predicted).count();
    Ok((matches as f64 / 3.0).min(1.0))
}
