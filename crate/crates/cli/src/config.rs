//! Validated run configuration, persisted next to every command's outputs.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::Serialize;
use visrobust::corruptions::{CorruptionId, SeverityTable, LEVELS};
use visrobust::metrics::{AnswerMatching, PerSubMetric, SubMetric, WeightVector};

use crate::fsio::write_atomic;

/// Everything a command ran with. Contains no timestamps or host details,
/// so identical invocations persist identical files.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub tool_version: String,
    pub inputs: BTreeMap<String, String>,
    pub output: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corruptions: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub severity_table: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub severity_table_version: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer_matching: Option<AnswerMatching>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preferences: Option<PerSubMetric<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightVector>,
    pub output_formats: Vec<String>,
}

impl RunConfig {
    pub fn new(command: &str, output: &Path) -> Self {
        Self {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            inputs: BTreeMap::new(),
            output: output.display().to_string(),
            corruptions: None,
            levels: None,
            root_seed: None,
            severity_table: None,
            severity_table_version: None,
            jobs: None,
            answer_matching: None,
            preferences: None,
            weights: None,
            output_formats: Vec::new(),
        }
    }

    pub fn input(mut self, name: &str, path: &Path) -> Self {
        self.inputs.insert(name.into(), path.display().to_string());
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        write_atomic(path, json.as_bytes())
    }
}

/// `1..5` and `1..=5` are inclusive; also `2,4` or `3`.
pub fn parse_levels(spec: &str) -> Result<Vec<u8>> {
    let spec = spec.trim();
    let levels: Vec<u8> = if let Some((a, b)) = spec.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u8, u8) = (
            a.trim().parse().with_context(|| format!("bad level range `{spec}`"))?,
            b.trim().parse().with_context(|| format!("bad level range `{spec}`"))?,
        );
        ensure!(a <= b, "empty level range `{spec}`");
        (a..=b).collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<u8>().with_context(|| format!("bad level `{s}`")))
            .collect::<Result<_>>()?
    };
    for &l in &levels {
        ensure!((1..=LEVELS as u8).contains(&l), "level {l} outside 1..={LEVELS}");
    }
    let mut dedup = levels.clone();
    dedup.sort_unstable();
    dedup.dedup();
    ensure!(dedup.len() == levels.len(), "repeated level in `{spec}`");
    Ok(dedup)
}

/// `benchmark`, `all`, or a comma-separated id list; every id must be in `table`.
pub fn parse_corruptions(spec: &str, table: &SeverityTable) -> Result<Vec<CorruptionId>> {
    let ids: Vec<CorruptionId> = match spec.trim() {
        "benchmark" => CorruptionId::BENCHMARK.to_vec(),
        "all" => CorruptionId::ALL.to_vec(),
        list => list
            .split(',')
            .map(|s| s.trim().parse::<CorruptionId>().map_err(anyhow::Error::from))
            .collect::<Result<_>>()?,
    };
    ensure!(!ids.is_empty(), "no corruptions selected");
    for (i, id) in ids.iter().enumerate() {
        ensure!(!ids[..i].contains(id), "corruption `{id}` listed twice");
        ensure!(table.contains(*id), "corruption `{id}` is not in the severity table");
    }
    Ok(ids)
}

/// Five comma-separated weights in F, R, rho, mu, delta order.
pub fn parse_weights(spec: &str) -> Result<WeightVector> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad weight `{s}`")))
        .collect::<Result<_>>()?;
    let arr: [f64; 5] = values
        .try_into()
        .map_err(|v: Vec<f64>| anyhow::anyhow!("expected 5 weights, got {}", v.len()))?;
    Ok(WeightVector::new(arr)?)
}

/// `name=score` pairs; unnamed sub-metrics get score 0.
pub fn parse_preferences(items: &[String]) -> Result<[f64; 5]> {
    let mut scores = [0.0; 5];
    let mut seen = [false; 5];
    for item in items {
        let Some((name, score)) = item.split_once('=') else {
            bail!("preference `{item}` is not name=score");
        };
        let m: SubMetric = name.parse()?;
        let score: f64 = score.trim().parse().with_context(|| format!("bad score in `{item}`"))?;
        ensure!(!seen[m.index()], "preference for {m} given twice");
        seen[m.index()] = true;
        scores[m.index()] = score;
    }
    Ok(scores)
}
