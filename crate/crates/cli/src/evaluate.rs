use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use visrobust::batch;
use visrobust::corruptions::{CorruptionId, LEVELS};
use visrobust::dataset::{join, load_annotations, load_predictions, load_questions, records, CellKey, CLEAN};
use visrobust::metrics::{build_grid, AnswerMatching, EvaluationGrid, GridCell};

use crate::args::EvaluateArgs;
use crate::config::RunConfig;
use crate::fsio::write_atomic;

/// Prediction files found under `<root>/<model>/<corruption>/<level>.json`.
pub fn scan_prediction_tree(root: &Path) -> Result<BTreeMap<CellKey, PathBuf>> {
    let mut out = BTreeMap::new();
    let read = |p: &Path| std::fs::read_dir(p).with_context(|| format!("reading {}", p.display()));
    for model in read(root)? {
        let model = model?.path();
        if !model.is_dir() {
            continue;
        }
        let model_name = model.file_name().unwrap_or_default().to_string_lossy().into_owned();
        for corruption in read(&model)? {
            let corruption = corruption?.path();
            if !corruption.is_dir() {
                continue;
            }
            let corruption_name = corruption
                .file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            for file in read(&corruption)? {
                let file = file?.path();
                if file.extension().is_none_or(|e| e != "json") {
                    continue;
                }
                let stem = file.file_stem().unwrap_or_default().to_string_lossy();
                let Ok(level) = stem.parse::<u8>() else {
                    log::warn!("ignoring {}: file name is not a level", file.display());
                    continue;
                };
                out.insert(CellKey::new(&model_name, &corruption_name, level), file);
            }
        }
    }
    Ok(out)
}

/// Parses `MODEL,CORRUPTION,LEVEL,PATH`.
pub fn parse_prediction_flag(spec: &str) -> Result<(CellKey, PathBuf)> {
    let parts: Vec<&str> = spec.splitn(4, ',').collect();
    if parts.len() != 4 {
        bail!("--prediction `{spec}` is not MODEL,CORRUPTION,LEVEL,PATH");
    }
    let level: u8 = parts[2]
        .trim()
        .parse()
        .with_context(|| format!("bad level in `{spec}`"))?;
    Ok((
        CellKey::new(parts[0].trim(), parts[1].trim(), level),
        PathBuf::from(parts[3]),
    ))
}

/// Benchmark corruptions in their report order, then other names alphabetically.
fn corruption_rank(name: &str) -> (usize, String) {
    let known = name
        .parse::<CorruptionId>()
        .ok()
        .and_then(|id| CorruptionId::BENCHMARK.iter().position(|b| *b == id));
    (known.unwrap_or(usize::MAX), name.to_string())
}

pub fn run(a: &EvaluateArgs) -> Result<EvaluationGrid> {
    let questions = load_questions(&a.questions)?;
    let annotations = load_annotations(&a.annotations)?;
    let recs = records(&questions, &annotations)?;

    let mut files = match &a.predictions {
        Some(root) => scan_prediction_tree(root)?,
        None => BTreeMap::new(),
    };
    for spec in &a.prediction {
        let (key, path) = parse_prediction_flag(spec)?;
        files.insert(key, path);
    }
    if files.is_empty() {
        bail!("no prediction files given (use --predictions DIR or --prediction)");
    }

    let model_order: Vec<String> = match &a.models {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => {
            let mut m: Vec<String> = files.keys().map(|k| k.model.clone()).collect();
            m.dedup();
            m
        }
    };
    if let Some(k) = files.keys().find(|k| !model_order.contains(&k.model)) {
        bail!("model `{}` has predictions but is not listed in --models", k.model);
    }
    let mut entries: Vec<(CellKey, PathBuf)> = files.into_iter().collect();
    entries.sort_by_key(|(k, _)| {
        let model = model_order.iter().position(|m| *m == k.model);
        (model, corruption_rank(&k.corruption), k.level)
    });
    for m in &model_order {
        // Named models without any file still need to fail at join time.
        if !entries.iter().any(|(k, _)| &k.model == m) {
            bail!("missing prediction set for cell {}", CellKey::new(m, CLEAN, 0));
        }
    }
    if let Some((k, _)) = entries.iter().find(|(k, _)| k.level as usize > LEVELS) {
        bail!("cell {k}: level outside 0..={LEVELS}");
    }

    let sets = batch::run(&entries, 0, |(key, path)| {
        load_predictions(path, key.clone(), &recs).with_context(|| format!("loading {}", path.display()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let joined = join(recs, sets)?;
    let matching = if a.exact_match {
        AnswerMatching::Exact
    } else {
        AnswerMatching::Normalized
    };
    let grid = build_grid(&joined, matching)?;
    write_atomic(&a.out, &grid_csv(&grid)?)?;

    let mut config = RunConfig::new("evaluate", &a.out)
        .input("questions", &a.questions)
        .input("annotations", &a.annotations);
    if let Some(p) = &a.predictions {
        config = config.input("predictions", p);
    }
    for (i, spec) in a.prediction.iter().enumerate() {
        config.inputs.insert(format!("prediction.{i}"), spec.clone());
    }
    config.answer_matching = Some(matching);
    config.output_formats = vec!["csv".into()];
    config.write(&run_config_path(&a.out))?;
    log::info!(
        "grid: {} models x {} corruptions x 6 levels over {} questions",
        grid.n_models(),
        grid.n_corruptions(),
        joined.records().len()
    );
    Ok(grid)
}

/// `<dir>/<stem>.run_config.json` next to a file output.
pub fn run_config_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.run_config.json"))
}

/// Flat grid file, full precision.
pub fn grid_csv(grid: &EvaluationGrid) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for cell in grid.cells() {
        w.serialize(cell)?;
    }
    Ok(w.into_inner()?)
}

pub fn read_grid(path: &Path) -> Result<EvaluationGrid> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["model", "corruption", "level", "accuracy", "error"] {
        bail!(
            "{}: expected header model,corruption,level,accuracy,error",
            path.display()
        );
    }
    let cells = r
        .deserialize::<GridCell>()
        .enumerate()
        .map(|(i, c)| c.with_context(|| format!("{} row {}", path.display(), i + 2)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvaluationGrid::from_cells(cells)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prediction_flag() {
        let (k, p) = parse_prediction_flag("ViLT,snow,3,/tmp/a,b.json").unwrap();
        assert_eq!(k, CellKey::new("ViLT", "snow", 3));
        assert_eq!(p, PathBuf::from("/tmp/a,b.json"));
        assert!(parse_prediction_flag("ViLT,snow,3").is_err());
        assert!(parse_prediction_flag("ViLT,snow,x,p").is_err());
    }

    #[test]
    fn grid_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = EvaluationGrid::reference();
        let p = dir.path().join("grid.csv");
        std::fs::write(&p, grid_csv(&g).unwrap()).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("model,corruption,level,accuracy,error\n"));
        assert_eq!(read_grid(&p).unwrap(), g);
    }

    #[test]
    fn corruption_order() {
        let mut names = vec!["zz_custom", "snow", "shot_noise", "aa_custom"];
        names.sort_by_key(|n| corruption_rank(n));
        assert_eq!(names, ["shot_noise", "snow", "aa_custom", "zz_custom"]);
    }
}
