use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use visrobust::batch::{self, Task};
use visrobust::corruptions::{apply, SeverityTable};
use visrobust::dataset::{file_digest, Manifest, ManifestImage};
use visrobust::PixelBuffer;

use crate::args::GenerateArgs;
use crate::config::{parse_corruptions, parse_levels, RunConfig};
use crate::fsio::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RUN_CONFIG_FILE: &str = "run_config.json";

#[derive(Debug)]
pub struct GenerateSummary {
    pub written: usize,
    pub reused: usize,
    pub manifest: Manifest,
}

/// An input image: id is the file stem.
#[derive(Clone, Debug)]
struct Input {
    id: String,
    path: PathBuf,
}

fn list_images(dir: &Path) -> Result<Vec<Input>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        let ext = path.extension().map(|e| e.to_string_lossy().to_lowercase());
        if !matches!(ext.as_deref(), Some("png" | "jpg" | "jpeg")) || !path.is_file() {
            continue;
        }
        let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        out.push(Input { id, path });
    }
    out.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.path.cmp(&b.path)));
    if let Some(w) = out.windows(2).find(|w| w[0].id == w[1].id) {
        bail!("two input images share the id `{}`", w[0].id);
    }
    ensure!(!out.is_empty(), "no png or jpeg images in {}", dir.display());
    Ok(out)
}

fn relative_path(corruption: &str, level: u8, image_id: &str) -> String {
    format!("{corruption}/{level}/{image_id}.png")
}

enum Outcome {
    Written(ManifestImage),
    Reused(ManifestImage),
}

pub fn run(a: &GenerateArgs) -> Result<GenerateSummary> {
    let table = match &a.severity_table {
        Some(p) => SeverityTable::load(p).with_context(|| format!("severity table {}", p.display()))?,
        None => SeverityTable::default(),
    };
    let corruptions = parse_corruptions(&a.corruptions, &table)?;
    let levels = parse_levels(&a.levels)?;
    let images = list_images(&a.images)?;
    let dataset = a.dataset.clone().unwrap_or_else(|| {
        a.images
            .canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "dataset".into())
    });

    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let manifest_path = a.out.join(MANIFEST_FILE);
    let previous = if manifest_path.exists() {
        let m = Manifest::load(&manifest_path)?;
        ensure!(
            m.root_seed == a.seed && m.severity_table_version == table.version() && m.dataset == dataset,
            "{} belongs to a run with different seed, table version or dataset name",
            manifest_path.display()
        );
        Some(m)
    } else {
        None
    };

    let config = RunConfig {
        corruptions: Some(corruptions.iter().map(|c| c.to_string()).collect()),
        levels: Some(levels.clone()),
        root_seed: Some(a.seed),
        severity_table: Some(
            a.severity_table
                .as_ref()
                .map_or("builtin".into(), |p| p.display().to_string()),
        ),
        severity_table_version: Some(table.version().to_string()),
        jobs: Some(a.jobs),
        output_formats: vec!["png".into(), "manifest.json".into()],
        ..RunConfig::new("generate", &a.out).input("images", &a.images)
    };

    let tasks = batch::plan(images.len(), &corruptions, &levels);
    log::info!(
        "{} tasks ({} images x {} corruptions x {} levels)",
        tasks.len(),
        images.len(),
        corruptions.len(),
        levels.len()
    );
    let results = batch::run(&tasks, a.jobs, |t: &Task| -> Result<Outcome> {
        let input = &images[t.image];
        let rel = relative_path(t.corruption.as_str(), t.level, &input.id);
        let dest = a.out.join(&rel);
        if let Some(prev) = previous
            .as_ref()
            .and_then(|m| m.lookup(t.corruption.as_str(), t.level, &input.id))
        {
            if std::fs::read(&dest).is_ok_and(|bytes| file_digest(&bytes) == prev.sha256) {
                return Ok(Outcome::Reused(prev.clone()));
            }
        }
        let context = || format!("{} at {}/{}", input.path.display(), t.corruption, t.level);
        let img = PixelBuffer::load(&input.path).with_context(context)?;
        let spec = table
            .resolve(t.corruption, t.level, a.seed, &input.id)
            .with_context(context)?;
        let png = apply(&spec, &img)
            .and_then(|out| Ok(out.encode_png()?))
            .with_context(context)?;
        write_atomic(&dest, &png)?;
        Ok(Outcome::Written(ManifestImage {
            image_id: input.id.clone(),
            path: rel,
            sha256: file_digest(&png),
        }))
    });

    let mut manifest = Manifest::new(dataset, a.seed, table.version());
    let (mut written, mut reused) = (0, 0);
    let mut first_error = None;
    for (task, result) in tasks.iter().zip(results) {
        match result {
            Ok(Outcome::Written(m)) => {
                written += 1;
                manifest.insert(task.corruption.as_str(), task.level, m);
            }
            Ok(Outcome::Reused(m)) => {
                reused += 1;
                manifest.insert(task.corruption.as_str(), task.level, m);
            }
            Err(e) => {
                log::error!("{e:#}");
                first_error.get_or_insert(e);
            }
        }
    }
    // Completed outputs stay recorded so a re-run only redoes the failures.
    write_atomic(&manifest_path, manifest.to_json().as_bytes())?;
    if let Some(e) = first_error {
        return Err(e.context("generation incomplete; re-run to resume"));
    }
    config.write(&a.out.join(RUN_CONFIG_FILE))?;
    Ok(GenerateSummary {
        written,
        reused,
        manifest,
    })
}
