//! Manifest of an augmented-image tree.
//!
//! JSON layout (`manifest.json` at the tree root):
//!
//! ```json
//! {
//!   "format": 1,
//!   "dataset": "val-subset",
//!   "root_seed": 7,
//!   "severity_table_version": "1",
//!   "cells": [
//!     {"corruption": "snow", "level": 1,
//!      "images": [{"image_id": "42", "path": "snow/1/42.png", "sha256": "..."}]}
//!   ]
//! }
//! ```
//!
//! Cells are sorted by (corruption, level) and images by id, so the file is
//! byte-stable for a given set of outputs. Paths are relative to the root.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::DatasetError;

pub const MANIFEST_FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestImage {
    pub image_id: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestCell {
    pub corruption: String,
    pub level: u8,
    pub images: Vec<ManifestImage>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub dataset: String,
    pub root_seed: u64,
    pub severity_table_version: String,
    pub cells: Vec<ManifestCell>,
}

/// Lowercase hex SHA-256 of a byte string.
pub fn file_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Manifest {
    pub fn new(dataset: impl Into<String>, root_seed: u64, severity_table_version: impl Into<String>) -> Self {
        Self {
            format: MANIFEST_FORMAT,
            dataset: dataset.into(),
            root_seed,
            severity_table_version: severity_table_version.into(),
            cells: Vec::new(),
        }
    }

    /// Adds or replaces an image entry, keeping cells and images sorted.
    pub fn insert(&mut self, corruption: &str, level: u8, image: ManifestImage) {
        let pos = self
            .cells
            .binary_search_by(|c| (c.corruption.as_str(), c.level).cmp(&(corruption, level)));
        let cell = match pos {
            Ok(i) => &mut self.cells[i],
            Err(i) => {
                self.cells.insert(
                    i,
                    ManifestCell {
                        corruption: corruption.to_string(),
                        level,
                        images: Vec::new(),
                    },
                );
                &mut self.cells[i]
            }
        };
        match cell.images.binary_search_by(|m| m.image_id.cmp(&image.image_id)) {
            Ok(i) => cell.images[i] = image,
            Err(i) => cell.images.insert(i, image),
        }
    }

    pub fn lookup(&self, corruption: &str, level: u8, image_id: &str) -> Option<&ManifestImage> {
        let cell = self
            .cells
            .iter()
            .find(|c| c.corruption == corruption && c.level == level)?;
        cell.images.iter().find(|m| m.image_id == image_id)
    }

    pub fn image_count(&self) -> usize {
        self.cells.iter().map(|c| c.images.len()).sum()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        let m: Manifest = serde_json::from_str(text).map_err(|source| DatasetError::Json {
            context: "manifest".into(),
            source,
        })?;
        if m.format != MANIFEST_FORMAT {
            return Err(DatasetError::Manifest(format!("unsupported format {}", m.format)));
        }
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?)
    }

    /// Checks that every `(corruption, level)` in `expected` is present and
    /// that every listed file under `root` matches its digest.
    pub fn verify(&self, root: impl AsRef<Path>, expected: &[(String, u8)]) -> Result<(), DatasetError> {
        let present: BTreeMap<(&str, u8), &ManifestCell> = self
            .cells
            .iter()
            .map(|c| ((c.corruption.as_str(), c.level), c))
            .collect();
        for (c, l) in expected {
            if !present.contains_key(&(c.as_str(), *l)) {
                return Err(DatasetError::Manifest(format!("cell {c}/{l} missing")));
            }
        }
        for image in self.cells.iter().flat_map(|c| &c.images) {
            let path = root.as_ref().join(&image.path);
            let bytes = std::fs::read(&path).map_err(|e| DatasetError::io(&path, e))?;
            if file_digest(&bytes) != image.sha256 {
                return Err(DatasetError::DigestMismatch(image.path.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(id: &str, bytes: &[u8]) -> ManifestImage {
        ManifestImage {
            image_id: id.into(),
            path: format!("snow/1/{id}.png"),
            sha256: file_digest(bytes),
        }
    }

    #[test]
    fn digest_known_value() {
        assert_eq!(
            file_digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn insert_is_sorted_and_idempotent() {
        let mut a = Manifest::new("d", 1, "1");
        a.insert("snow", 2, image("b", b"1"));
        a.insert("contrast", 1, image("a", b"2"));
        a.insert("snow", 2, image("a", b"3"));
        let mut b = Manifest::new("d", 1, "1");
        b.insert("snow", 2, image("a", b"3"));
        b.insert("snow", 2, image("b", b"1"));
        b.insert("contrast", 1, image("a", b"2"));
        b.insert("contrast", 1, image("a", b"2"));
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.image_count(), 3);
        assert_eq!(a.cells[0].corruption, "contrast");
        assert!(a.lookup("snow", 2, "b").is_some());
        assert!(a.lookup("snow", 3, "b").is_none());
    }

    #[test]
    fn json_round_trip_and_format_check() {
        let mut m = Manifest::new("d", 9, "1");
        m.insert("snow", 1, image("x", b"z"));
        assert_eq!(Manifest::from_json(&m.to_json()).unwrap(), m);
        let bad = m.to_json().replace("\"format\": 1", "\"format\": 2");
        assert!(Manifest::from_json(&bad).is_err());
    }

    #[test]
    fn verify_detects_tampering_and_gaps() {
        let dir = std::env::temp_dir().join(format!("visrobust-manifest-{}", std::process::id()));
        std::fs::create_dir_all(dir.join("snow/1")).unwrap();
        std::fs::write(dir.join("snow/1/x.png"), b"pixels").unwrap();
        let mut m = Manifest::new("d", 9, "1");
        m.insert("snow", 1, image("x", b"pixels"));
        m.verify(&dir, &[("snow".into(), 1)]).unwrap();
        assert!(m.verify(&dir, &[("snow".into(), 2)]).is_err());
        std::fs::write(dir.join("snow/1/x.png"), b"pixelz").unwrap();
        assert!(matches!(m.verify(&dir, &[]), Err(DatasetError::DigestMismatch(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
