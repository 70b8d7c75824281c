#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use visrobust::PixelBuffer;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_visrobust"))
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn visrobust");
    assert!(
        out.status.success(),
        "visrobust {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// `n` small textured images named `0000.png`, `0001.png`, ...
pub fn write_images(dir: &Path, n: usize, w: usize, h: usize) {
    std::fs::create_dir_all(dir).unwrap();
    for i in 0..n {
        let img = PixelBuffer::from_fn(w, h, |x, y| {
            [
                ((x * 255) / w + i * 17) as u8,
                ((y * 255) / h) as u8,
                ((x * y + i * 31) % 256) as u8,
            ]
        })
        .unwrap();
        std::fs::write(dir.join(format!("{i:04}.png")), img.encode_png().unwrap()).unwrap();
    }
}

/// sha256 of every file under `root`, keyed by relative path.
pub fn digest_tree(root: &Path) -> BTreeMap<String, String> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, hex::encode(Sha256::digest(std::fs::read(&p).unwrap())));
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Each question's ten human answers hold `k1` once, `k2` twice, `k3`
/// three times and `k4` four times; answering `k{m}` matches m of them.
pub fn write_vqa(dir: &Path, image_ids: &[u64], per_image: usize) -> (PathBuf, PathBuf, Vec<(u64, u64)>) {
    std::fs::create_dir_all(dir).unwrap();
    let mut qs = Vec::new();
    let mut anns = Vec::new();
    let mut ids = Vec::new();
    for &img in image_ids {
        for k in 0..per_image as u64 {
            let qid = img * 1000 + k;
            ids.push((qid, img));
            qs.push(serde_json::json!({"question_id": qid, "image_id": img, "question": format!("what is {k}?")}));
            let answers: Vec<_> = (1..=4)
                .flat_map(|m| std::iter::repeat_n(format!("k{m}"), m))
                .enumerate()
                .map(|(i, a)| serde_json::json!({"answer": a, "answer_id": i + 1, "answer_confidence": "yes"}))
                .collect();
            anns.push(serde_json::json!({
                "question_id": qid, "image_id": img, "answers": answers,
                "multiple_choice_answer": "k4", "answer_type": "other", "question_type": "what"
            }));
        }
    }
    let q = dir.join("questions.json");
    let a = dir.join("annotations.json");
    std::fs::write(
        &q,
        serde_json::to_string(&serde_json::json!({"questions": qs})).unwrap(),
    )
    .unwrap();
    std::fs::write(
        &a,
        serde_json::to_string(&serde_json::json!({"annotations": anns})).unwrap(),
    )
    .unwrap();
    (q, a, ids)
}

/// Writes `<root>/<model>/<corruption>/<level>.json` answering `k{counts[i]}`
/// for question `ids[i]`.
pub fn write_predictions(root: &Path, model: &str, corruption: &str, level: u8, ids: &[(u64, u64)], counts: &[usize]) {
    let dir = root.join(model).join(corruption);
    std::fs::create_dir_all(&dir).unwrap();
    let entries: Vec<_> = ids
        .iter()
        .zip(counts)
        .map(|((qid, _), m)| serde_json::json!({"question_id": qid, "answer": format!("k{m}")}))
        .collect();
    std::fs::write(
        dir.join(format!("{level}.json")),
        serde_json::to_string(&entries).unwrap(),
    )
    .unwrap();
}
