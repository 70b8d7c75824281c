mod support;

use std::path::Path;

use support::*;

fn generate(images: &Path, out: &Path, corruptions: &str, jobs: &str) {
    run_ok(&[
        "generate",
        "--images",
        images.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--corruptions",
        corruptions,
        "--seed",
        "42",
        "--jobs",
        jobs,
    ]);
}

#[test]
fn one_image_one_corruption_gives_five_outputs_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("img");
    write_images(&images, 1, 20, 14);
    let out = dir.path().join("out");
    generate(&images, &out, "snow", "1");
    let tree = digest_tree(&out);
    let pngs: Vec<_> = tree.keys().filter(|k| k.ends_with(".png")).collect();
    assert_eq!(pngs.len(), 5);
    for l in 1..=5 {
        assert!(tree.contains_key(&format!("snow/{l}/0000.png")));
    }
    assert!(tree.contains_key("manifest.json"));
    assert!(tree.contains_key("run_config.json"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["root_seed"], 42);
    assert_eq!(manifest["cells"].as_array().unwrap().len(), 5);
}

#[test]
fn reruns_and_worker_counts_give_identical_trees() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("img");
    write_images(&images, 3, 24, 16);
    let corruptions = "gaussian_noise,snow,elastic_transform,splatter,jpeg_compression";
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    generate(&images, &a, corruptions, "1");
    generate(&images, &b, corruptions, "4");
    generate(&images, &c, corruptions, "1");
    let strip = |root: &Path| {
        // run_config.json records the output path and job count, which differ by design.
        let mut t = digest_tree(root);
        t.remove("run_config.json");
        t
    };
    let ta = strip(&a);
    assert_eq!(ta.len(), 3 * 5 * 5 + 1);
    assert_eq!(ta, strip(&b));
    assert_eq!(ta, strip(&c));
}

#[test]
fn interrupted_run_resumes_to_the_same_tree() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("img");
    write_images(&images, 2, 16, 16);
    let out = dir.path().join("out");
    generate(&images, &out, "shot_noise,pixelate", "2");
    let before = digest_tree(&out);
    std::fs::remove_file(out.join("shot_noise/3/0001.png")).unwrap();
    std::fs::write(out.join("pixelate/2/0000.png"), b"truncated").unwrap();
    generate(&images, &out, "shot_noise,pixelate", "2");
    assert_eq!(digest_tree(&out), before);
}

#[test]
fn resume_with_a_different_seed_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("img");
    write_images(&images, 1, 8, 8);
    let out = dir.path().join("out");
    generate(&images, &out, "contrast", "1");
    let status = bin()
        .args([
            "generate",
            "--images",
            images.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .args(["--corruptions", "contrast", "--seed", "7"])
        .output()
        .unwrap();
    assert!(!status.status.success());
}

fn prediction_fixture(root: &Path) -> (std::path::PathBuf, std::path::PathBuf, std::path::PathBuf) {
    let (q, a, ids) = write_vqa(&root.join("vqa"), &[1, 2, 3], 2);
    let preds = root.join("preds");
    let n = ids.len();
    for model in ["ModelA", "ModelB"] {
        write_predictions(&preds, model, "clean", 0, &ids, &vec![4; n]);
        for corruption in ["snow", "shot_noise"] {
            for level in 1..=5u8 {
                let counts: Vec<usize> = (0..n).map(|i| (i + level as usize) % 5).collect();
                write_predictions(&preds, model, corruption, level, &ids, &counts);
            }
        }
    }
    (q, a, preds)
}

fn evaluate(q: &Path, a: &Path, preds: &Path, out: &Path) -> std::process::Output {
    bin()
        .args([
            "evaluate",
            "--questions",
            q.to_str().unwrap(),
            "--annotations",
            a.to_str().unwrap(),
        ])
        .args(["--predictions", preds.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap()
}

#[test]
fn evaluate_then_report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (q, a, preds) = prediction_fixture(dir.path());
    let grid = dir.path().join("grid.csv");
    let out = evaluate(&q, &a, &preds, &grid);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&grid).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("model,corruption,level,accuracy,error"));
    assert_eq!(lines.count(), 2 * 2 * 6);
    assert!(text.contains("ModelA,shot_noise,0,1.0,0.0"));
    assert!(dir.path().join("grid.run_config.json").exists());

    let r1 = dir.path().join("r1");
    let r2 = dir.path().join("r2");
    for r in [&r1, &r2] {
        run_ok(&[
            "report",
            "--grid",
            grid.to_str().unwrap(),
            "--out",
            r.to_str().unwrap(),
            "--prefer",
            "mu=0.6",
        ]);
    }
    let (mut t1, mut t2) = (digest_tree(&r1), digest_tree(&r2));
    for t in [&mut t1, &mut t2] {
        t.remove("run_config.json");
    }
    assert_eq!(t1, t2);
    for f in [
        "report.json",
        "table_accuracy.csv",
        "table_metrics.csv",
        "plot_relative_drop_heatmap.csv",
        "plot_average_error_bars.csv",
        "plot_error_trends.csv",
        "plot_submetric_radar.csv",
    ] {
        assert!(t1.contains_key(f), "{f}");
    }
    let config: serde_json::Value =
        serde_json::from_slice(&std::fs::read(r1.join("run_config.json")).unwrap()).unwrap();
    assert_eq!(config["preferences"]["average_error"], 0.6);
}

#[test]
fn perfect_predictions_give_unit_accuracy_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (q, a, ids) = write_vqa(&dir.path().join("vqa"), &[5, 6], 3);
    let preds = dir.path().join("preds");
    write_predictions(&preds, "Oracle", "clean", 0, &ids, &vec![3; ids.len()]);
    for level in 1..=5 {
        write_predictions(&preds, "Oracle", "contrast", level, &ids, &vec![4; ids.len()]);
    }
    let grid = dir.path().join("g.csv");
    assert!(evaluate(&q, &a, &preds, &grid).status.success());
    let text = std::fs::read_to_string(&grid).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",1.0,0.0"), "{line}");
    }
}

#[test]
fn missing_prediction_file_names_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    let (q, a, preds) = prediction_fixture(dir.path());
    std::fs::remove_file(preds.join("ModelB/snow/4.json")).unwrap();
    let grid = dir.path().join("grid.csv");
    let out = evaluate(&q, &a, &preds, &grid);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ModelB/snow/4"), "{err}");
    assert!(!grid.exists());
}

#[test]
fn report_rejects_weights_that_do_not_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let (q, a, preds) = prediction_fixture(dir.path());
    let grid = dir.path().join("grid.csv");
    assert!(evaluate(&q, &a, &preds, &grid).status.success());
    let out_dir = dir.path().join("rep");
    let out = bin()
        .args([
            "report",
            "--grid",
            grid.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .args(["--weights", "0.2,0.2,0.2,0.2,0.1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    assert!(!out_dir.join("report.json").exists());

    let out = bin()
        .args([
            "report",
            "--grid",
            grid.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .args(["--prefer", "sigma=1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn report_on_the_shipped_grid_ranks_models() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("paper_grid.csv");
    std::fs::write(
        &grid,
        visrobust_cli::evaluate::grid_csv(&visrobust::EvaluationGrid::reference()).unwrap(),
    )
    .unwrap();
    let out = dir.path().join("rep");
    run_ok(&[
        "report",
        "--grid",
        grid.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let table = std::fs::read_to_string(out.join("table_metrics.csv")).unwrap();
    let vre: Vec<(String, f64)> = table
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("model,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f.last().unwrap().parse().unwrap())
        })
        .collect();
    let names: Vec<&str> = vre.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["ViLT", "BLIP", "VLE", "PNP"]);
    assert!(vre.windows(2).all(|w| w[0].1 < w[1].1));
}
