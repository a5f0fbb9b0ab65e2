//! End-to-end runs of the `rangeface` binary.

use std::path::Path;
use std::process::{Command, Output};

use rangeface::rangeio::{write_ascii_grid, RangeImage};
use serde_json::Value;

fn rangeface(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rangeface"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a synthetic image and returns its path.
fn synth(dir: &Path, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut args = vec!["synth", "-o", s(&path)];
    args.extend_from_slice(extra);
    let o = rangeface(&args);
    assert!(o.status.success(), "synth failed: {}", String::from_utf8_lossy(&o.stdout));
    path
}

/// Palette values of a binary PGM with a three-line header.
fn pgm8_pixels(path: &Path) -> Vec<u8> {
    let bytes = std::fs::read(path).unwrap();
    let mut newlines = 0;
    let start = bytes
        .iter()
        .position(|&b| {
            newlines += usize::from(b == b'\n');
            newlines == 3
        })
        .unwrap();
    bytes[start + 1..].to_vec()
}

#[test]
fn detect_finds_the_synthetic_nose() {
    let dir = tempfile::tempdir().unwrap();
    let img = synth(dir.path(), "face.txt", &[]);
    let truth: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("face.truth.json")).unwrap()).unwrap();

    let o = rangeface(&["detect", s(&img)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let (r, c) = (v["nose"]["row"].as_f64().unwrap(), v["nose"]["col"].as_f64().unwrap());
    let (tr, tc) = (truth["nose"][0].as_f64().unwrap(), truth["nose"][1].as_f64().unwrap());
    assert!(((r - tr).powi(2) + (c - tc).powi(2)).sqrt() <= 2.0, "nose at ({r}, {c}), truth ({tr}, {tc})");
    assert_eq!(v["eyes"].as_array().unwrap().len(), 2);
    assert!(v["config"]["smoothing"]["sigma"].is_number());
}

#[test]
fn detect_is_repeatable_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let img = synth(dir.path(), "face.pgm", &["--seed", "11", "--pose", "Y:18", "--noise-sigma", "0.2"]);
    for fmt in ["json", "csv"] {
        let a = rangeface(&["detect", s(&img), "--format", fmt]);
        let b = rangeface(&["detect", s(&img), "--format", fmt]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn surface_without_features_reports_no_candidates() {
    let dir = tempfile::tempdir().unwrap();
    // A flat plateau on a zero background: thresholding keeps only the plateau.
    let step = RangeImage::from_fn(40, 40, |r, c| if (8..32).contains(&r) && (8..32).contains(&c) { 50.0 } else { 0.0 });
    let path = dir.path().join("step.txt");
    std::fs::write(&path, write_ascii_grid(&step)).unwrap();

    let o = rangeface(&["detect", s(&path)]);
    assert_eq!(o.status.code(), Some(3));
    let v = json(&o);
    assert_eq!(v["stage"], "detect");
    assert_eq!(v["code"], "NoCandidates");
    assert!(v["message"].as_str().is_some_and(|m| !m.is_empty()));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let img = synth(dir.path(), "face.txt", &[]);

    let missing = rangeface(&["detect", s(&dir.path().join("nope.txt"))]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(json(&missing)["stage"], "load");

    let crop = rangeface(&["detect", s(&img), "--crop", "0,0,500,500"]);
    assert_eq!(crop.status.code(), Some(4));
    assert_eq!(json(&crop)["stage"], "crop");

    let garbled = rangeface(&["detect", s(&img), "--crop", "banana"]);
    assert_eq!(garbled.status.code(), Some(4));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "no-such-key = 1\n").unwrap();
    let unknown = rangeface(&["detect", s(&img), "--config", s(&cfg)]);
    assert_eq!(unknown.status.code(), Some(4));
    assert_eq!(json(&unknown)["stage"], "config");
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let img = synth(dir.path(), "face.txt", &[]);
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# tuned\nsigma = 1.5\nmin-separation = 10\n").unwrap();

    let v = json(&rangeface(&["detect", s(&img), "--config", s(&cfg), "--sigma", "0.8"]));
    assert_eq!(v["config"]["smoothing"]["sigma"], 0.8);
    assert_eq!(v["config"]["detect"]["min_separation"], 10.0);
    assert_eq!(v["config"]["smoothing"]["radius"], 2);
}

#[test]
fn batch_mode_keeps_going_past_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "a.txt", &[]);
    synth(dir.path(), "b.txt", &["--seed", "3"]);
    std::fs::write(dir.path().join("c.txt"), "not a grid\n").unwrap();

    let o = rangeface(&["detect", s(dir.path())]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["processed"], 3);
    assert_eq!(v["failed"], 1);
    assert!(v["results"][2]["error"]["code"].is_string());
}

#[test]
fn classify_map_labels_analytic_surfaces() {
    let dir = tempfile::tempdir().unwrap();

    let sphere = synth(dir.path(), "sphere.txt", &["--kind", "hemisphere", "--size", "101", "--surface-radius", "50"]);
    let map = dir.path().join("sphere.pgm");
    let o = rangeface(&["classify-map", s(&sphere), "-o", s(&map), "--no-threshold", "--no-smooth"]);
    assert!(o.status.success());
    let px = pgm8_pixels(&map);
    assert_eq!(px.len(), 101 * 101);
    let labelled: Vec<u8> = px.iter().copied().filter(|&p| p != 0).collect();
    let convex = labelled.iter().filter(|&&p| p == 128).count();
    assert!(convex as f64 >= 0.99 * labelled.len() as f64, "{convex} of {}", labelled.len());

    let plane = synth(dir.path(), "plane.txt", &["--kind", "plane", "--size", "32"]);
    let map = dir.path().join("plane.pgm");
    let o = rangeface(&["classify-map", s(&plane), "-o", s(&map), "--no-threshold"]);
    assert!(o.status.success());
    assert!(pgm8_pixels(&map).iter().all(|&p| p == 64));
    assert_eq!(json(&o)["counts"]["Planar"], 1024);

    let saddle = synth(dir.path(), "saddle.txt", &["--kind", "saddle", "--size", "41"]);
    let map = dir.path().join("saddle.pgm");
    let o = rangeface(&["classify-map", s(&saddle), "-o", s(&map), "--no-threshold", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(pgm8_pixels(&map)[20 * 41 + 20], 32);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("class,palette,pixels\n"));
}

#[test]
fn frontal_eval_finds_every_nose() {
    let run = || rangeface(&["eval", "--poses", "frontal", "--trials", "20", "--seed", "5", "--format", "json"]);
    let a = run();
    assert!(a.status.success());
    let v = json(&a);
    assert_eq!(v["total"], 20);
    assert_eq!(v["cells"][0]["total"], 20);
    assert_eq!(v["nose_rate"], 1.0);
    assert_eq!(run().stdout, a.stdout);
}

#[test]
fn eval_cells_follow_the_pose_list() {
    let o = rangeface(&["eval", "--poses", "Y:30,Z-15", "--trials", "4", "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("Y,30,4,"));
    assert!(rows[1].starts_with("Z,-15,4,"));

    let bad = rangeface(&["eval", "--poses", "Q:3"]);
    assert_eq!(bad.status.code(), Some(4));
}
