use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fracsr::imaging::{bicubic_resize, load_image, save_image};
use fracsr::metrics::rmse;
use fracsr::pipeline::degrade;
use fracsr::{Image, ScaleFactor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fracsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsr"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn smooth_image(dir: &Path, name: &str, w: usize, h: usize, seed: u64) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b): (f64, f64) = (rng.gen_range(0.1..0.5), rng.gen_range(0.1..0.5));
    let img = Image::from_fn(w, h, |x, y| {
        0.5 + 0.4 * ((x as f64 * a).sin() * (y as f64 * b).cos())
    });
    let p = dir.join(name);
    save_image(&img, &p).unwrap();
    p
}

#[test]
fn upscale_writes_scaled_image_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let input = smooth_image(dir.path(), "in.png", 20, 12, 1);
    let out = dir.path().join("out.png");
    let trace = dir.path().join("trace.txt");
    let o = fracsr(&[
        "upscale",
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--scale",
        "4",
        "--trace",
        s(&trace),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(load_image(&out).unwrap().dims(), (80, 48));
    let t = std::fs::read_to_string(&trace).unwrap();
    assert!(t.contains("level 1") && t.contains("level 2") && !t.contains("level 3"));
    assert!(t.lines().any(|l| l.starts_with("alpha* ")));
}

#[test]
fn upscale_pgm_with_fixed_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let input = smooth_image(dir.path(), "in.pgm", 10, 8, 2);
    let out = dir.path().join("out.pgm");
    let o = fracsr(&[
        "upscale",
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--scale",
        "2",
        "--alpha",
        "0.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(load_image(&out).unwrap().dims(), (20, 16));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = smooth_image(dir.path(), "in.png", 8, 8, 3);
    let out = dir.path().join("out.png");
    for bad in [
        &["--scale", "3"][..],
        &["--scale", "2", "--alpha", "1.5"],
        &["--scale", "2", "--alpha", "0"],
    ] {
        let mut args = vec!["upscale", "--input", s(&input), "--output", s(&out)];
        args.extend_from_slice(bad);
        assert_eq!(fracsr(&args).status.code(), Some(2), "{bad:?}");
    }
    assert_eq!(fracsr(&["frobnicate"]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn runtime_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.png");
    let out = dir.path().join("out.png");
    let o = fracsr(&[
        "upscale",
        "--input",
        s(&missing),
        "--output",
        s(&out),
        "--scale",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    let a = smooth_image(dir.path(), "a.png", 8, 8, 4);
    let b = smooth_image(dir.path(), "b.png", 9, 8, 5);
    let o = fracsr(&["metrics", "--ref", s(&a), "--test", s(&b)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reference is (8, 8) but test is (9, 8)"));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "lambda = -1\n").unwrap();
    let o = fracsr(&[
        "upscale",
        "--input",
        s(&a),
        "--output",
        s(&out),
        "--scale",
        "2",
        "--config",
        s(&cfg),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn metrics_of_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = smooth_image(dir.path(), "a.png", 24, 24, 6);
    let o = fracsr(&["metrics", "--ref", s(&a), "--test", s(&a), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rmse"], 0.0);
    assert_eq!(v["ssim"], 1.0);
    assert_eq!(v["texture"]["similarity"], 0.0);
    assert!(v["texture"]["reference"]["entropy"].is_number());

    let o = fracsr(&[
        "metrics",
        "--ref",
        s(&a),
        "--test",
        s(&a),
        "--rmse",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_object().unwrap().len(), 1);

    let o = fracsr(&["metrics", "--ref", s(&a), "--test", s(&a), "--ssim"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "ssim 1");
}

#[test]
fn bench_rows_and_baseline_consistency() {
    let dir = tempfile::tempdir().unwrap();
    let hr = dir.path().join("hr");
    std::fs::create_dir(&hr).unwrap();
    smooth_image(&hr, "b.png", 34, 30, 7);
    smooth_image(&hr, "a.png", 32, 32, 8);
    std::fs::write(hr.join("notes.txt"), "skip me").unwrap();
    let csv_path = dir.path().join("bench.csv");
    let o = fracsr(&[
        "bench",
        "--hr-dir",
        s(&hr),
        "--scale",
        "2",
        "--methods",
        "ours,bicubic",
        "--out",
        s(&csv_path),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "image",
            "method",
            "scale",
            "rmse",
            "ssim",
            "tex_energy",
            "tex_homogeneity",
            "tex_entropy",
            "alpha_per_level",
            "wall_ms"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let keys: Vec<(&str, &str)> = rows.iter().map(|r| (&r[0], &r[1])).collect();
    assert_eq!(
        keys,
        [
            ("a.png", "ours"),
            ("a.png", "bicubic"),
            ("b.png", "ours"),
            ("b.png", "bicubic")
        ]
    );
    assert!(!rows[0][8].is_empty());
    assert!(rows[1][8].is_empty());

    // The bicubic row must agree with scoring the same degradation directly.
    let s2 = ScaleFactor::new(2).unwrap();
    let (reference, lr) = degrade(&load_image(hr.join("b.png")).unwrap(), s2, 0.55).unwrap();
    let expected = rmse(&reference, &bicubic_resize(&lr, 2)).unwrap();
    let got: f64 = rows[3][3].parse().unwrap();
    assert!(
        (got - expected).abs() <= 1e-9 * expected.max(1.0),
        "{got} vs {expected}"
    );
}
