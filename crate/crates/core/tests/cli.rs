use std::path::Path;
use std::process::Command;

fn njee(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_njee")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    njee(args).status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["entropy", "--no-such-flag"]), 1);
    assert_eq!(code(&["entropy", "--k", "ten"]), 1);
    assert_eq!(code(&["mi", "--n", "1,2"]), 1);
    assert_eq!(code(&["bench", "--only", "plots"]), 1);
}

#[test]
fn data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(code(&["entropy", "--input", "/no/such/file.csv", "--out", path(&out)]), 2);
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n1,2\n3\n").unwrap();
    assert_eq!(code(&["entropy", "--input", path(&bad), "--out", path(&out)]), 2);
    let series = dir.path().join("s.csv");
    std::fs::write(&series, "timestamp,value\n2020-01-02,1.0\n2020-01-01,1.1\n").unwrap();
    assert_eq!(
        code(&["te", "--x-series", path(&series), "--y-series", path(&series), "--out", path(&out)]),
        2
    );
}

#[test]
fn entropy_of_csv_writes_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sample.csv");
    let mut text = String::from("a,b\n");
    for i in 0..200 {
        text.push_str(&format!("{},{}\n", i % 4, (i / 4) % 2));
    }
    std::fs::write(&input, text).unwrap();
    let out = dir.path().join("out");
    let o = njee(&[
        "entropy", "--input", path(&input), "--methods", "plugin,miller_madow", "--out", path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(out.join("entropy.csv")).unwrap();
    let plugin: f64 = rows.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((plugin - 8f64.ln()).abs() < 1e-12, "{rows}");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("entropy.csv.manifest.json")).unwrap()).unwrap();
    assert!(manifest["outputs"]["entropy.csv"].as_str().unwrap().len() == 64);
}

#[test]
fn config_file_fills_in_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"dist": "zipf", "alpha": 2.0, "k": 100, "n": [50], "reps": 2, "methods": ["plugin"], "seed": 4}"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&["entropy", "--config", path(&cfg), "--out", path(&a)]), 0);
    assert_eq!(code(&["entropy", "--config", path(&cfg), "--seed", "5", "--out", path(&b)]), 0);
    let ra = std::fs::read_to_string(a.join("entropy.csv")).unwrap();
    let rb = std::fs::read_to_string(b.join("entropy.csv")).unwrap();
    assert_eq!(ra.lines().count(), 3);
    assert_ne!(ra, rb);
    std::fs::write(&cfg, r#"{"dist": "zipf", "colour": 1}"#).unwrap();
    assert_eq!(code(&["entropy", "--config", path(&cfg), "--out", path(&a)]), 1);
}

#[test]
fn synthetic_te_writes_series_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("te");
    let o = njee(&[
        "te", "--n", "400", "--k", "3", "--coupling", "1", "--window", "150", "--stride", "50",
        "--lags-source", "1", "--lags-target", "1", "--epochs", "5", "--holdout", "0.2", "--out", path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["x.csv", "y.csv", "te.csv", "te.csv.manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let rows = std::fs::read_to_string(out.join("te.csv")).unwrap();
    // 399 returns, 398 embedded rows, windows of 150 every 50
    assert_eq!(rows.lines().count() - 1, (398 - 150) / 50 + 1);
}

#[test]
fn gradcheck_bench_section_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let o = njee(&["bench", "--only", "gradcheck", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let acc = std::fs::read_to_string(out.join("acceptance.csv")).unwrap();
    assert!(acc.lines().skip(1).all(|l| l.ends_with("true")), "{acc}");
}
