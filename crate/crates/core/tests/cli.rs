mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use psl::oracle::persistent_betti0_unionfind;

fn psl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psl"))
        .args(args)
        .env_remove("PSL_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn tmpdir(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("psl-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn spectra_two_points() {
    let pts = fixture("two_points.xyz");
    let o = psl(&["spectra", "--points", p(&pts), "--charges", "unit", "--grid", "3:9:1", "--q", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let betti: Vec<u64> = v["records"].as_array().unwrap().iter().map(|r| r["betti"].as_u64().unwrap()).collect();
    assert_eq!(betti, [2, 2, 1, 1, 1, 1, 1]);
    for key in ["q", "delta", "grid", "records"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for key in ["t", "betti", "lambda_min", "stats", "empty"] {
        assert!(v["records"][0].get(key).is_some(), "{key}");
    }
}

#[test]
fn spectra_echoes_delta_and_dumps_complex() {
    let dir = tmpdir("dump");
    let dump = dir.join("complex.txt");
    let o = psl(&[
        "spectra", "--points", p(&fixture("two_points.xyz")), "--delta", "0.5", "--dump-complex", p(&dump),
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["delta"], 0.5);
    assert_eq!(std::fs::read_to_string(&dump).unwrap(), "0 0 0\n0 1 0\n1 0 1 5\n");
}

#[test]
fn missing_points_file() {
    let o = psl(&["spectra", "--points", "/nonexistent/cloud.xyz"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/cloud.xyz"));
}

#[test]
fn malformed_points_and_bad_flags() {
    let dir = tmpdir("bad");
    let f = dir.join("bad.xyz");
    std::fs::write(&f, "0 0 0 1\n1 2 oops 1\n").unwrap();
    assert_eq!(code(&psl(&["spectra", "--points", p(&f)])), 2);
    assert_eq!(code(&psl(&["spectra", "--points", p(&fixture("two_points.xyz")), "--grid", "9,3"])), 2);
    assert_eq!(code(&psl(&["frobnicate"])), 2);
}

#[test]
fn config_file_and_overrides() {
    let dir = tmpdir("config");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "grid = [4.0, 6.0]\ndelta = 0.25\ncharges = \"unit\"\n").unwrap();
    let pts = fixture("two_points.xyz");
    let o = psl(&["--config", p(&cfg), "spectra", "--points", p(&pts)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["grid"], serde_json::json!([4.0, 6.0]));
    assert_eq!(v["delta"], 0.25);
    let o = psl(&["--config", p(&cfg), "spectra", "--points", p(&pts), "--delta", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["delta"], 1.0);

    std::fs::write(&cfg, "grdi = [4.0]\n").unwrap();
    assert_eq!(code(&psl(&["--config", p(&cfg), "spectra", "--points", p(&pts)])), 2);
}

#[test]
fn featurize_golden_row_bit_exact() {
    let expected = std::fs::read_to_string(fixture("micro_golden.csv")).unwrap();
    for threads in ["1", "3"] {
        let o = psl(&[
            "--threads", threads, "featurize",
            "--wt", p(&fixture("micro_wt.pqr")),
            "--mt", p(&fixture("micro_mt.pqr")),
            "--mutation", MICRO_MUTATION,
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(String::from_utf8(o.stdout).unwrap(), expected);
    }
    let o = Command::new(env!("CARGO_BIN_EXE_psl"))
        .args(["featurize", "--wt", p(&fixture("micro_wt.pqr")), "--mt", p(&fixture("micro_mt.pqr")), "--mutation", MICRO_MUTATION])
        .env("PSL_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), expected);
}

#[test]
fn featurize_json() {
    let o = psl(&[
        "featurize", "--format", "json",
        "--wt", p(&fixture("micro_wt.pqr")), "--mt", p(&fixture("micro_mt.pqr")),
        "--mutation", MICRO_MUTATION,
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["spec"], MICRO_MUTATION);
    assert_eq!(v["layout_version"], "psl-site-v1");
    assert_eq!(v["config"]["cutoff"], 16.0);
    let values: Vec<f64> = v["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(values, golden().2);
}

#[test]
fn featurize_residue_mismatch_exits_4() {
    let o = psl(&[
        "featurize", "--wt", p(&fixture("micro_wt.pqr")), "--mt", p(&fixture("micro_mt.pqr")),
        "--mutation", "A:2:Q:G",
    ]);
    assert_eq!(code(&o), 4);
    let o = psl(&[
        "featurize", "--wt", p(&fixture("micro_wt.pqr")), "--mt", p(&fixture("micro_mt.pqr")),
        "--mutation", "A:3:Q",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn featurize_batch_keep_going() {
    let manifest = fixture("micro_batch.txt");
    let o = psl(&["featurize", "--batch", p(&manifest), "--keep-going"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("A:3:Q:A,"));
    assert!(rows[2].starts_with("A:3:A:Q,"));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("2 succeeded, 1 failed"), "{err}");
    assert!(err.contains("A:2:Q:A"));
    assert_eq!(code(&psl(&["featurize", "--batch", p(&manifest)])), 4);
}

#[test]
fn demo_tables() {
    let dir = tmpdir("demo");
    let read = |name: &str| -> Vec<(f64, usize, Option<f64>)> {
        std::fs::read_to_string(dir.join(name))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().ok())
            })
            .collect()
    };
    assert_eq!(code(&psl(&["demo", "--out-dir", p(&dir)])), 0);
    let mixed = read("demo_q0.csv");
    assert_eq!(read("demo_q1.csv").len(), mixed.len());
    assert_eq!(code(&psl(&["demo", "--charges", "1,1", "--out-dir", p(&dir)])), 0);
    let uniform = read("demo_q0.csv");

    let betti: Vec<usize> = mixed.iter().map(|r| r.1).collect();
    assert_eq!(betti[0], 12);
    assert_eq!(*betti.last().unwrap(), 1);
    assert!(betti.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(betti, uniform.iter().map(|r| r.1).collect::<Vec<_>>());

    let cloud = psl::demo::demo_cloud(1.0, 1.0).unwrap();
    let d = psl::geometry::pairwise_distances(&cloud, &psl::geometry::DistanceSpec::Euclidean).unwrap();
    for r in &uniform {
        assert_eq!(r.1, persistent_betti0_unionfind(&d, r.0, r.0));
    }
    assert_ne!(
        mixed.iter().map(|r| r.2).collect::<Vec<_>>(),
        uniform.iter().map(|r| r.2).collect::<Vec<_>>()
    );
}

#[test]
fn verify_exit_codes() {
    let o = psl(&["verify", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());

    let a = psl(&["verify", "--trials", "3", "--seed", "11"]);
    let b = psl(&["verify", "--trials", "3", "--seed", "11"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let f = psl(&["verify", "--trials", "2", "--inject-fault"]);
    assert_eq!(code(&f), 1);
    let first_fail = String::from_utf8(f.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|r| r["pass"] == false)
        .unwrap();
    assert!(first_fail["instance"].as_str().unwrap().contains("trial="));
}
