use std::fs;
use std::process::{Command, Output};

fn isoglue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoglue")).args(args).env_remove("ISOGLUE_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn metric_run_passes() {
    let out = isoglue(&["verify-metric", "--R", "1", "--M", "2", "--samples", "5000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["violation_count"], 0);
    assert_eq!(v["config"]["seed"], "7");
    assert_eq!(v["command"], "verify-metric");
}

#[test]
fn negative_r_is_usage_error() {
    let out = isoglue(&["verify-metric", "--R", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`R`"), "{}", stderr(&out));
}

#[test]
fn invalid_metric_needs_the_flag() {
    let out = isoglue(&["counterexample", "--R", "0.4", "--M", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`R`"));

    let out = isoglue(&["counterexample", "--R", "0.4", "--M", "1", "--allow-invalid-metric"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["report"]["slack"], "1/5 + 0*sqrt(2)");
    assert_eq!(v["report"]["flagged"], true);
}

#[test]
fn diagnostics_name_the_key() {
    for (args, key) in [
        (&["verify-metric", "--gram", "1,2,1"][..], "`gram`"),
        (&["verify-metric", "--alpha", "1/2 + 0*sqrt(2)"][..], "`alpha`"),
        (&["verify-metric", "--mode", "fast"][..], "`mode`"),
        (&["nearest", "--format", "csv"][..], "`format`"),
        (&["verify-metric", "--threads", "0"][..], "`threads`"),
    ] {
        let out = isoglue(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(key), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# canonical\nseed = 3\nsamples = 200\n").unwrap();
    let path = cfg.to_str().unwrap();

    let v = json(&isoglue(&["verify-metric", "--config", path]));
    assert_eq!(v["config"]["seed"], "3");
    assert_eq!(v["report"]["samples"], 200);

    let v = json(&isoglue(&["verify-metric", "--config", path, "--seed", "9"]));
    assert_eq!(v["config"]["seed"], "9");

    let out = Command::new(env!("CARGO_BIN_EXE_isoglue"))
        .args(["verify-metric", "--config", path])
        .env("ISOGLUE_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["seed"], "5");

    fs::write(&cfg, "colour = blue\n").unwrap();
    let out = isoglue(&["verify-metric", "--config", path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`colour`"));
}

#[test]
fn density_csv_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("density.csv");
    let out = isoglue(&["density", "--format", "csv", "--output", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&file).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("target_u1,target_u2,t,distance"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["verify-metric", "--space", "x", "--samples", "3000", "--seed", "42"];
    let a = isoglue(&args);
    let b = isoglue(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let c = isoglue(&["verify-metric", "--space", "x", "--samples", "3000", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn orbit_point_is_not_certified() {
    // g(1/2) = (1/2, √2/2)
    let out = isoglue(&["non-closure", "--target", "1/2, 0 + 1/2*sqrt(2)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["report"]["on_orbit"].is_string());
}

#[test]
fn local_pair_outside_radius_is_refused() {
    let out = isoglue(&["local-isometry", "--t", "0", "--s", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["report"]["refused"]["radius"].as_f64().unwrap() > 0.0);
    assert_eq!(v["report"]["unguarded"]["holds"], false);

    let out = isoglue(&["local-isometry", "--t", "1", "--s", "1.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}
