//! End-to-end tests of the `coarse` binary: exit-code contract, JSON
//! round trips through files, and byte-determinism of seeded runs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn coarse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(p: &Path) -> String {
    p.to_str().expect("utf-8 path").to_owned()
}

#[test]
fn wordlen_matches_spec_example() {
    let out = coarse(&["wordlen", "--group", "zwz", "--element", r#"{"lamps":[[2,3]],"shift":0}"#]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "7");
}

#[test]
fn wordlen_nested_and_product() {
    // ((delta_0^{(delta_0^1, 0)}), 0) in (Z wr Z) wr Z: one inner lamp
    let nested = r#"{"lamps":[[0,{"lamps":[[0,1]],"shift":0}]],"shift":0}"#;
    let out = coarse(&["wordlen", "--group", "zwz-wr-z", "--element", nested]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1");

    let product = r#"{"coordinates":[{"lamps":[[2,3]],"shift":0},{"lamps":[],"shift":5}]}"#;
    let out = coarse(&["wordlen", "--group", "zwz^2", "--element", product]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "12");

    // arity mismatch is a config error
    let out = coarse(&["wordlen", "--group", "zwz^3", "--element", product]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn growth_csv_matches_known_prefix() {
    let out = coarse(&["growth", "--group", "zwz", "--radius", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "radius,ball_size\n0,1\n1,5\n2,17\n3,53\n");
}

#[test]
fn ball_budget_exceeded_is_exit_3() {
    let out = coarse(&["ball", "--group", "zwz", "--radius", "8", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn budget_env_var_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_coarse"))
        .args(["ball", "--group", "zwz", "--radius", "8"])
        .env("COARSE_BUDGET", "10")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_group_is_exit_2() {
    let out = coarse(&["growth", "--group", "so3", "--radius", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_verify_round_trip_and_mutation_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("grid.json");
    let witness = dir.path().join("w.json");

    let out = coarse(&["fixture", "grid", "--width", "8", "--height", "8", "--out", &path_str(&space)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = coarse(&[
        "decompose", "--space", &path_str(&space), "--strategy", "product",
        "--r", "2", "--out", &path_str(&witness),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = coarse(&["verify-witness", "--space", &path_str(&space), "--witness", &path_str(&witness)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: pass"));

    // removing a point from a root piece shrinks the induced child
    // space, so the child's indices dangle: config error by contract
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&witness).unwrap()).unwrap();
    let first = v["family0"][0].as_array_mut().unwrap();
    first.remove(0);
    fs::write(&witness, serde_json::to_string(&v).unwrap()).unwrap();
    let out = coarse(&["verify-witness", "--space", &path_str(&space), "--witness", &path_str(&witness)]);
    assert_eq!(out.status.code(), Some(2));

    // malformed JSON is also a config error
    fs::write(&witness, "{ not json").unwrap();
    let out = coarse(&["verify-witness", "--space", &path_str(&space), "--witness", &path_str(&witness)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_z_strategy_on_line_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("line.json");
    let witness = dir.path().join("w.json");
    // a 30 x 1 grid is the integer segment [0, 29]
    let out = coarse(&["fixture", "grid", "--width", "30", "--height", "1", "--out", &path_str(&space)]);
    assert!(out.status.success());
    let out = coarse(&[
        "decompose", "--space", &path_str(&space), "--strategy", "z",
        "--r", "3", "--out", &path_str(&witness),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = coarse(&["verify-witness", "--space", &path_str(&space), "--witness", &path_str(&witness)]);
    assert_eq!(out.status.code(), Some(0));

    // a single-point mutation of the passing witness is rejected as a
    // verification failure (coverage breaks, no dangling indices)
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&witness).unwrap()).unwrap();
    let first = v["family0"][0].as_array_mut().unwrap();
    first.remove(0);
    fs::write(&witness, serde_json::to_string(&v).unwrap()).unwrap();
    let out = coarse(&["verify-witness", "--space", &path_str(&space), "--witness", &path_str(&witness)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn cover_pipeline_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("grid.json");
    let report = dir.path().join("report.json");
    coarse(&["fixture", "grid", "--width", "12", "--height", "12", "--out", &path_str(&space)]);

    let out = coarse(&[
        "cover-pipeline", "--space", &path_str(&space),
        "--r", "3", "--d", "1", "--lambda", "1/2",
        "--report", &path_str(&report),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["steps"].as_array().unwrap().len(), 4);
    assert!(v["steps"][0]["d_multiplicity"].as_u64().unwrap() <= 2);
    assert!(v["steps"][1]["multiplicity"].as_u64().unwrap() <= 2);

    // r <= 2d violates the T12 precondition: verification failure
    let out = coarse(&[
        "cover-pipeline", "--space", &path_str(&space),
        "--r", "2", "--d", "1", "--lambda", "1/2",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // nonsense steps string: config error
    let out = coarse(&[
        "cover-pipeline", "--space", &path_str(&space),
        "--r", "3", "--d", "1", "--lambda", "1/2", "--steps", "34,12",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rep_check_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = coarse(&[
            "rep-check", "--mode", "hom", "--radius", "8", "--samples", "200",
            "--seed", "41", "--report", &path_str(path),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "same seed, same bytes");

    let out = coarse(&["rep-check", "--mode", "inj", "--radius", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["collisions"], 0);
    assert_eq!(v["t1_collision_found"], true);
}

#[test]
fn stats_emits_exact_rationals() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("line.json");
    let cover = dir.path().join("cover.json");
    // 5-point line via the grid fixture (5 x 1)
    coarse(&["fixture", "grid", "--width", "5", "--height", "1", "--out", &path_str(&space)]);
    fs::write(&cover, r#"{"pieces":[[0,1,2],[2,3,4]]}"#).unwrap();
    let out = coarse(&[
        "stats", "--space", &path_str(&space), "--cover", &path_str(&cover),
        "--d", "1", "--lambda", "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["points"], 5);
    assert_eq!(v["diam"], "4");
    assert_eq!(v["multiplicity"], 2);
    assert_eq!(v["covers"], true);
    assert_eq!(v["nerve_edges"], 1);
    // {1, 3} has diameter 2 and fits in no piece; every diameter-1 set fits
    assert_eq!(v["lebesgue"], "2");
    assert_eq!(v["lebesgue_exceeds_lambda"], true);
}

#[test]
fn fixtures_are_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = coarse(&[
            "fixture", "random-metric", "--points", "10", "--seed", "99", "--out", &path_str(path),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    // stats re-validates the metric axioms on load
    let out = coarse(&["stats", "--space", &path_str(&a)]);
    assert_eq!(out.status.code(), Some(0));

    // ball fixture agrees with the BFS count
    let ball = dir.path().join("ball.json");
    let out = coarse(&["fixture", "ball", "--group", "zwz", "--radius", "2", "--out", &path_str(&ball)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&ball).unwrap()).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 17);
}
