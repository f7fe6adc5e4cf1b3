use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn coxlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxlab"))
        .args(args)
        .env_remove("COXLAB_CACHE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_reports_squares_and_constants() {
    let o = coxlab(&["analyze", path(&fixture("square.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["squares"], 1);
    assert_eq!(v["hyperbolic"], false);
    assert_eq!(v["admissible_strict"], true);
    assert_eq!(v["constants"]["M"], 1);
    assert_eq!(v["constants"]["Dc"], 2);

    let o = coxlab(&["analyze", path(&fixture("pentagon.json"))]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["squares"], 0);
    assert_eq!(v["hyperbolic"], true);

    let o = coxlab(&["analyze", path(&fixture("k33.json"))]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["admissible_strict"], false);
    assert_eq!(v["admissible_collapse_equal"], false);
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"generators\": [\"a\"], \"edges\": [[\"a\"").unwrap();
    let o = coxlab(&["analyze", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed"));

    std::fs::write(&bad, r#"{"generators": ["a"], "edges": [["a", "z"]]}"#).unwrap();
    let o = coxlab(&["analyze", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`z`"));

    let o = coxlab(&["analyze", "/nonexistent/diagram.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = coxlab(&["verify", path(&fixture("square.json")), "--radius", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = coxlab(&["verify", path(&fixture("square.json")), "--cap-ball", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn normalize_prints_normal_form_and_syllables() {
    let o = coxlab(&["normalize", path(&fixture("square.json")), "b", "a", "c", "a"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("normal form: a b c a"));
    assert!(out.contains("geodesic: true"));
    assert!(out.contains("syllables: b [aca]"));

    let o = coxlab(&["normalize", path(&fixture("example_f.json")), "acabedbfbc"]);
    assert!(stdout(&o).contains("syllables: [aca] b e d [bfb] c (6)"));

    let o = coxlab(&["normalize", path(&fixture("square.json")), "a a"]);
    let out = stdout(&o);
    assert!(out.contains("normal form: \n"));
    assert!(out.contains("geodesic: false"));

    let o = coxlab(&["normalize", path(&fixture("square.json")), "a", "q"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_writes_a_plateau_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = coxlab(&[
        "verify",
        path(&fixture("square.json")),
        "--radius",
        "4",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "plateau");
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["constants"]["M"], 1);
    let radii = v["radii"].as_array().unwrap();
    assert_eq!(radii.len(), 4);
    assert_eq!(radii[3]["delta_doubled"], 2);
    assert_eq!(radii[3]["guard_failures"], 0);
    assert!(stderr(&o).contains("verdict: plateau"));
}

#[test]
fn verify_reports_without_a_plateau() {
    let o = coxlab(&["verify", path(&fixture("k23.json")), "--radius", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "no-plateau");
    assert_eq!(v["radii"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_requires_a_covering_choice() {
    let dir = tempfile::tempdir().unwrap();
    let bare = dir.path().join("q.json");
    std::fs::write(
        &bare,
        r#"{"generators": ["a","b","c","d"], "edges": [["a","b"],["b","c"],["c","d"],["d","a"]]}"#,
    )
    .unwrap();
    let o = coxlab(&["verify", path(&bare)]);
    assert_eq!(o.status.code(), Some(2));
    let o = coxlab(&["verify", path(&bare), "--auto-diagonals", "--radius", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = coxlab(&["verify", path(&fixture("k33.json")), "--auto-diagonals"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn worker_count_does_not_change_output() {
    let f = fixture("example_f.json");
    let seq = coxlab(&["--workers", "1", "verify", path(&f), "--radius", "2"]);
    let par = coxlab(&["--workers", "4", "verify", path(&f), "--radius", "2"]);
    let auto = coxlab(&["verify", path(&f), "--radius", "2"]);
    assert_eq!(seq.stdout, par.stdout);
    assert_eq!(seq.stdout, auto.stdout);
}

#[test]
fn cached_balls_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_coxlab"))
            .args(["verify", path(&fixture("example_f.json")), "--radius", "2"])
            .env("COXLAB_CACHE", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    let cached: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(cached.len(), 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(
        first.stdout,
        coxlab(&["verify", path(&fixture("example_f.json")), "--radius", "2"]).stdout
    );
}

#[test]
fn forced_prints_the_table_and_flags_disagreement() {
    let o = coxlab(&["forced", path(&fixture("example_f.json")), "acabedbfbc", "--k", "5"]);
    let out = stdout(&o);
    assert!(out.contains("d: m=5, preceded-by {aca,b,e,c}"), "{out}");
    assert!(out.contains("k=5: forced"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fast analysis differs at b"));

    let o = coxlab(&["forced", path(&fixture("example_f.json")), "e"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("e: m=1, preceded-by {}"));

    let o = coxlab(&["forced", path(&fixture("example_f.json")), "abd"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fast analysis differs at a: m=3 vs 2"));

    let o = coxlab(&["forced", path(&fixture("square.json")), "acba"]);
    assert!(stderr(&o).contains("not nice"));

    let o = coxlab(&["forced", path(&fixture("square.json")), "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_writes_dot() {
    let o = coxlab(&["export", path(&fixture("square.json")), "--ball", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert_eq!(dot.matches("shape=ellipse").count(), 5);
    assert_eq!(dot.matches("shape=diamond").count(), 3);
    assert!(dot.contains("len=0.5"));

    let o = coxlab(&["export", path(&fixture("pentagon.json")), "--ball", "1"]);
    assert_eq!(stdout(&o).matches("shape=diamond").count(), 0);

    let o = coxlab(&["export", path(&fixture("square.json")), "--ball", "0"]);
    let dot = stdout(&o);
    assert_eq!(dot.matches("shape=ellipse").count(), 1);
    assert_eq!(dot.matches("shape=diamond").count(), 1);

    let o = coxlab(&[
        "export",
        path(&fixture("example_f.json")),
        "--ball",
        "6",
        "--cap-ball",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exported_json_reloads_to_the_same_ball() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ball.json");
    let o = coxlab(&[
        "export",
        path(&fixture("example_f.json")),
        "--ball",
        "3",
        "--format",
        "json",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let ball = coxlab::ConedBall::from_json(&text).unwrap();
    assert_eq!(ball.radius(), 3);
    assert_eq!(ball.to_json(), text);
}
