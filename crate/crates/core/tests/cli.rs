use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarsequot")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn analyze_tree_and_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write(dir.path(), "tree.txt", "0 1\n1 2\n1 3\n3 4\n");
    let out = bin(&["analyze", &tree]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["schema"], "coarsequot/1");
    assert_eq!(doc["delta"], 0);
    let c6 = write(dir.path(), "c6.txt", "0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n");
    let doc = json(&bin(&["analyze", &c6]));
    // the triangle 0-2-4 has sides of length 2; midpoints are 1 from the other sides
    assert_eq!(doc["delta"], 1);
    assert_eq!(doc["delta_exact"], true);
}

#[test]
fn analyze_with_family_runs_the_lemma_suite() {
    let dir = tempfile::tempdir().unwrap();
    let edges: String = (0..12).map(|i| format!("{i} {}\n", (i + 1) % 12)).collect();
    let g = write(dir.path(), "c12.txt", &edges);
    let fam = write(dir.path(), "fam.json", "[[0,1,2],[6,7,8]]");
    let out = bin(&["analyze", &g, "--family", &fam]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["lemmas"]["pass"], true);
}

#[test]
fn malformed_input_exits_two_with_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "0 1\n1 2\nfoo bar\n");
    let out = bin(&["analyze", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = bin(&["analyze", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constants_worked_base() {
    let out = bin(&["constants", "--l", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["tau"]["tau"], "46");
    assert_eq!(doc["ledger"]["derived"]["C"], "44");
    let md = bin(&["constants", "--markdown"]);
    assert!(String::from_utf8_lossy(&md.stdout).contains('|'));
}

#[test]
fn quotient_pass_fail_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.json", r#"{"ball_radius": 4, "seeds": [3, 1], "triangles": 5}"#);
    let out_dir = dir.path().join("ok");
    let out = bin(&["--config", &ok, "--out", out_dir.to_str().unwrap(), "quotient"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r1 = out_dir.join("quotient-seed1.json");
    let r3 = out_dir.join("quotient-seed3.json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&r3).unwrap()).unwrap();
    assert_eq!(doc["schema"], "coarsequot/1");
    assert_eq!(doc["pass"], true);
    // rows come out sorted by seed whatever the argument order
    let plot = bin(&["plot-data", r3.to_str().unwrap(), r1.to_str().unwrap()]);
    let text = String::from_utf8(plot.stdout).unwrap();
    let seeds: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(seeds, ["1", "3"]);

    let high = write(dir.path(), "high.json", r#"{"ball_radius": 4, "seeds": [3], "spinning_l": "1000"}"#);
    let out = bin(&["--config", &high, "quotient"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verify_spinning"));

    let unknown = write(dir.path(), "unknown.json", r#"{"bogus": 1}"#);
    assert_eq!(bin(&["--config", &unknown, "quotient"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"ball_radius": 4, "seeds": [5], "triangles": 5}"#);
    let a = bin(&["--config", &cfg, "quotient"]).stdout;
    let b = bin(&["--config", &cfg, "quotient"]).stdout;
    assert_eq!(a, b);
    let w1 = bin(&["--seed", "9", "walk", "--n", "200", "--trials", "20"]).stdout;
    let w2 = bin(&["--seed", "9", "walk", "--n", "200", "--trials", "20"]).stdout;
    assert_eq!(w1, w2);
}

#[test]
fn hhs_verify_free_product() {
    let out = bin(&["hhs-verify", "--builtin", "free_product", "--presentation", "F2", "--radius", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["domains"], 19);
    assert_eq!(doc["axioms"]["pass"], true);
}
