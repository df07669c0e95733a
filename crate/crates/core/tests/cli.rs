//! End-to-end tests of the `chc` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn chc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chc")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("chc-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, body: &str) -> String {
        let path = self.0.join(name);
        std::fs::write(&path, body).unwrap();
        path.to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

#[test]
fn infeasible_constraints_exit_2() {
    let s = Scratch::new("check");
    let cs = s.file("c.txt", "0 1 | 2\n0 2 | 1\n");
    let out = chc(&["check", "--constraints", &cs]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
    assert_eq!(json(&out)["feasible"], Value::Bool(false));

    let ok = s.file("ok.txt", "0 1 | 2\n");
    let out = chc(&["check", "--constraints", &ok]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["feasible"], Value::Bool(true));
}

#[test]
fn constrained_sparsest_on_a_path() {
    let s = Scratch::new("crsc");
    let g = s.file("g.txt", "0 1 2\n1 2 1\n");
    let cs = s.file("c.txt", "0 2 | 1\n");
    let out = chc(&["cluster", "--graph", &g, "--constraints", &cs, "--alg", "crsc"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["newick"], "((0,2),1);");
    assert_eq!(v["cost"].as_f64(), Some(9.0));
    assert_eq!(v["violations"].as_u64(), Some(0));
}

#[test]
fn dependency_report() {
    let s = Scratch::new("dep");
    let cs = s.file("c.txt", "0 1 | 2\n0 2 | 4\n");
    let out = chc(&["depmeasure", "--constraints", &cs, "--n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["classes"].as_u64(), Some(2));
    assert_eq!(v["acyclic"], Value::Bool(true));
    let dmc = v["dmc"].as_f64().unwrap();
    let alpha = v["alpha"].as_f64().unwrap();
    assert!((alpha - 2.0 * (1.0 - 2.0 / 10.0) / (3.0 * dmc)).abs() < 1e-12);
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(chc(&["cluster", "--alg", "bogus"]).status.code(), Some(1));
    assert_eq!(chc(&[]).status.code(), Some(1));
    assert_eq!(chc(&["--help"]).status.code(), Some(0));
    let out = chc(&["cluster", "--graph", "/nonexistent/graph.txt", "--alg", "crsc"]);
    assert_eq!(out.status.code(), Some(3));
    let s = Scratch::new("bad");
    let g = s.file("g.txt", "0 1 not-a-weight\n");
    assert_eq!(chc(&["cluster", "--graph", &g, "--alg", "crsc"]).status.code(), Some(3));
}

#[test]
fn seeds_make_runs_reproducible() {
    let s = Scratch::new("seed");
    let g = s.file("g.txt", "0 1 2\n1 2 1\n2 3 4\n3 4 1\n0 4 3\n1 3 2\n");
    let run = |seed: &str| chc(&["cluster", "--graph", &g, "--alg", "rrc", "--trials", "50", "--seed", seed]).stdout;
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn tsv_output() {
    let s = Scratch::new("tsv");
    let g = s.file("g.txt", "0 1 1\n1 2 1\n");
    let out = chc(&["--format", "tsv", "cluster", "--graph", &g, "--alg", "crsc"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "algorithm\tcrsc"));
    assert!(text.lines().all(|l| l.contains('\t')));
}

#[test]
fn cost_of_a_given_tree() {
    let s = Scratch::new("cost");
    let g = s.file("g.txt", "0 1 1\n1 2 1\n");
    let t = s.file("t.nwk", "((0,1),2);\n");
    let out = chc(&["cost", "--graph", &g, "--tree", &t]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"].as_f64(), Some(5.0));
}

#[test]
fn zoo_without_constraints_changes_nothing() {
    let s = Scratch::new("zoo");
    let empty = s.file("empty.txt", "");
    let out = chc(&["zoo", "--constraints", &empty, "--limit", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["improvement_pct"].as_f64(), Some(0.0));
    assert_eq!(v["unconstrained_noisy_cost"], v["constrained_noisy_cost"]);
}
