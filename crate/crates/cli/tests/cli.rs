use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mdpsynth::evaluation::md_value;
use mdpsynth::mdp::json::{mdp_from_json, mdp_to_json, strategy_from_json};
use mdpsynth::{Objective, StatePredicate};
use serde_json::Value;

const MDP: &str = r#"{
  "states": [
    {"id": "s", "kind": "controller", "color": 0},
    {"id": "a", "kind": "random", "color": 0},
    {"id": "b", "kind": "random", "color": 0},
    {"id": "g", "kind": "controller", "color": 0},
    {"id": "l", "kind": "controller", "color": 1}
  ],
  "transitions": [
    {"from": "s", "to": "a"}, {"from": "s", "to": "b"},
    {"from": "a", "to": "g", "prob": "1/2"}, {"from": "a", "to": "l", "prob": "1/2"},
    {"from": "b", "to": "s", "prob": "1/4"}, {"from": "b", "to": "g", "prob": "1/2"},
    {"from": "b", "to": "l", "prob": "1/4"},
    {"from": "g", "to": "g"}, {"from": "l", "to": "l"}
  ],
  "initial": "s"
}"#;

fn mdpsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdpsynth"))
        .args(args)
        .env_remove("MDPSYNTH_SEED")
        .env_remove("MDPSYNTH_BACKEND")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gallery_list_names_every_builder() {
    let o = mdpsynth(&["gallery", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = stdout(&o).lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    assert_eq!(names, ["fig2a", "fig2b", "fig3a", "fig3b", "fig4", "gamblers_ruin"]);
    let j = json(&mdpsynth(&["gallery", "list", "--format", "json"]));
    assert_eq!(j["schema"], 1);
    assert_eq!(j["entries"].as_array().unwrap().len(), 6);
}

#[test]
fn usage_errors_exit_two() {
    let o = mdpsynth(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(mdpsynth(&["gallery", "export", "--name", "fig2a"]).status.code(), Some(2));
    assert_eq!(mdpsynth(&["accept", "--suite", "0"]).status.code(), Some(2));
    assert_eq!(mdpsynth(&["--tolerance", "0", "gallery", "list"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let d = Dir::new();
    let m = d.file("m.json", MDP);
    let o = mdpsynth(&["value", "--mdp", s(&m), "--objective", "reach", "--target", "nowhere"]);
    assert_eq!(o.status.code(), Some(1));
    let bad = d.file("bad.json", "{\"states\": [");
    assert_eq!(mdpsynth(&["value", "--mdp", s(&bad), "--objective", "parity"]).status.code(), Some(1));
    let o = mdpsynth(&["--format", "json", "value", "--mdp", s(&m), "--objective", "buchi"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["exit"], 1);
}

#[test]
fn values_are_exact_rationals() {
    let d = Dir::new();
    let m = d.file("m.json", MDP);
    let j = json(&mdpsynth(&["--format", "json", "value", "--mdp", s(&m), "--objective", "safety", "--avoid", "l"]));
    assert_eq!(j["values"]["s"], "2/3");
    assert_eq!(j["values"]["a"], "1/2");
    assert_eq!(j["backend"], "exact");
    let j = json(&mdpsynth(&[
        "--format",
        "json",
        "--backend",
        "float",
        "value",
        "--mdp",
        s(&m),
        "--objective",
        "reach",
        "--target",
        "g",
    ]));
    let v: f64 = j["values"]["s"].as_str().unwrap().parse().unwrap();
    assert!((v - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn synthesized_strategy_evaluates_to_its_guarantee() {
    let d = Dir::new();
    let m = d.file("m.json", MDP);
    let out = d.path("sigma.json");
    let o = mdpsynth(&["synthesize", "--mdp", s(&m), "--objective", "safety", "--avoid", "l", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let raw: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(raw["schema"], 1);
    assert_eq!(raw["choice"]["s"], "b");
    let (sigma, guarantee) = strategy_from_json(&text).unwrap();

    let j = json(&mdpsynth(&[
        "--format",
        "json",
        "evaluate",
        "--mdp",
        s(&m),
        "--strategy",
        s(&out),
        "--objective",
        "safety",
        "--avoid",
        "l",
    ]));
    let finite = mdp_from_json(MDP).unwrap();
    let direct = md_value(&finite, &sigma, &Objective::Safety(StatePredicate::states(["l"]))).unwrap();
    for i in 0..finite.len() {
        let id = finite.id(i).to_string();
        assert_eq!(j["values"][&id], direct.text(i));
        assert_eq!(j["values"][&id].as_str().unwrap(), mdpsynth::rational::format(&guarantee[finite.id(i)]));
    }
}

#[test]
fn cobuchi_synthesis_reports_its_constants() {
    let d = Dir::new();
    let m = d.file("m.json", MDP);
    let j =
        json(&mdpsynth(&["--format", "json", "synthesize", "--mdp", s(&m), "--objective", "cobuchi", "--eps", "0.3"]));
    assert_eq!(j["constants"]["eps1"], "1/20");
    assert_eq!(j["constants"]["k"], "20/3");
    assert_eq!(j["guarantee"]["s"], "2/3");
}

#[test]
fn json_export_round_trips() {
    let d = Dir::new();
    let m = d.file("m.json", MDP);
    let out = d.path("copy.json");
    let o = mdpsynth(&["export", "--mdp", s(&m), "--format", "json", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let back = mdp_from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(mdp_to_json(&back), mdp_to_json(&mdp_from_json(MDP).unwrap()));
}

#[test]
fn dot_export_of_a_truncation() {
    let o = mdpsynth(&["gallery", "export", "--name", "fig2a", "--radius", "3", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    let nodes: Vec<&str> = dot.lines().filter(|l| l.contains("shape=") && !l.contains("#sink")).collect();
    assert_eq!(nodes.len(), 8);
    assert_eq!(nodes.iter().filter(|l| l.contains("shape=box")).count(), 5);
    assert!(dot.contains("label=\"1/2\""));
}

#[test]
fn simulation_is_deterministic_and_seed_layered() {
    let args = ["--format", "json", "simulate", "--gallery", "fig2a", "--strategy", "sigma_h", "--episodes", "500"];
    let a = mdpsynth(&args);
    let b = mdpsynth(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 42);

    let from_env = Command::new(env!("CARGO_BIN_EXE_mdpsynth")).args(args).env("MDPSYNTH_SEED", "7").output().unwrap();
    assert_eq!(json(&from_env)["seed"], 7);
    let mut with_flag = args.to_vec();
    with_flag.extend(["--seed", "9"]);
    let flagged =
        Command::new(env!("CARGO_BIN_EXE_mdpsynth")).args(&with_flag).env("MDPSYNTH_SEED", "7").output().unwrap();
    assert_eq!(json(&flagged)["seed"], 9);

    let d = Dir::new();
    let cfg = d.file("c.toml", "seed = 11\nbackend = \"rational\"\n");
    let mut with_cfg = args.to_vec();
    with_cfg.extend(["--config", s(&cfg)]);
    assert_eq!(json(&mdpsynth(&with_cfg))["seed"], 11);
}

#[test]
fn gallery_strategies_and_transducers() {
    let j = json(&mdpsynth(&["--format", "json", "evaluate", "--gallery", "fig2a", "--strategy", "sigma_h"]));
    assert_eq!(j["limit"], "2");

    let d = Dir::new();
    let t = d.file(
        "t.json",
        r#"{"modes": ["m"], "initial": "m", "choice": [{"mode": "m", "state": "s:0", "to": {"r:0": "1"}}]}"#,
    );
    let j = json(&mdpsynth(&["--format", "json", "futility", "--gallery", "fig2a", "--transducer", s(&t)]));
    assert_eq!(j["c"], "1");
    let o = mdpsynth(&["simulate", "--gallery", "fig2a", "--transducer", s(&t), "--episodes", "50", "--horizon", "40"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("aborted 0"));
}

#[test]
fn truncation_bounds_bracket() {
    let j = json(&mdpsynth(&["--format", "json", "truncate", "--gallery", "fig4", "--radius", "8"]));
    for (_, b) in j["bounds"].as_object().unwrap() {
        assert!(b["gap"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn acceptance_exit_status_tracks_failures() {
    let o = mdpsynth(&["accept", "--suite", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS criterion 10"));
    let o = mdpsynth(&["accept", "--suite", "11"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL criterion 11"));
}
