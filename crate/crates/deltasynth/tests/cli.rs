use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("deltasynth-cli-{}-{test}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltasynth")).args(args).env_remove("DELTASYNTH_BUDGET").output().unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn synth_example10_exports_a_winning_machine() {
    let out = scratch("synth");
    let o = run(&["synth", "--game", &data("example10.game"), "--out", out.to_str().unwrap(), "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["verdict"], "Winning");
    assert_eq!(r["classification"], "K2");
    let dot = std::fs::read_to_string(out.join("example10.machine.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    let js: Value = serde_json::from_str(&std::fs::read_to_string(out.join("example10.machine.json")).unwrap()).unwrap();
    assert_eq!(js["states"].as_array().unwrap().len() as u64, r["machine"]["states"].as_u64().unwrap());
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(saved, r);

    // The exported machine verifies on its own.
    let v = run(&["verify", "--game", &data("example10.game"), "--machine", out.join("example10.machine.json").to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
}

#[test]
fn verify_fig2_exits_losing_with_zero_omega() {
    let o = run(&["verify", "--game", &data("example10.game"), "--machine", &data("fig2.machine.json"), "--no-timing"]);
    assert_eq!(o.status.code(), Some(3));
    let r = report(&o);
    assert_eq!(r["verdict"], "Losing");
    assert_eq!(r["witness"], json!({ "prefix": [], "cycle": ["0"] }));
}

#[test]
fn classify_w_full_is_open() {
    let o = run(&["classify", "--game", &data("w_full.game"), "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["classification"], "Lambda1");
    assert_eq!(r["winnerAtEpsilon"], true);
    assert!(r.get("timingMs").is_none());
    let timed = report(&run(&["classify", "--game", &data("w_full.game")]));
    assert!(timed["timingMs"].is_number());
}

#[test]
fn classify_energy_game() {
    let r = report(&run(&["classify", "--game", &data("multienergy_d2.game"), "--no-timing"]));
    assert_eq!(r["energyDim"], 2);
    assert_eq!(r["winnerAtEpsilon"], true);
}

#[test]
fn losing_start_exits_two() {
    let o = run(&["synth", "--game", &data("example10_closed.game"), "--no-timing"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(report(&o)["error"]["kind"], "NoWinningStrategy");
}

#[test]
fn unsupported_condition_exits_four() {
    let dir = scratch("unsupported");
    let mut g: Value = serde_json::from_str(&std::fs::read_to_string(data("multienergy_d2.game")).unwrap()).unwrap();
    let states = g["monitor"]["states"].clone();
    g["condition"] = json!({ "openUnion": [{ "guard": states, "expr": { "energySafe": true } }] });
    let path = dir.join("lambda-energy.game");
    std::fs::write(&path, g.to_string()).unwrap();
    let o = run(&["synth", "--game", path.to_str().unwrap(), "--no-timing"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_and_io_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["synth"]).status.code(), Some(1));
    assert_eq!(run(&["synth", "--game", "/does/not/exist.game"]).status.code(), Some(1));
    assert_eq!(run(&["synth", "--game", &data("example10.game"), "--order", "sideways"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--game", &data("example10.game")]).status.code(), Some(1));
}

#[test]
fn schema_errors_name_the_hole() {
    let dir = scratch("schema");
    let text = std::fs::read_to_string(data("example10.game")).unwrap();
    let mut g: Value = serde_json::from_str(&text).unwrap();
    g["monitor"]["step"]["s1"].as_object_mut().unwrap().remove("0,1");
    let path = dir.join("hole.game");
    std::fs::write(&path, serde_json::to_string_pretty(&g).unwrap()).unwrap();
    let o = run(&["classify", "--game", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("(s1, \"0,1\")"), "{err}");
    assert!(err.contains("line "), "{err}");
}

#[test]
fn budget_comes_from_flag_then_environment() {
    let game = data("example10.game");
    let env_limited = Command::new(env!("CARGO_BIN_EXE_deltasynth"))
        .args(["synth", "--game", &game])
        .env("DELTASYNTH_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(env_limited.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&env_limited.stderr).contains("budget of 1"));
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_deltasynth"))
        .args(["synth", "--game", &game, "--budget", "100000"])
        .env("DELTASYNTH_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(flag_wins.status.code(), Some(0));
}

#[test]
fn dot_and_json_exports_on_stdout() {
    let dot = run(&["synth", "--game", &data("w_full.game"), "--format", "dot"]);
    assert_eq!(dot.status.code(), Some(0));
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.starts_with("digraph machine {"));
    assert!(text.contains("[label=\"0,1\"]"));
    let js = run(&["synth", "--game", &data("w_full.game"), "--format", "json", "--order", "exact"]);
    let v = report(&js);
    assert_eq!(v["states"], json!(["done"]));
}

#[test]
fn simulate_follows_the_adversary_word() {
    let o = run(&[
        "simulate",
        "--game",
        &data("example10.game"),
        "--machine",
        &data("fig3.machine.json"),
        "--beta",
        "0 : 1",
        "--horizon",
        "5",
        "--no-timing",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["trace"]["history"], json!(["0,0", "0,1", "0,1", "0,1", "0,1"]));
    assert_eq!(r["playWins"], true);
    let bad = run(&["simulate", "--game", &data("example10.game"), "--beta", "7 : 0"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn corpus_reports_are_reproducible() {
    let dir = scratch("corpus");
    let manifest = json!({ "entries": [
        { "name": "zeta", "generator": "k3", "count": 6, "maxStates": 4 },
        { "name": "alpha", "game": "example10.game", "expect": { "verdict": "Winning" } },
        { "name": "energy", "generator": "energy", "count": 8, "expect": { "agreement": 8 } },
    ]});
    std::fs::copy(data("example10.game"), dir.join("example10.game")).unwrap();
    let path = dir.join("manifest.json");
    std::fs::write(&path, manifest.to_string()).unwrap();
    let p = path.to_str().unwrap();
    let a = run(&["corpus", "--manifest", p, "--seed", "7", "--no-timing"]);
    let b = run(&["corpus", "--manifest", p, "--seed", "7", "--no-timing", "--jobs", "1"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let names: Vec<Value> = report(&a)["entries"].as_array().unwrap().iter().map(|e| e["name"].clone()).collect();
    assert_eq!(names, vec![json!("alpha"), json!("energy"), json!("zeta")]);
    let c = run(&["corpus", "--manifest", p, "--seed", "8", "--no-timing"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn corpus_failures_are_named() {
    let dir = scratch("corpus-fail");
    std::fs::copy(data("example10.game"), dir.join("example10.game")).unwrap();
    let path = dir.join("manifest.json");
    let manifest = json!({ "entries": [{ "name": "wrong", "game": "example10.game", "expect": { "classification": "K1" } }] });
    std::fs::write(&path, manifest.to_string()).unwrap();
    let o = run(&["corpus", "--manifest", path.to_str().unwrap(), "--no-timing"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("wrong"));
    assert_eq!(report(&o)["summary"]["failed"], json!(["wrong"]));
}

#[test]
fn empty_manifest_is_an_empty_report() {
    let dir = scratch("corpus-empty");
    let path = dir.join("manifest.json");
    std::fs::write(&path, "{\"entries\": []}").unwrap();
    let o = run(&["corpus", "--manifest", path.to_str().unwrap(), "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["summary"]["total"], 0);
}

#[test]
fn bundled_corpus_meets_every_expectation() {
    let o = run(&["corpus", "--seed", "42", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["summary"]["failed"], json!([]));
    let energy = r["entries"].as_array().unwrap().iter().find(|e| e["name"] == "random-energy").unwrap();
    assert_eq!(energy["agreement"], 200);
}

#[test]
fn json_keys_are_sorted() {
    let o = run(&["verify", "--game", &data("example10.game"), "--machine", &data("fig2.machine.json"), "--no-timing"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
}
