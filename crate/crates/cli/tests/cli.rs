use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", &format!("{name}.json")].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_equilibra")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(text.trim()).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

#[test]
fn nego_iterate_sans_spe_ends_in_infinity() {
    let (code, v) = run(&["nego-iterate", &corpus("sans_spe"), "--max", "8"]);
    assert_eq!(code, 0);
    let seq = v["payload"]["sequence"].as_array().unwrap();
    assert_eq!(seq.last().unwrap()["a"], "+inf");
    assert_eq!(seq[1]["a"], "1/1");
}

#[test]
fn xrse_exists_drops_one_fixed_edge() {
    let (code, v) = run(&["xrse-exists", &corpus("ex_extreme1"), "--pessimists", "all"]);
    assert_eq!(code, 0);
    assert_eq!(v["answer"], "yes");
    let f: Vec<&str> = v["payload"]["F"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(f.len(), 3);
    assert!(!f.contains(&"a->t1") || !f.contains(&"b->t2"));
}

#[test]
fn garbage_exits_with_two() {
    let dir = std::env::temp_dir().join("equilibra-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("garbage.json");
    std::fs::write(&path, "{\"players\": [").unwrap();
    let (code, v) = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["answer"], "error");
    assert_eq!(v["diagnostics"][0]["severity"], "error");
}

#[test]
fn usage_error_exits_with_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_equilibra")).args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn negative_answers_exit_zero() {
    let (code, v) = run(&["ne-check", &corpus("fig_ne_spe"), "--lasso", "a (b)"]);
    assert_eq!((code, v["answer"].as_str()), (0, Some("no")));
    let (code, v) = run(&["spe-exists", &corpus("not_stationary")]);
    assert_eq!((code, v["answer"].as_str()), (0, Some("unknown")));
}

#[test]
fn spe_witness_round_trip() {
    let (_, v) = run(&["spe-exists", &corpus("inf_spe"), "--lower", "circle=1,square=1", "--upper", "circle=1,square=1"]);
    assert_eq!(v["answer"], "yes");
    let dir = std::env::temp_dir().join("equilibra-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("inf_spe_witness.json");
    std::fs::write(&path, v["payload"].to_string()).unwrap();
    let (code, w) = run(&["spe-check-witness", &corpus("inf_spe"), path.to_str().unwrap()]);
    assert_eq!((code, w["answer"].as_str()), (0, Some("yes")));
}

#[test]
fn verification_commands() {
    let g = corpus("fig_first_example");
    let m = corpus("fig_ex_1player_machine");
    let (_, v) = run(&["product", &g, &m]);
    assert_eq!(v["payload"]["vertices"], 10);
    let (_, v) = run(&["rational-verify", &g, &m, "--t", "9/10", "--concept", "spe"]);
    assert_eq!(v["answer"], "yes");
    let (_, v) = run(&["eps-min", &corpus("sans_spe")]);
    assert_eq!(v["payload"]["eps"], "1/1");
    let (_, v) = run(&["achaotic-verify", &corpus("chaos"), &corpus("chaos_leader_machine"), "--t", "-1/2"]);
    assert_eq!(v["answer"], "yes");
}

#[test]
fn pretty_and_json_agree() {
    let args = ["validate", &corpus("lottery")];
    let (_, a) = run(&args);
    let out = Command::new(env!("CARGO_BIN_EXE_equilibra")).args(args).arg("--format").arg("pretty").output().unwrap();
    let b: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(a, b);
}

#[test]
fn output_is_byte_stable() {
    let args = ["xrse-constrained", "ex_extreme1", "--lower", "circle=2,square=2", "--upper", "circle=2,square=2"];
    let a = Command::new(env!("CARGO_BIN_EXE_equilibra")).args(args).output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_equilibra")).args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}
