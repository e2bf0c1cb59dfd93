use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_qtoroidal")).args(args).output().expect("spawn");
    let code = out.status.code().expect("exit code");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

#[test]
fn axioms_envelope() {
    let (code, v) = run(&["verify-axioms", "--samples", "40"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "report_v1");
    assert_eq!(v["command"], "verify-axioms");
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["checks_failed"], 0);
}

#[test]
fn corrupted_cocycle_fails() {
    let (code, v) = run(&["verify-axioms", "--samples", "200", "--corrupt-cocycle"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
}

#[test]
fn hwv_reports_eta() {
    let (code, v) = run(&["hwv", "--pair", "gl", "--n", "2", "--m", "1", "--mu", "1,-1", "--a-max", "2", "--b-max", "2"]);
    assert_eq!(code, 0);
    assert!(!v["report"]["eta"].as_array().unwrap().is_empty());
    assert_eq!(v["report"]["verification"]["passed"], true);
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(run(&["hwv", "--mu", "GL2:[0,1]"]).0, 2);
    assert_eq!(run(&["lemma", "--id", "nope"]).0, 2);
    assert_eq!(run(&["decompose", "--q-mode", "symbolic"]).0, 2);
    assert_eq!(run(&["decompose", "--pair", "sp-so", "--flavor", "int"]).0, 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let path = std::env::temp_dir().join(format!("qtoroidal-cli-{}.conf", std::process::id()));
    std::fs::write(&path, "# small window\npair = so-sp\nn = 2\nmax_energy = 1\nflavor = int\n").unwrap();
    let (code, v) = run(&["decompose", "--config", path.to_str().unwrap(), "--flavor", "half"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    assert_eq!(v["config"]["pair"], "so-sp");
    assert_eq!(v["config"]["n"], 2);
    assert_eq!(v["config"]["flavor"], "half");
    assert_eq!(v["config"]["q_mode"], "rational(s0=2)");
    assert_eq!(v["report"]["passed"], true);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("qtoroidal-cli-{}.json", std::process::id()));
    let (code, v) = run(&["eta", "--pair", "sp-so", "--n", "1", "--mu", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v, Value::Null);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "eta");
}
