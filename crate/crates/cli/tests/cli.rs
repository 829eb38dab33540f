use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcb"))
}

fn cartan(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/cartan")
        .join(name);
    p.to_str().unwrap().to_owned()
}

#[test]
fn negative_weight_is_a_config_error() {
    let out = bin()
        .args(["build-module", "--cartan", &cartan("a2.json")])
        .args(["--weights", "-1,0", "--depth", "2,2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("coordinate -1"), "stderr: {err}");
}

#[test]
fn oversized_depth_is_a_depth_error() {
    let out = bin()
        .args(["build-module", "--cartan", &cartan("a2.json")])
        .args(["--weights", "1,0", "--depth", "9,9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn missing_cartan_file_is_a_config_error() {
    let out = bin()
        .args(["gram", "--cartan", "/no/such/file.json"])
        .args(["--weights", "1", "--depth", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn theta_output_is_byte_deterministic() {
    let run = || {
        let out = bin()
            .args(["theta", "--cartan", &cartan("a1.json"), "--max-degree", "2"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert!(v.get("conventions").is_some());
    assert_eq!(v["components"].as_array().unwrap().len(), 3);
}

#[test]
fn transition_csv_contains_the_off_diagonal_entry() {
    let out = bin()
        .args(["transition", "--cartan", &cartan("a1.json")])
        .args(["--weights", "1;1", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "1,1,0,v^-1"), "csv: {text}");
}

#[test]
fn ybe_passes_on_the_a1_fundamental_cube() {
    let out = bin()
        .args(["ybe", "--cartan", &cartan("a1.json"), "--weights", "1;1;1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], serde_json::Value::Bool(true));
    assert_eq!(v["dim"], serde_json::json!(8));
}
