use serde_json::Value;
use std::process::Command;

fn masure(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_masure")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    let v = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v, stderr)
}

#[test]
fn tree_distance() {
    let (rc, v, _) = masure(&[
        "--preset", "a1", "distance",
        "--from", r#"{"w":[[0,0,1]],"b":[-1]}"#,
        "--to", r#"{"b":[-1]}"#,
        "--theta", r#"{"norm":"l1","germ":"+e"}"#,
    ]);
    assert_eq!(rc, 0);
    assert_eq!(v["result"]["value"], "2");
    assert_eq!(v["config"]["preset"], "a1");
    assert!(v["version"].is_string());
}

#[test]
fn mixed_distance_sums_signs() {
    let (rc, v, _) = masure(&[
        "distance",
        "--from", r#"{"w":[[0,0,1]],"b":[-1]}"#,
        "--to", r#"{"b":[-1]}"#,
        "--xi", r#"[{"germ":"+e"},{"germ":"-e"}]"#,
    ]);
    assert_eq!(rc, 0);
    assert_eq!(v["result"]["plus"]["value"], "2");
    assert_eq!(v["result"]["minus"]["value"], "2");
    assert_eq!(v["result"]["value"], "4");
}

#[test]
fn output_is_deterministic() {
    let args = ["--preset", "hyp23", "probe-equivalence", "--theta1", r#"{"germ":"+e"}"#, "--theta2", r#"{"germ":"+s1"}"#, "--samples", "5", "--seed", "3"];
    let (_, a, _) = masure(&args);
    let (_, b, _) = masure(&args);
    assert_eq!(a, b);
    assert_eq!(a["result"]["ok"], true);
}

#[test]
fn a1_is_discrete() {
    let (rc, v, _) = masure(&["--preset", "a1", "probe-discreteness"]);
    assert_eq!(rc, 0);
    assert_eq!(v["result"]["discrete"], true);
    assert_eq!(v["result"]["min_spacing"], "1");
}

#[test]
fn hyp23_separation_sequence() {
    let (rc, v, _) = masure(&["--preset", "hyp23", "probe-separation", "--n", "3"]);
    assert_eq!(rc, 0);
    let steps = v["result"]["steps"].as_array().unwrap();
    let d: Vec<&str> = steps.iter().map(|s| s["d_plus"].as_str().unwrap()).collect();
    assert_eq!(d, ["2", "2/3", "1/4"]);
}

#[test]
fn upath_increment() {
    let (rc, v, _) = masure(&["--preset", "a1", "probe-upath", "--point", r#"{"w":[[0,0,1]],"b":[-2]}"#, "--u", "[3]"]);
    assert_eq!(rc, 0);
    assert_eq!(v["result"]["u_path"], true);
    assert_eq!(v["result"]["increment_ok"], true);
}

#[test]
fn toml_config_file() {
    let dir = std::env::temp_dir().join(format!("masure-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "preset = \"affine-a1\"\nheight = 12\nnorm = \"linf\"\n").unwrap();
    let (rc, v, _) = masure(&["--config", cfg.to_str().unwrap(), "retract", "--point", r#"{"b":[1,0,0]}"#]);
    assert_eq!(rc, 0);
    assert_eq!(v["config"]["preset"], "affine-a1");
    assert_eq!(v["config"]["height"], 12);
    assert_eq!(v["config"]["norm"], "linf");
    assert_eq!(v["result"]["image"], serde_json::json!(["1", "0", "0"]));
}

#[test]
fn errors_are_structured() {
    let (rc, _, err) = masure(&["--preset", "a1", "--thickness", "1", "retract", "--point", r#"{"b":[0]}"#]);
    assert_eq!(rc, 2);
    let e: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(e["error"]["kind"], "ConfigInvalid");

    let (rc, _, err) = masure(&["--preset", "a1", "distance", "--from", r#"{"w":[[0,0,1],[1,0,1]],"b":[0]}"#, "--to", r#"{"b":[0]}"#]);
    assert_eq!(rc, 2);
    let e: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(e["error"]["kind"], "MasureError");
}

#[test]
fn saved_masure_round_trip() {
    let dir = std::env::temp_dir().join(format!("masure-cli-save-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("m.json");
    let f = file.to_str().unwrap();
    let (rc, _, _) = masure(&["--preset", "hyp23", "--save-masure", f, "retract", "--point", r#"{"w":[[0,-1,1]],"b":[1,0]}"#, "--germ", "-e"]);
    assert_eq!(rc, 0);
    let (rc, v, _) = masure(&["--masure", f, "retract", "--point", r#"{"w":[[0,-1,1]],"b":[1,0]}"#, "--germ", "-e"]);
    assert_eq!(rc, 0);
    assert_eq!(v["config"]["matrix"], serde_json::json!([[2, -3], [-3, 2]]));
    assert_eq!(v["config"]["apartments"], serde_json::json!([[[0, -1, 1]]]));
}
