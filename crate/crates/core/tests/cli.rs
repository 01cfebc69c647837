use std::process::{Command, Output};

fn rlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlab")).args(args).env_remove("RLAB_FUEL_CAP").output().expect("run rlab")
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn eval_exit_codes() {
    let ok = rlab(&["eval", "(succ)", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json_lines(&ok)[0]["value"], 5);

    let bad = rlab(&["eval", "(comp (succ) (proj 1 1)", "4"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("offset"));

    let div = rlab(&["eval", "(mu (comp (succ) (proj 2 1)))", "0", "--fuel", "100"]);
    assert_eq!(div.status.code(), Some(2));
    assert_eq!(json_lines(&div)[0]["outcome"], "out_of_fuel");
}

#[test]
fn eval_by_index_with_oracle() {
    let out = rlab(&["eval", "1", "41"]);
    assert_eq!(json_lines(&out)[0]["value"], 42);
    let q = rlab(&["eval", "(oracle)", "3", "--oracle", "1,3"]);
    let v = &json_lines(&q)[0];
    assert_eq!((v["value"].as_u64(), v["use"].as_u64()), (Some(1), Some(4)));
}

#[test]
fn fuel_cap_applies() {
    let out = Command::new(env!("CARGO_BIN_EXE_rlab"))
        .args(["eval", "(comp (succ) (comp (succ) (succ)))", "0", "--fuel", "100"])
        .env("RLAB_FUEL_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enum_lists_stage() {
    let div = rlab(&["enum", "22", "--stage", "50"]);
    assert_eq!(json_lines(&div)[0]["elements"], serde_json::json!([]));
    let small = json_lines(&rlab(&["enum", "1", "--stage", "5"]));
    assert_eq!(small[0]["elements"], serde_json::json!([0, 1, 2, 3, 4]));
    let later = json_lines(&rlab(&["enum", "1", "--stage", "9"]));
    let a: Vec<u64> = small[0]["elements"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    let b: Vec<u64> = later[0]["elements"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert!(a.iter().all(|x| b.contains(x)));
}

#[test]
fn construct_is_reproducible() {
    for args in [
        vec!["construct", "fm", "--stages", "1000", "--max-req", "4"],
        vec!["construct", "ijd", "--i", "1", "--j", "2", "--stages", "1000"],
        vec!["construct", "dnotnd", "--stages", "500"],
        vec!["construct", "fm-reordered", "--schedule", "2,3", "--stages", "300"],
        vec!["construct", "post-simple", "--stages", "300"],
        vec!["construct", "simple-dweu", "--stages", "300"],
    ] {
        let a = rlab(&args);
        let b = rlab(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let lines = json_lines(&a);
        assert!(lines.last().unwrap().get("final").is_some());
    }
}

#[test]
fn construct_writes_file() {
    let dir = std::env::temp_dir().join(format!("rlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fm.jsonl");
    let out = rlab(&["construct", "fm", "--stages", "200", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l.contains("\"watched\"")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_invocations_exit_1() {
    assert_eq!(rlab(&["construct", "nope"]).status.code(), Some(1));
    assert_eq!(rlab(&["construct", "ijd", "--i", "3", "--j", "2"]).status.code(), Some(1));
    assert_eq!(rlab(&["construct", "fm", "--stages", "x"]).status.code(), Some(1));
    assert_eq!(rlab(&["verify", "everything"]).status.code(), Some(1));
}

#[test]
fn verify_lambda_and_priority() {
    for suite in ["lambda", "priority"] {
        let out = rlab(&["verify", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        let lines = json_lines(&out);
        assert!(!lines.is_empty());
        for l in &lines {
            for key in ["contract", "instance", "stage", "verdict"] {
                assert!(l.get(key).is_some());
            }
            assert_ne!(l["verdict"], "fail");
        }
    }
}
