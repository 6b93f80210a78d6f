use std::process::{Command, Output};

use serde_json::Value;

fn tlchan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlchan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn info_reports_dimensions() {
    let v = json(&tlchan(&[
        "info", "--group", "su2", "--triple", "3,3,2", "--traced", "left",
    ]));
    let r = &v["result"];
    assert_eq!(
        (r["d_A"].as_u64(), r["d_B"].as_u64(), r["d_E"].as_u64()),
        (Some(4), Some(3), Some(4))
    );
    for key in [
        "group",
        "N",
        "triple",
        "traced",
        "operation",
        "result",
        "tolerances",
        "seed",
        "version",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let v = json(&tlchan(&[
        "info", "--group", "onplus:3", "--triple", "1,2,1", "--traced", "right",
    ]));
    assert_eq!(v["result"]["d_A"], 3);
    assert_eq!(v["result"]["d_B"], 8);
    assert_eq!(v["result"]["d_E"], 3);
    assert_eq!(v["N"], 3);
}

#[test]
fn invalid_input_exits_with_one() {
    let out = tlchan(&["info", "--triple", "1,1,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parity"));

    let out = tlchan(&["info", "--triple", "5,1,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle"));

    for args in [
        &["info", "--group", "onplus:1", "--triple", "0,1,1"][..],
        &["info", "--triple", "1,2"],
        &["info"],
        &["frobnicate"],
        &["moe", "--triple", "1,1,2", "--strategy", "random"],
        &["ppt", "--triple", "0,1,1", "--format", "csv"],
    ] {
        assert_eq!(tlchan(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn resource_cap_exits_with_three() {
    let out = tlchan(&[
        "choi",
        "--group",
        "onplus:4",
        "--triple",
        "4,2,2",
        "--max-ambient",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ppt_matches_trivial_coupling() {
    let v = json(&tlchan(&["ppt", "--triple", "0,2,2", "--traced", "right"]));
    assert_eq!(v["result"]["is_ppt"], true);
    let v = json(&tlchan(&["ppt", "--triple", "2,2,2", "--traced", "right"]));
    assert_eq!(v["result"]["is_ppt"], false);
    assert!(v["result"]["witness_det"].as_f64().unwrap() < -1e-10);
}

#[test]
fn witness_moe_is_zero_at_top_weight() {
    let v = json(&tlchan(&[
        "moe", "--group", "onplus:3", "--triple", "3,2,1", "--traced", "right",
    ]));
    assert!(v["result"]["best_entropy"].as_f64().unwrap().abs() <= 1e-8);
    assert_eq!(v["result"]["certified"], true);
}

#[test]
fn bits_flag_rescales_entropies() {
    let args = ["capacity", "--group", "onplus:3", "--triple", "2,1,1"];
    let nats = json(&tlchan(&args));
    let bits = json(&tlchan(&[&args[..], &["--bits"]].concat()));
    let a = nats["result"]["bounds"]["c_upper"].as_f64().unwrap();
    let b = bits["result"]["bounds"]["c_upper"].as_f64().unwrap();
    assert!((a / std::f64::consts::LN_2 - b).abs() < 1e-12);
    assert_eq!(bits["result"]["units"], "bits");
}

#[test]
fn tensor_spectrum_blocks_agree() {
    let args = [
        "tensor-spectrum",
        "--group",
        "onplus:3",
        "--triple",
        "1,1,2",
        "--second",
        "1,2,1",
        "--i",
        "2",
    ];
    let v = json(&tlchan(&args));
    assert!(v["result"]["mismatch"].as_f64().unwrap() <= 1e-8);
    assert_eq!(
        v["result"]["formula"]["entries"].as_array().unwrap().len(),
        v["result"]["bruteforce"]["entries"].as_array().unwrap().len()
    );

    let out = tlchan(&[&args[..], &["--format", "csv"]].concat());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("l,eigenvalue,multiplicity\n"));
    assert!(text.lines().count() > 1);
}

#[test]
fn sampling_output_is_deterministic() {
    let base = [
        "moe",
        "--group",
        "onplus:3",
        "--triple",
        "1,2,1",
        "--strategy",
        "random",
        "--samples",
        "300",
        "--seed",
        "11",
    ];
    let one = tlchan(&[&base[..], &["--threads", "1"]].concat());
    let four = tlchan(&[&base[..], &["--threads", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);

    let haar = ["haar-sep", "--triple", "1,2,1", "--samples", "500", "--seed", "3"];
    assert_eq!(tlchan(&haar).stdout, tlchan(&haar).stdout);
}

#[test]
fn haar_and_degrade_checks() {
    let v = json(&tlchan(&[
        "haar-sep",
        "--triple",
        "1,2,1",
        "--samples",
        "10000",
        "--seed",
        "1",
    ]));
    assert!(v["result"]["distance"].as_f64().unwrap() <= 0.05);
    let v = json(&tlchan(&["degrade-check", "--triple", "3,2,1"]));
    assert_eq!(v["result"]["holds"], true);
    assert_eq!(tlchan(&["degrade-check", "--triple", "1,2,1"]).status.code(), Some(1));
}

#[test]
fn verify_reports_lines_and_skips() {
    let out = tlchan(&["verify", "--suite", "snake"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success());
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["suite"], "snake");
        assert_eq!(v["status"], "pass");
    }

    let out = tlchan(&[
        "verify",
        "--suite",
        "projectors",
        "--group",
        "onplus:3",
        "--max-ambient",
        "10",
    ]);
    assert!(out.status.success());
    let statuses: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            serde_json::from_str::<Value>(l).unwrap()["status"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert!(statuses.iter().any(|s| s == "skipped"));
    assert!(statuses.iter().all(|s| s != "fail"));

    assert_eq!(tlchan(&["verify", "--suite", "nope"]).status.code(), Some(1));
}

#[test]
fn out_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = tlchan(&["choi", "--triple", "2,1,1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["holds"], true);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
