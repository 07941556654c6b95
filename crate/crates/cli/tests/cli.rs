use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meroconvex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "not JSON ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (out.status.code().unwrap(), v)
}

const KEYS: [&str; 7] = [
    "command",
    "inputs",
    "verdict",
    "details",
    "tolerances",
    "wall_time_ms",
    "version",
];

fn assert_schema(v: &Value, command: &str) {
    let obj = v.as_object().expect("object");
    for k in KEYS {
        assert!(obj.contains_key(k), "missing `{k}` in {v}");
    }
    let allowed: Vec<&str> = KEYS.iter().copied().chain(["order_estimate"]).collect();
    for k in obj.keys() {
        assert!(allowed.contains(&k.as_str()), "unexpected key `{k}`");
    }
    assert_eq!(v["command"], command);
    assert!(v["inputs"].is_object());
    assert!(v["tolerances"].is_object());
    assert!(v["wall_time_ms"].as_f64().unwrap() >= 0.0);
    assert!(v["version"].is_string());
    let verdict = &v["verdict"];
    assert!(verdict["holds"].is_boolean());
    assert!(verdict["margin"].is_null() || verdict["margin"].is_number());
    let w = &verdict["witness"];
    if !w.is_null() {
        for k in ["re", "im", "value"] {
            assert!(w[k].is_number(), "witness.{k} in {v}");
        }
    }
    if let Some(o) = obj.get("order_estimate") {
        let o = o.as_f64().unwrap();
        assert!((0.0..=1.0).contains(&o));
    }
}

fn without_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn classify_quarter_plus_inverse() {
    let (code, v) = run_json(&["classify", "--expr", "z/4 + 1/z", "--family", "bc", "--alpha", "0.5"]);
    assert_eq!(code, 0);
    assert_schema(&v, "classify");
    assert!(v["verdict"]["holds"].as_bool().unwrap());
    assert!((v["order_estimate"].as_f64().unwrap() - 0.6).abs() < 1e-3);
}

#[test]
fn classify_koebe_not_convex() {
    let (code, v) = run_json(&["classify", "--expr", "z/(1-z)^2", "--family", "c", "--alpha", "0"]);
    assert_eq!(code, 1);
    assert_schema(&v, "classify");
    assert!(!v["verdict"]["holds"].as_bool().unwrap());
    assert!(v["verdict"]["witness"]["value"].as_f64().unwrap() < 0.0);
}

#[test]
fn radius_at_zero_text() {
    let out = run(&["radius", "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0.267949"), "{text}");
}

#[test]
fn radius_with_extremal_map() {
    let (code, v) = run_json(&[
        "radius",
        "--alpha",
        "0",
        "--expr",
        "z + 1/z - 2",
        "--rings",
        "32",
        "--points",
        "256",
    ]);
    assert_eq!(code, 0);
    assert_schema(&v, "radius");
    let r = v["details"]["radius"]["r_alpha"].as_f64().unwrap();
    assert!((r - (2.0 - 3f64.sqrt())).abs() <= 1e-12);
    assert!(v["details"]["outside"]["violates"].as_bool().unwrap());
}

#[test]
fn every_subcommand_has_json() {
    let cases: Vec<(&str, Vec<&str>, i32)> = vec![
        (
            "order",
            vec![
                "order",
                "--catalog",
                "power-family",
                "--family",
                "bci",
                "--rings",
                "16",
                "--points",
                "128",
            ],
            0,
        ),
        (
            "schwarzian",
            vec![
                "schwarzian",
                "--catalog",
                "scaled-cot",
                "--param",
                "0.25",
                "--samples",
                "4",
            ],
            0,
        ),
        (
            "schwarzian",
            vec!["schwarzian", "--expr", "z/(1-z)^2", "--at", "0.3+0.2i", "--at", "-0.5"],
            0,
        ),
        (
            "norm",
            vec!["norm", "--catalog", "koebe", "--rings", "16", "--points", "128"],
            0,
        ),
        ("palpha", vec!["palpha", "--q-const", "0", "--alpha", "1"], 0),
        ("palpha", vec!["palpha", "--q-const", "4", "--alpha", "0"], 1),
        ("const-q", vec!["const-q", "--alpha", "0.5"], 0),
        ("radius", vec!["radius", "--alpha", "0.5"], 0),
        (
            "factor-check",
            vec![
                "factor-check",
                "--catalog",
                "scaled-cot",
                "--param",
                "0",
                "--alpha",
                "0",
                "--rays",
                "8",
                "--rings",
                "16",
                "--points",
                "128",
            ],
            0,
        ),
        (
            "theorem",
            vec![
                "theorem",
                "--id",
                "duality",
                "--catalog",
                "neg-inv-log",
                "--alpha",
                "0.5",
                "--rings",
                "16",
                "--points",
                "128",
            ],
            0,
        ),
        (
            "theorem",
            vec![
                "theorem",
                "--id",
                "proper-containment",
                "--alpha",
                "0",
                "--rings",
                "16",
                "--points",
                "128",
            ],
            0,
        ),
        ("sharpness", vec!["sharpness", "--n", "20", "--beta", "0.4"], 1),
        ("catalog", vec!["catalog"], 0),
    ];
    for (cmd, args, expected) in cases {
        let (code, v) = run_json(&args);
        assert_eq!(code, expected, "{args:?}: {v}");
        assert_schema(&v, cmd);
    }
}

#[test]
fn theorem_sufficiency_with_weight() {
    let (code, v) = run_json(&[
        "theorem",
        "--id",
        "sufficiency",
        "--catalog",
        "scaled-cot",
        "--param",
        "0.5",
        "--alpha",
        "0.5",
        "--q",
        "(1/pi)/(1 + x^2)",
        "--rings",
        "16",
        "--points",
        "128",
    ]);
    assert_eq!(code, 0, "{v}");
    let rep = &v["details"][0];
    assert_eq!(rep["theorem_id"], "sufficiency");
    assert!(rep["consistent"].as_bool().unwrap());
}

#[test]
fn catalog_json_lists_entries() {
    let (_, v) = run_json(&["catalog"]);
    let entries = v["details"].as_array().unwrap();
    assert!(entries.len() >= 8);
    for e in entries {
        assert!(e["name"].is_string() && e["expr"].is_string());
        assert!(e["params"].is_object() && e["expected"].is_array());
    }
}

#[test]
fn reruns_are_identical() {
    let args = [
        "classify",
        "--catalog",
        "neg-inv-log",
        "--family",
        "bci",
        "--alpha",
        "0.5",
        "--seed",
        "7",
    ];
    let (_, a) = run_json(&args);
    let (_, b) = run_json(&args);
    assert_eq!(without_time(a), without_time(b));
    let args = ["schwarzian", "--catalog", "koebe", "--seed", "3"];
    let (_, a) = run_json(&args);
    let (_, b) = run_json(&args);
    assert_eq!(without_time(a), without_time(b));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = [
        "classify",
        "--expr",
        "z/4 + 1/z",
        "--family",
        "bc",
        "--alpha",
        "0.5",
        "--json",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_meroconvex"))
        .args(args)
        .env("GFT_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_meroconvex"))
        .args(args)
        .env("GFT_THREADS", "4")
        .output()
        .unwrap();
    let a: Value = serde_json::from_slice(&one.stdout).unwrap();
    let b: Value = serde_json::from_slice(&many.stdout).unwrap();
    assert_eq!(without_time(a), without_time(b));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["classify", "--family", "c", "--alpha", "0"],
        vec!["classify", "--expr", "z+", "--family", "c", "--alpha", "0"],
        vec!["classify", "--expr", "z", "--family", "nope", "--alpha", "0"],
        vec!["frobnicate"],
        vec!["radius", "--alpha", "1.5"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_meroconvex"))
        .args(["catalog"])
        .env("GFT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
