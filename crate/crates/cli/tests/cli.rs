use serde_json::{json, Value};

fn run(args: &[&str], input: &str) -> (i32, String, String) {
    let mut argv = vec!["dpforms"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dpforms_cli::run(argv, &mut input.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str], input: Value) -> Value {
    let (code, out, err) = run(args, &input.to_string());
    assert_eq!(code, 0, "{args:?} failed: {err}");
    serde_json::from_str(&out).unwrap()
}

fn one(dim: usize) -> Value {
    json!({ "n": dim, "terms": [{ "exps": vec![0; dim + 1], "coef": "1" }] })
}

fn dx1() -> Value {
    json!({ "dim": 1, "terms": [{ "dxs": [1], "poly": one(1) }] })
}

fn identity_path() -> Value {
    json!({ "target": "simplex:1", "simplex": { "cell": 0, "degeneracy": { "n": 1, "images": [0, 1] } }, "h": [[0, 1]] })
}

#[test]
fn dp_operations() {
    let v = ok(&["dp", "mul"], json!({ "n": 1, "a": "x1", "b": "x1" }));
    assert_eq!(v["text"], "2*x1^[2]");
    assert_eq!(v["realized"], "x1^2");

    let v = ok(&["dp", "pullback"], json!({ "n": 1, "f": "x1^[2]", "alpha": { "n": 1, "images": [0, 0, 1] } }));
    assert_eq!(v["text"], "x2^[2]");

    let v = ok(&["dp", "partial"], json!({ "n": 1, "f": "x1^[3]", "i": 1 }));
    assert_eq!(v["text"], "x1^[2]");
    assert_eq!(v["realized"], "1/2*x1^2");

    let v = ok(&["dp", "embed"], json!({ "n": 1, "f": "theta^[2]*x1" }));
    assert_eq!(v["text"], "1/2*x0^2*x1");

    let v = ok(&["dp", "coeff-change"], json!({ "n": 1, "f": "2*theta^[2]", "target": "drop-theta" }));
    assert_eq!(v["kind"], "divided");
    assert_eq!(v["text"], "0");
}

#[test]
fn polynomial_json_round_trips() {
    let v = ok(&["dp", "mul"], json!({ "n": 2, "a": "x1*theta + 3*x2^[2]", "b": "1" }));
    let again = ok(&["dp", "mul"], json!({ "a": v["poly"], "b": one(2) }));
    assert_eq!(again["poly"], v["poly"]);
    assert_eq!(again["text"], v["text"]);
}

#[test]
fn form_operations() {
    let x2dx1 = json!({ "dim": 2, "terms": [{ "dxs": [1], "poly": { "n": 2, "terms": [{ "exps": [0, 0, 1], "coef": "1" }] } }] });
    let v = ok(&["form", "d"], json!({ "form": x2dx1 }));
    assert_eq!(v["text"], "(-1)·dx1∧dx2");
    let dd = ok(&["form", "d"], json!({ "form": v["form"] }));
    assert_eq!(dd["text"], "0");
    let v = ok(&["form", "wedge"], json!({ "a": x2dx1, "b": x2dx1 }));
    assert_eq!(v["text"], "0");
    let v = ok(&["form", "pullback"], json!({ "form": x2dx1, "alpha": { "n": 2, "images": [0, 2] } }));
    assert_eq!(v["text"], "(x1)·dx1");
}

#[test]
fn integration() {
    let v = ok(&["int", "definite"], json!({ "n": 1, "f": "x1^[2]", "i": 1, "lo": 0, "hi": "theta" }));
    assert_eq!(v["text"], "theta^[3]");
    assert_eq!(v["realized"], "1/6");

    let v = ok(
        &["int", "iterated"],
        json!({ "n": 3, "f": "1", "steps": [
            { "var": 3, "lo": "0", "hi": "x2" },
            { "var": 2, "lo": "0", "hi": "x1" },
            { "var": 1, "lo": "0", "hi": "theta" },
        ] }),
    );
    assert_eq!(v["text"], "theta^[3]");
    assert_eq!(v["realized"], "1/6");

    let v = ok(&["int", "chain"], json!({ "form": dx1(), "chain": { "n": 0, "r": 1, "steps": "F" } }));
    assert_eq!(v["text"], "theta");

    let v = ok(&["int", "fiber"], json!({ "form": { "space": "product:simplex:1:simplex:1", "values": {} } }));
    assert_eq!(v["form"]["space"], "simplex:1");
    let v = ok(&["int", "boundary"], json!({ "form": { "space": "product:simplex:1:simplex:1", "values": {} } }));
    assert_eq!(v["form"]["space"], "simplex:1");
}

#[test]
fn simplicial_sets() {
    let v = ok(&["sset", "info", "--space", "circle"], json!(null));
    assert_eq!(v["counts"], json!([1, 1]));
    assert_eq!(v["euler_characteristic"], 0);
    assert_eq!(v["nerve"], false);

    let v = ok(&["sset", "info", "--space", "sphere:2"], json!(null));
    assert_eq!(v["euler_characteristic"], 2);

    let built = ok(&["sset", "build", "--space", "boundary:2"], json!(null));
    let info = ok(&["sset", "info"], json!({ "space": built }));
    assert_eq!(info["counts"], json!([3, 3]));
    assert_eq!(info["euler_characteristic"], 0);
}

#[test]
fn iterated_integrals_and_bar() {
    let letter = json!({ "values": { "1:0": dx1() } });
    let v = ok(&["ii", "eval"], json!({ "forms": [letter, letter], "path": identity_path() }));
    assert_eq!(v["text"], "theta^[2]");
    assert_eq!(v["realized"], "1/2");

    let v = ok(&["bar", "ii-eval"], json!({ "space": "simplex:1", "element": { "letters": [letter, letter] }, "path": identity_path() }));
    assert_eq!(v["realized"], "1/2");

    let v = ok(&["bar", "shuffle"], json!({ "space": "simplex:1", "a": { "letters": [letter] }, "b": { "letters": [letter] } }));
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["coef"], "2");

    let d = ok(&["bar", "d"], json!({ "space": "simplex:1", "element": { "letters": [letter] } }));
    let dd = ok(&["bar", "d"], d);
    assert_eq!(dd["terms"], json!([]));

    let v = ok(&["bar", "cc-d"], json!({ "space": "circle", "element": { "letters": [letter] }, "basepoint": 0 }));
    assert_eq!(v["basepoint"], 0);
    assert_eq!(v["terms"], json!([]));
}

#[test]
fn verify_reports_are_deterministic() {
    let a = run(&["verify", "dsquare", "--trials", "10", "--seed", "5"], "");
    let b = run(&["verify", "dsquare", "--trials", "10", "--seed", "5"], "");
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let report: Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(report["failure_count"], 0);
    assert_eq!(report["trials"], 10);
    assert!(report.get("wall_time_ms").is_none());

    let (code, out, _) = run(&["verify", "dsquare", "--trials", "2", "--timing"], "");
    assert_eq!(code, 0);
    assert!(serde_json::from_str::<Value>(&out).unwrap()["wall_time_ms"].is_u64());
}

#[test]
fn every_suite_runs() {
    for suite in ["stokes", "naturality", "dsquare", "ii-cochain", "ii-shuffle", "bar-d2", "embed-oracle", "combinatorics"] {
        let (code, out, err) = run(&["verify", suite, "--trials", "2", "--seed", "1"], "");
        assert_eq!(code, 0, "{suite}: {err}");
        let report: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(report["failure_count"], 0, "{suite}");
        assert!(report["checks"].as_u64().unwrap() > 0, "{suite}");
    }
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(run(&["verify", "no-such-suite"], "").0, 2);
    assert_eq!(run(&["frobnicate"], "").0, 2);
    let (code, _, err) = run(&["dp", "mul"], "{not json");
    assert_eq!(code, 2);
    assert!(serde_json::from_str::<Value>(err.trim()).unwrap()["error"].is_string());
    assert_eq!(run(&["dp", "mul"], r#"{"a": "x1"}"#).0, 2);
    assert_eq!(run(&["dp", "pullback"], r#"{"n": 2, "f": "x1^[2]*x2", "alpha": {"n": 1, "images": [0, 1, 1]}}"#).0, 2);
    assert_eq!(run(&["sset", "info", "--space", "boundary:0"], "").0, 2);
    assert_eq!(run(&["int", "chain"], r#"{"form": {"dim": 0, "terms": []}, "chain": {"n": 0, "r": 1, "steps": "X"}}"#).0, 2);
}

#[test]
fn help_exits_0() {
    let (code, out, _) = run(&["--help"], "");
    assert_eq!(code, 0);
    assert!(out.contains("verify"));
}

#[test]
fn file_input_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    let output = dir.path().join("out.json");
    std::fs::write(&input, json!({ "n": 1, "a": "x1", "b": "theta" }).to_string()).unwrap();
    let (code, out, _) = run(&["dp", "mul", "-i", input.to_str().unwrap(), "-o", output.to_str().unwrap()], "");
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&output).unwrap(), out);

    let report = dir.path().join("report.json");
    let (code, out, _) = run(&["verify", "combinatorics", "--trials", "3", "--out", report.to_str().unwrap()], "");
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&report).unwrap(), out);

    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["dp", "mul", "-i", missing.to_str().unwrap()], "").0, 2);
}

#[test]
fn binary_runs() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_dpforms"))
        .args(["sset", "info", "--space", "simplex:2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["counts"], json!([3, 3, 1]));
}
