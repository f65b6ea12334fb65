use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn write(name: &str, v: &Value) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn relift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relift"))
        .args(args)
        .output()
        .unwrap()
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn chain(names: &[&str]) -> Value {
    let pairs: Vec<_> = names.windows(2).map(|w| json!([w[0], w[1]])).collect();
    json!({ "elems": names, "pairs": pairs, "poset": true })
}

fn three_state_coalgebra() -> Value {
    json!({
        "carrier": { "elems": ["a", "b", "c"], "poset": true },
        "functor": "P",
        "xi": { "a": "{}", "b": "{a}", "c": "{a,b}" }
    })
}

#[test]
fn catalog_squares_pass_exact_check() {
    let f = json!({ "dom": chain(&["0", "1"]), "cod": chain(&["x", "y", "z"]), "table": { "0": "x", "1": "z" } });
    let g = json!({ "dom": chain(&["p"]), "cod": chain(&["x", "y", "z"]), "table": { "p": "y" } });
    let req = write("catalog_request.json", &json!({ "f": f, "g": g }));
    let out = relift(&["--json", "catalog", req.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json_out(&out);
    let squares = rep["result"]["squares"].as_array().unwrap();
    assert!(squares.iter().any(|s| s["kind"] == "comma"), "{rep}");
    for (i, s) in squares.iter().enumerate() {
        let p = write(&format!("catalog_square_{i}.json"), &s["square"]);
        let out = relift(&["exact-check", p.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            s["kind"],
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn bcc_check_separates_connected_components_from_powerset() {
    let out = relift(&["--json", "--seed", "7", "bcc-check", "--functor", "CC"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = json_out(&out);
    assert_eq!(rep["status"], "fail");
    assert!(rep["counterexample"].is_object(), "{rep}");
    let out = relift(&[
        "--seed",
        "7",
        "bcc-check",
        "--functor",
        "P",
        "--samples",
        "4",
        "--law-samples",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("no counterexample found"));
}

#[test]
fn modelcheck_top_holds_everywhere() {
    let c = write("three_state_coalgebra.json", &three_state_coalgebra());
    let phi = write("top.json", &json!("top"));
    let out = relift(&[
        "--json",
        "modelcheck",
        c.to_str().unwrap(),
        phi.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json_out(&out)["result"]["satisfied"],
        json!(["a", "b", "c"])
    );

    // only the state with no successors satisfies the empty nabla
    let phi = write(
        "nabla_empty.json",
        &json!({ "nabla": { "payload": "{}", "subs": {} } }),
    );
    let out = relift(&[
        "--json",
        "modelcheck",
        c.to_str().unwrap(),
        phi.to_str().unwrap(),
    ]);
    assert_eq!(json_out(&out)["result"]["satisfied"], json!(["a"]));
}

#[test]
fn malformed_input_exits_two_with_a_path() {
    let bad = write(
        "bad_relation.json",
        &json!({ "src": chain(&["0"]), "dst": chain(&["1"]), "mat": [[true, "yes"]] }),
    );
    let out = relift(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mat[0][1]"), "{err}");

    let out = relift(&["validate", "/nonexistent/relift.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_broken_invariants_as_failures() {
    // a pair that is not closed under the order
    let r = json!({ "src": chain(&["0", "1"]), "dst": chain(&["p"]), "mat": [[true, false]] });
    let p = write("open_relation.json", &r);
    assert_eq!(
        relift(&["validate", p.to_str().unwrap()]).status.code(),
        Some(1)
    );
    let closed = json!({ "src": chain(&["0", "1"]), "dst": chain(&["p"]), "mat": [[true, true]] });
    let p = write("closed_relation.json", &closed);
    assert_eq!(
        relift(&["validate", p.to_str().unwrap()]).status.code(),
        Some(0)
    );
}

#[test]
fn reads_stdin_and_output_is_deterministic() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_relift"))
        .args(["--json", "validate", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(three_state_coalgebra().to_string().as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );

    let a = relift(&[
        "--seed",
        "3",
        "bcc-check",
        "--functor",
        "Pc",
        "--samples",
        "3",
        "--law-samples",
        "4",
    ]);
    let b = relift(&[
        "--seed",
        "3",
        "bcc-check",
        "--functor",
        "Pc",
        "--samples",
        "3",
        "--law-samples",
        "4",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn compose_and_lift_round_trip() {
    let r = write(
        "le_relation.json",
        &json!({ "src": chain(&["0", "1"]), "dst": chain(&["0", "1"]), "mat": [[true, true], [false, true]] }),
    );
    let out = relift(&[
        "--json",
        "compose",
        r.to_str().unwrap(),
        r.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json_out(&out)["result"]["mat"],
        json!([[true, true], [false, true]])
    );

    let out = relift(&[
        "--json",
        "lift",
        "--functor",
        "Id + Id",
        r.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
