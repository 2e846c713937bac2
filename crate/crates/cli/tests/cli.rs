use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const K32: &str = "BIGRAPH v1\nnl=3 nr=2\n0 0\n0 1\n1 0\n1 1\n2 0\n2 1\n";
const C6: &str = "BIGRAPH v1\nnl=3 nr=3\n0 0\n0 1\n1 1\n1 2\n2 2\n2 0\n";
const MATCHING2: &str = "BIGRAPH v1\nnl=2 nr=2\n0 0\n1 1\n";
const K21: &str = "BIGRAPH v1\nnl=2 nr=1\n0 0\n1 0\n";
const K4: &str = "GRAPH v1\nn=4 d=3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";

fn une(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_une"))
        .args(args)
        .env_remove("UNE_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn status(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn strip_wall_time(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_time");
            map.values_mut().for_each(strip_wall_time);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}

#[test]
fn qhat_table_row() {
    let out = une(&["qhat", "--c0", "10", "--alpha", "2"]);
    assert_eq!(status(&out), 0);
    assert_eq!(json(&out)["q_hat"], 18907);
}

#[test]
fn qhat_rejects_small_c0() {
    let out = une(&["qhat", "--c0", "5", "--alpha", "2"]);
    assert_eq!(status(&out), 5);
    assert_eq!(json(&out)["error"]["kind"], "domain");
}

#[test]
fn qhat_wiring_below_threshold_carries_sheet() {
    let out = une(&["qhat", "--c0", "10", "--alpha", "2", "--q", "5"]);
    assert_eq!(status(&out), 5);
    let v = json(&out);
    assert_eq!(v["error"]["detail"]["q_hat"], 18907);
    assert_eq!(v["error"]["detail"]["q"], 5);
}

#[test]
fn spectrum_of_k32() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "k32.bg", K32);
    let out = une(&["spectrum", "--in", s(&g)]);
    assert_eq!(status(&out), 0);
    let v = json(&out);
    assert_eq!(v["ramanujan"], true);
    assert_eq!(v["c"], 2);
    assert_eq!(v["d"], 3);
}

#[test]
fn gadget_verify_k0_is_vacuous() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "g.bg", K32);
    let out = une(&["gadget", "verify", "--in", s(&g), "--k", "0"]);
    assert_eq!(status(&out), 0);
    assert_eq!(json(&out)["status"], "verified");
}

#[test]
fn gadget_verify_refutation_exits_6() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "c6.bg", C6);
    let out = une(&["gadget", "verify", "--in", s(&g), "--k", "3", "--audit"]);
    assert_eq!(status(&out), 6);
    let v = json(&out);
    assert_eq!(v["status"], "refuted");
    assert_eq!(v["verified_k"], 2);
    assert_eq!(v["audit"]["counterexamples"], 0);
}

#[test]
fn gadget_verify_budget_exits_7() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "c6.bg", C6);
    let out = une(&[
        "--budget",
        "1",
        "gadget",
        "verify",
        "--in",
        s(&g),
        "--k",
        "3",
    ]);
    assert_eq!(status(&out), 7);
    assert_eq!(json(&out)["status"], "budget-exceeded");
}

#[test]
fn sampling_and_verification_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.bg");
    let b = dir.path().join("b.bg");
    let args = |p: &Path| {
        [
            "--seed", "11", "gadget", "sample", "--L", "12", "--R", "8", "--c", "4", "--d", "6",
            "--out",
        ]
        .iter()
        .map(|x| x.to_string())
        .chain([s(p).to_string()])
        .collect::<Vec<_>>()
    };
    let run = |p: &Path| une(&args(p).iter().map(String::as_str).collect::<Vec<_>>());
    let (oa, ob) = (run(&a), run(&b));
    assert_eq!(status(&oa), 0);
    assert_eq!(oa.stdout, ob.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let verify = || {
        let out = une(&["--jobs", "2", "gadget", "verify", "--in", s(&a), "--k", "3"]);
        let mut v = json(&out);
        strip_wall_time(&mut v);
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(verify(), verify());
}

#[test]
fn pipeline_on_cycle_with_matching_gadget() {
    let dir = TempDir::new().unwrap();
    let big = file(&dir, "c6.bg", C6);
    let gadget = file(&dir, "m.bg", MATCHING2);
    let out = une(&["pipeline", "--big", s(&big), "--gadget", s(&gadget)]);
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["gadget"]["verified_k"], 2);
    let audit = &v["audit"];
    assert_eq!(audit["failures"].as_array().unwrap().len(), 0);
    // 3 singletons, 3 pairs, 1 triple
    assert_eq!(audit["sets"], 7);
    assert_eq!(audit["covered"], 7);
}

#[test]
fn pipeline_port_mismatch() {
    let dir = TempDir::new().unwrap();
    let big = file(&dir, "k32.bg", K32);
    let gadget = file(&dir, "k21.bg", K21);
    let out = une(&["pipeline", "--big", s(&big), "--gadget", s(&gadget)]);
    assert_eq!(status(&out), 12);
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "port-mismatch");
    assert_eq!(v["error"]["detail"]["failed_stage"], "product");
}

#[test]
fn pipeline_refuted_gadget_exits_11() {
    let dir = TempDir::new().unwrap();
    let big = file(&dir, "c6.bg", C6);
    let gadget = file(&dir, "k21.bg", K21);
    let out = une(&["pipeline", "--big", s(&big), "--gadget", s(&gadget)]);
    assert_eq!(status(&out), 11);
    assert_eq!(json(&out)["error"]["kind"], "gadget-refuted");
}

#[test]
fn pipeline_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let big = file(&dir, "c6.bg", C6);
    let gadget = file(&dir, "m.bg", MATCHING2);
    let run = || {
        let out = une(&[
            "--seed",
            "3",
            "pipeline",
            "--big",
            s(&big),
            "--gadget",
            s(&gadget),
            "--audit-samples",
            "2",
        ]);
        assert_eq!(status(&out), 0);
        let mut v = json(&out);
        strip_wall_time(&mut v);
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn missing_file_is_io_error() {
    let out = une(&["spectrum", "--in", "/nonexistent/graph.bg"]);
    assert_eq!(status(&out), 3);
    assert_eq!(json(&out)["error"]["kind"], "io");
    let out = une(&["pipeline", "--big", "/nonexistent/graph.bg"]);
    assert_eq!(status(&out), 3);
}

#[test]
fn malformed_file_is_parse_error() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.bg", "BIGRAPH v1\nnl=2 nr=x\n");
    let out = une(&["spectrum", "--in", s(&bad)]);
    assert_eq!(status(&out), 4);
    assert_eq!(json(&out)["error"]["kind"], "parse");
}

#[test]
fn flag_errors_are_usage_errors() {
    assert_eq!(status(&une(&["spectrum"])), 2);
    assert_eq!(
        status(&une(&["--jobs", "0", "qhat", "--c0", "10", "--alpha", "2"])),
        2
    );
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "c6.bg", C6);
    let out = une(&["nbcount", "--in", s(&g), "--set", "0,x", "--len", "2"]);
    assert_eq!(status(&out), 2);
}

#[test]
fn incidence_of_k4() {
    let dir = TempDir::new().unwrap();
    let base = file(&dir, "k4.g", K4);
    let out_path = dir.path().join("inc.bg");
    let out = une(&["incidence", "--in", s(&base), "--out", s(&out_path)]);
    assert_eq!(status(&out), 0);
    let v = json(&out);
    assert_eq!(v["n_left"], 6);
    assert_eq!(v["spectrum"]["ramanujan"], true);
    assert!(v["identity"]["max_residual"].as_f64().unwrap() < 1e-8);
    let spec = une(&["spectrum", "--in", s(&out_path)]);
    assert_eq!(json(&spec)["d"], 3);
}

#[test]
fn path_counts_agree() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "k32.bg", K32);
    let count = |method: &str| {
        let out = une(&[
            "nbcount",
            "--in",
            s(&g),
            "--set",
            "0,1",
            "--len",
            "4",
            "--method",
            method,
        ]);
        assert_eq!(status(&out), 0);
        json(&out)["count"].clone()
    };
    assert_eq!(count("operator"), count("endpoints-in-s"));
    let odd = une(&["nbcount", "--in", s(&g), "--set", "0", "--len", "3"]);
    assert_eq!(status(&odd), 5);
}

#[test]
fn operators_keep_exact_integers() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "k32.bg", K32);
    let out = une(&["nbops", "--in", s(&g), "--max-len", "20"]);
    assert_eq!(status(&out), 0);
    let v = json(&out);
    // Each left vertex starts c(c−1)^{9}(d−1)^{10} paths of length 20.
    let row: u64 = v["LL"][20][0]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .sum();
    assert_eq!(row, 2 * 1024);
}

#[test]
fn polynomial_and_bounds() {
    let out = une(&["poly", "--c", "3", "--d", "5", "--n", "2", "--at", "1.5"]);
    let v = json(&out);
    assert_eq!(v["polynomial"], "x^2 - 9x + 6");
    let value = v["at"]["value"].as_f64().unwrap();
    assert!((value - (2.25 - 13.5 + 6.0)).abs() < 1e-12);
    assert!((v["at"]["closed_form"][0].as_f64().unwrap() - value).abs() < 1e-9);

    let out = une(&["bounds", "--c", "3", "--d", "10", "--eps", "0.1"]);
    assert_eq!(status(&out), 0);
    assert_eq!(json(&out)["small_set_below_mixing"], true);

    let out = une(&["constants", "--c", "2", "--d", "3", "--eps", "0.5"]);
    assert_eq!(json(&out)["ell"], 8);
}

#[test]
fn boundchecks() {
    let out = une(&[
        "boundcheck",
        "lemma6",
        "--c",
        "2",
        "--d",
        "3",
        "--ell",
        "25",
        "--samples",
        "500",
    ]);
    assert_eq!(status(&out), 0);
    assert_eq!(json(&out)["violations"].as_array().unwrap().len(), 0);

    let dir = TempDir::new().unwrap();
    let c6 = file(&dir, "c6.bg", C6);
    let out = une(&["boundcheck", "identity", "--in", s(&c6), "--n", "3"]);
    assert_eq!(status(&out), 0);
    let out = une(&["boundcheck", "lemma9", "--in", s(&c6), "--max-len", "6"]);
    assert_eq!(status(&out), 0);
    let out = une(&[
        "boundcheck",
        "lemma8",
        "--in",
        s(&c6),
        "--set",
        "0",
        "--ell",
        "1",
    ]);
    assert_eq!(status(&out), 0);
    assert_eq!(json(&out)["holds"], true);
}
