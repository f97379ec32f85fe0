use std::process::{Command, Output};

use serde_json::Value;

fn logspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logspace")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn number(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

const HALF_THREE: &str = r#"{"total_measure":1,"pieces":[{"l":0,"r":0.5,"re":3,"im":0}]}"#;
const INVERSE_SINGULAR: &str =
    r#"{"op":"div","lhs":{"op":"poly","coeffs":[{"re":1,"im":0}]},"rhs":{"op":"singular","s":1}}"#;

#[test]
fn norms_of_a_step_function() {
    let v = json(&logspace(&["norm", "--input", HALF_THREE]));
    assert!((number(&v, "lognorm") - 2f64.ln()).abs() < 1e-14);
    let v = json(&logspace(&["orlicz", "--input", HALF_THREE]));
    assert!((number(&v, "orlicz") - 0.786036082289533).abs() < 1e-12);
}

#[test]
fn input_from_file_and_stdin() {
    let dir = std::env::temp_dir().join(format!("logspace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.json");
    std::fs::write(&path, HALF_THREE).unwrap();
    let v = json(&logspace(&["norm", "--input", path.to_str().unwrap()]));
    assert!((number(&v, "lognorm") - 2f64.ln()).abs() < 1e-14);

    let mut child = Command::new(env!("CARGO_BIN_EXE_logspace"))
        .args(["norm", "--input", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(HALF_THREE.as_bytes()).unwrap();
    let v = json(&child.wait_with_output().unwrap());
    assert!((number(&v, "lognorm") - 2f64.ln()).abs() < 1e-14);
}

#[test]
fn malformed_input_exits_with_two() {
    for args in [
        vec!["norm", "--input", r#"{"pieces":[]}"#],
        vec!["norm", "--input", r#"{"total_measure":1,"pieces":[{"l":0.5,"r":0.2,"re":1,"im":0}]}"#],
        vec!["op-dist", "--input", r#"[{"n":1,"re":[[1]]},{"n":2,"re":[[1,0],[0,1]]}]"#],
        vec!["nev-eval", "--re", "1", "--input", r#"{"op":"singular","s":1}"#],
        vec!["norm", "--input", "/nonexistent/input.json"],
    ] {
        let out = logspace(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(stderr.lines().count(), 1, "{stderr}");
        assert!(stderr.starts_with("E_"), "{stderr}");
    }
}

#[test]
fn emitted_values_are_reingested() {
    let f = r#"{"total_measure":1,"pieces":[{"l":0,"r":0.25,"re":2,"im":1},{"l":0.5,"r":1,"re":0.1,"im":0}]}"#;
    let direct = number(&json(&logspace(&["norm", "--input", f])), "lognorm");
    let embedded = json(&logspace(&["embed", "--n", "4", "--input", f]));
    let op = json(&logspace(&["op-norm", "--input", &embedded.to_string()]));
    assert!((number(&op, "lognorm") - direct).abs() < 1e-14);

    let seq = format!("[{f},{f},{f},{f}]");
    let cauchy = json(&logspace(&["cauchy", "--input", &seq]));
    assert_eq!(cauchy["report"]["is_cauchy"], Value::Bool(true));
    let again = json(&logspace(&["norm", "--input", &cauchy["limit"].to_string()]));
    assert_eq!(number(&again, "lognorm"), direct);
}

#[test]
fn matrix_verbs() {
    let t = r#"{"n":2,"re":[[3,0],[0,0.5]]}"#;
    let split = json(&logspace(&["split", "--cutoff", "1", "--input", t]));
    let tail = json(&logspace(&["op-norm", "--input", &split["tail_part"].to_string()]));
    assert!((number(&tail, "operator_norm") - 3.0).abs() < 1e-14);
    let det = json(&logspace(&["fkdet", "--input", t]));
    assert!((number(&det, "fk_determinant") - 1.5f64.sqrt()).abs() < 1e-14);
    let p = json(&logspace(&["project", "--lo", "1", "--input", t]));
    assert_eq!(p["re"], serde_json::json!([[1.0, 0.0], [0.0, 0.0]]));
    let d = json(&logspace(&["dtau", "--input", &format!("[{t},{t}]")]));
    assert_eq!(number(&d, "dtau"), 0.0);
}

#[test]
fn nevanlinna_verbs() {
    let sweep = logspace(&["nev-sweep", "--input", r#"{"op":"blaschke","a":{"re":0.5,"im":0}}"#]);
    assert!(sweep.status.success());
    let csv = String::from_utf8(sweep.stdout).unwrap();
    assert!(csv.starts_with("k,r,L,grid,resolved\n"));
    let means: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(means.windows(2).all(|w| w[0] <= w[1] + 1e-9));
    let sweep =
        json(&logspace(&["nev-sweep", "--format", "json", "--input", r#"{"op":"blaschke","a":{"re":0.5,"im":0}}"#]));
    assert!((number(&sweep, "estimate") - 2f64.ln()).abs() < 1e-4);

    let report = json(&logspace(&["nev-smirnov", "--input", INVERSE_SINGULAR]));
    assert!(number(&report, "defect") >= 0.5);
    assert_eq!(report["is_smirnov"], Value::Bool(false));

    let z = r#"{"op":"poly","coeffs":[{"re":0,"im":0},{"re":1,"im":0}]}"#;
    let two_z = r#"{"op":"poly","coeffs":[{"re":0,"im":0},{"re":2,"im":0}]}"#;
    let d = json(&logspace(&["nev-dist", "--m", "256", "--input", &format!("[{z},{two_z}]")]));
    assert!((number(&d, "d_N") - 2f64.ln()).abs() < 1e-14);

    let e = json(&logspace(&["nev-eval", "--re", "0.5", "--input", r#"{"op":"blaschke","a":{"re":0.5,"im":0}}"#]));
    assert_eq!((number(&e, "re"), number(&e, "im")), (0.0, 0.0));
}

#[test]
fn witness_verbs() {
    let w = json(&logspace(&["witness", "unbounded", "--eps", "0.1", "--n", "10"]));
    assert_eq!(w["verified"], Value::Bool(true));
    assert!(number(&w, "norm_f") < 0.1 && number(&w, "norm_f_over_n") >= 0.05);

    let one = r#"{"total_measure":1,"pieces":[{"l":0,"r":1,"re":1,"im":0}]}"#;
    let split = json(&logspace(&["witness", "nonconvex", "--eps", "0.1", "--input", one]));
    assert_eq!(split["n"], Value::from(37));
    assert_eq!(split["reconstruction_exact"], Value::Bool(true));

    let seq = json(&logspace(&["witness", "separation", "--k", "20"]));
    assert_eq!(seq.as_array().unwrap().len(), 20);
}

#[test]
fn selftest_passes() {
    let report = json(&logspace(&["selftest", "--seed", "7"]));
    assert_eq!(report["passed"], Value::Bool(true));
}
