use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-cf"))
        .args(args)
        .env_remove("PADIC_CF_MAX_STEPS")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn expand_hensel_fixed_point() {
    let v = json(&["expand", "--p", "5", "--algorithm", "A", "--poly", "1,3,5"]);
    assert_eq!(v["p"], "5");
    assert_eq!(v["algorithm"], "A");
    assert_eq!(v["d0"], "0/1");
    assert_eq!(v["status"]["kind"], "periodic");
    assert_eq!(v["status"]["preperiod"], "0");
    assert_eq!(v["status"]["period"], "1");
    assert_eq!(v["terms"], serde_json::json!([{"t": "-1", "k": "1", "d": "3"}]));
}

#[test]
fn expand_rational_is_finite() {
    let v = json(&["expand", "--p", "5", "--algorithm", "C", "--rational", "5/3"]);
    assert_eq!(v["status"]["kind"], "finite");
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);
    assert_eq!(v["terms"][0]["d"], "2");
}

#[test]
fn expand_unrolls_terms_and_convergents() {
    let v = json(&[
        "expand", "--p", "5", "--algorithm", "A", "--poly", "1,3,5", "--terms", "4", "--convergents", "2",
    ]);
    assert_eq!(v["terms"].as_array().unwrap().len(), 4);
    assert_eq!(v["convergents"][1], serde_json::json!({"n": "1", "p": "-5", "q": "3"}));
    assert_eq!(v["convergents"][2], serde_json::json!({"n": "2", "p": "-15", "q": "4"}));
}

#[test]
fn expand_with_explicit_selector_picks_the_conjugate() {
    let v = json(&[
        "expand", "--p", "5", "--algorithm", "A", "--poly", "1,3,5", "--approx", "2", "--prec", "1",
    ]);
    assert_eq!(v["d0"], "2/1");
}

#[test]
fn json_is_deterministic() {
    let args = ["expand", "--p", "7", "--algorithm", "B", "--poly", "3,11,-14"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn input_errors_exit_2() {
    for args in [
        &["expand", "--p", "5", "--algorithm", "A", "--poly", "1,5,5"][..],
        &["expand", "--p", "5", "--algorithm", "A", "--poly", "1,0,-1"],
        &["expand", "--p", "6", "--algorithm", "A", "--rational", "1/2"],
        &["expand", "--p", "5", "--algorithm", "A", "--poly", "1,3,5", "--approx", "1", "--prec", "1"],
        &["orbit", "--p", "5", "--algorithm", "A", "--state", "5,5"],
        &["expand", "--p", "5", "--algorithm", "D", "--rational", "1/2"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn cap_exceeded_exits_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_padic-cf"))
        .args(["expand", "--p", "5", "--algorithm", "B", "--poly", "1,13,5"])
        .env("PADIC_CF_MAX_STEPS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["expand", "--p", "5", "--algorithm", "B", "--poly", "1,13,5", "--max-steps", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn schneider_truncates() {
    let v = json(&["expand", "--p", "5", "--algorithm", "schneider", "--poly", "1,3,5", "--max-steps", "6"]);
    assert_eq!(v["status"]["kind"], "truncated");
    assert_eq!(v["terms"].as_array().unwrap().len(), 6);
    assert_eq!(v["terms"][0]["t"], "1");
}

#[test]
fn orbit_shapes() {
    let b = stdout(&run(&["orbit", "--p", "5", "--algorithm", "B", "--state", "13,5"]));
    let states: Vec<&str> = b.lines().filter(|l| l.contains(':')).collect();
    assert_eq!(states.len(), 4);
    assert!(states[3].contains("(3, -35)") && states[3].contains("cycle entry"));
    let c = stdout(&run(&["orbit", "--p", "5", "--algorithm", "C", "--state", "3,-5"]));
    assert!(c.ends_with("preperiod 0, period 3\n"));
    let a = stdout(&run(&["orbit", "--p", "5", "--algorithm", "A", "--state", "13,5"]));
    assert!(a.ends_with("preperiod 0, period 2\n"));
}

#[test]
fn verify_reports_valuations() {
    let out = stdout(&run(&["verify", "--p", "5", "--algorithm", "A", "--poly", "1,3,5", "--upto", "5"]));
    let computed: Vec<&str> = out.lines().map(|l| l.rsplit(' ').next().unwrap()).collect();
    assert_eq!(computed, ["2", "3", "4", "5", "6"]);
    let out = stdout(&run(&["verify", "--p", "5", "--algorithm", "A", "--rational", "5/3"]));
    assert_eq!(out, "n=1 exact\n");
    let out = run(&["verify", "--p", "5", "--algorithm", "B", "--poly", "1,13,5", "--upto", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn census_csv_is_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for jobs in ["1", "4"] {
        let path = dir.path().join(format!("census-{jobs}.csv"));
        let out = run(&[
            "census", "--p", "5", "--algorithm", "C", "--b-range", "-50:50", "--c-range", "-50:50",
            "--jobs", jobs, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        files.push(std::fs::read(path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files.remove(0)).unwrap();
    assert_eq!(text.lines().next(), Some("b,c,quadrant,preperiod,period,pure,closed_form_pure"));
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[5], cols[6], "{line}");
    }
}

#[test]
fn census_orbit_shapes() {
    let a = stdout(&run(&["census", "--p", "5", "--algorithm", "A", "--b-range", "-50:50", "--c-range", "-50:50"]));
    for line in a.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[3], "0");
        assert!(cols[4] == "1" || cols[4] == "2");
    }
    let b = stdout(&run(&["census", "--p", "5", "--algorithm", "B", "--b-range", "-50:50", "--c-range", "-50:50"]));
    for line in b.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let bv: i64 = cols[0].parse().unwrap();
        assert_eq!(cols[4], "1");
        assert_eq!(cols[5] == "true", (1..=4).contains(&bv), "{line}");
    }
}
