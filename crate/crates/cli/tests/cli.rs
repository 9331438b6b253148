use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name).display().to_string()
}

fn camd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_camd")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn estimate_topological_indices() {
    let o = camd(&["estimate", "--ti", &fixture("dmb.graph")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for line in ["path_count_0=6", "path_count_1=5", "path_count_2=6", "path_count_3=4", "kappa_1=12.000000", "kappa_2=2.222222", "kappa_3=3.000000"] {
        assert!(out.lines().any(|l| l == line), "missing {line} in\n{out}");
    }
}

#[test]
fn estimate_group_contribution() {
    let o = camd(&["estimate", "--gc", &fixture("fig2.gcm"), "--n", &fixture("fig2.n")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("P=4.300000"));
    let o = camd(&["estimate", "--gc", &fixture("alkanes_p.gcm"), "--graph", &fixture("dmb.graph"), "--library", &fixture("alkanes.lib")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // Four CH3 and two CH.
    assert!(stdout(&o).contains("P=4.460000"), "{}", stdout(&o));
}

#[test]
fn check_worked_vector_passes() {
    let o = camd(&["check", &fixture("fig8.n"), "--library", &fixture("fig8.lib"), "--m", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("result: pass"));
    assert!(!out.contains(" fail "));
}

#[test]
fn failed_check_exits_two() {
    let o = camd(&["check", &fixture("fig8_counter.n"), "--library", &fixture("fig8_quaternary.lib"), "--m", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("result: fail"));
}

#[test]
fn node_type_and_signature_checks() {
    let o = camd(&["check", &fixture("fig10.sig"), "--signatures", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // The bundled node-type assignment leaves vertex 3 weakly connected.
    let o = camd(&["check", &fixture("fig9.ti"), "--ti"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seeded_design_is_reproducible() {
    let args = ["design", &fixture("alkanes_design.problem"), "--solver", "ga", "--seed", "1"];
    let (a, b) = (camd(&args), camd(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("seed: 1"));
}

#[test]
fn design_reaches_the_target() {
    let o = camd(&["design", &fixture("fig8_target.problem")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("Br=1;CH=1;CH3=2;NH=1") && out.contains("proven"), "{out}");
}

#[test]
fn enumerate_limits_rows() {
    let o = camd(&["enumerate", &fixture("alkanes_design.problem"), "--max-results", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows = out.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count();
    assert_eq!(rows, 3, "{out}");
}

#[test]
fn mixture_and_process_run() {
    let o = camd(&["mixture", &fixture("mixture_demo.problem")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("q: 3.300000"));
    let o = camd(&["process", &fixture("process_demo.problem")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("p_star: 4.888889"));
}

#[test]
fn parse_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.problem");
    std::fs::write(&bad, "[library]\nfile alkanes.lib\n[bounds]\ntotal 5 2\n").unwrap();
    let o = camd(&["design", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(camd(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(camd(&["design", "/definitely/missing.problem"]).status.code(), Some(3));
}

#[test]
fn infeasible_problem_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("none.problem");
    std::fs::write(&p, "[library]\nfile alkanes.lib\n[models]\nfile alkanes_p.gcm\n[bounds]\ntotal 2 4\nproperty P 100 200\n").unwrap();
    let o = camd(&["design", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn oversized_enumeration_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("huge.problem");
    std::fs::write(&p, "[library]\nfile alkanes.lib\n[models]\nfile alkanes_p.gcm\n[bounds]\ntotal 2 400\n").unwrap();
    let o = camd(&["enumerate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn fixture_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fig8.n"), "CH3 2\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_camd"))
        .args(["check", "fig8.n", "--library", "fig8.lib", "--m", "-1"])
        .current_dir(dir.path().join(".."))
        .env("CAMD_FIXTURE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("sufficiency[CH3]") && !out.contains("sufficiency[NH]"), "{out}");
}
