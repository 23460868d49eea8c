use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn model(name: &str) -> String {
    root().join("models").join(name).display().to_string()
}

fn chorcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chorcheck"))
        .args(args)
        .env("CHORCHECK_COLOR", "never")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("chorcheck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn availability_holds_on_online_booking() {
    let o = chorcheck(&["check", &model("ob.gc"), "--formula", &model("availability.gl")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("availability: holds on ob"));
}

#[test]
fn connectedness_fails_on_online_booking() {
    let o = chorcheck(&["check", &model("ob.gc"), "--formula", &model("connectedness.gl")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("fails"));
}

#[test]
fn end_holds_for_inaction() {
    let f = scratch("zero.gc", "chor z = 0;");
    let o = chorcheck(&["check", &f, "--formula-text", "end"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn response_verdicts_and_json() {
    for (chor, code) in [("option1", 0), ("option2", 0), ("option2_wrong", 1)] {
        let o = chorcheck(&[
            "check",
            &model("response.gc"),
            "--chor",
            chor,
            "--formula",
            &model("response.gl"),
            "--format",
            "json",
        ]);
        assert_eq!(o.status.code(), Some(code), "{chor}: {}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["choreography"], chor);
        assert_eq!(v["results"][0]["holds"], code == 0);
    }
}

#[test]
fn witness_is_printed_on_request() {
    let o = chorcheck(&[
        "check",
        &model("response.gc"),
        "--chor",
        "option2",
        "--formula",
        &model("response.gl"),
        "--witness",
    ]);
    let out = stdout(&o);
    assert!(out.contains("exists: take D"), "{out}");
    assert!(out.contains("eq: both sides are 42"), "{out}");
}

#[test]
fn state_can_be_overridden() {
    let args = ["check", &model("response.gc"), "--chor", "option1", "--formula", &model("response.gl")];
    let mut with_other = args.to_vec();
    with_other.extend(["--state-text", "x@D = 7"]);
    assert_eq!(chorcheck(&with_other).status.code(), Some(0));
    let mut without = args.to_vec();
    without.extend(["--state-text", ""]);
    assert_eq!(chorcheck(&without).status.code(), Some(1));
}

#[test]
fn ambiguous_choreography_is_a_usage_error() {
    let o = chorcheck(&["check", &model("response.gc"), "--formula", &model("response.gl")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("3 choreographies declared"), "{}", stderr(&o));
}

#[test]
fn parse_errors_carry_positions() {
    let f = scratch("bad.gc", "chor c =\n  A -> B : k<1, x> 0;");
    let o = chorcheck(&["check", &f, "--formula-text", "end"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.gc:2:"), "{}", stderr(&o));
}

#[test]
fn recursion_is_rejected_by_check() {
    let f = scratch("loop.gc", "chor c = rec X { A -> B : k<1, x>. X };");
    let o = chorcheck(&["check", &f, "--formula-text", "end"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rec X"), "{}", stderr(&o));
}

#[test]
fn simulate_online_booking() {
    let o = chorcheck(&["simulate", &model("ob.gc")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("simulate_ob.txt"));
}

#[test]
fn simulate_inaction_terminates_immediately() {
    let f = scratch("zero.gc", "chor z = 0;");
    let o = chorcheck(&["simulate", &f, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "terminated");
    assert_eq!(v["trace"].as_array().unwrap().len(), 0);
}

#[test]
fn simulate_stuck_is_distinct_from_termination() {
    let f = scratch("stuck.gc", "chor s = A -> B : k<x, y>. 0;");
    let o = chorcheck(&["simulate", &f]);
    assert!(stdout(&o).starts_with("stuck after 0 steps"), "{}", stdout(&o));
}

#[test]
fn simulate_pcp_exhausts_the_budget() {
    let pcp = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/pcp_1.gc");
    let o = chorcheck(&["simulate", pcp.to_str().unwrap(), "--budget", "10", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "budget_exhausted");
    assert_eq!(v["trace"].as_array().unwrap().len(), 10);

    let o = chorcheck(&["simulate", pcp.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--budget"));
}

#[test]
fn simulate_all_lists_the_reachable_graph() {
    let o = chorcheck(&["simulate", &model("ob.gc"), "--all", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 8);
    assert_eq!(v["edges"].as_array().unwrap().len(), 7);
    assert_eq!(v["truncated"], false);
}

#[test]
fn seeded_simulation_is_reproducible() {
    let f = scratch("par.gc", "chor p = A -> B : k<1, x>. 0 | C -> D : j<2, y>. 0 | E -> F : i<3, z>. 0;");
    let a = chorcheck(&["simulate", &f, "--seed", "9"]);
    let b = chorcheck(&["simulate", &f, "--seed", "9"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("terminated after 3 steps"));
}

#[test]
fn pcp_reports() {
    let o = chorcheck(&["pcp", "--pairs", "0:0", "--depth", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("SOLUTION sequence [1]\n"));

    let o = chorcheck(&["pcp", "--pairs", "0:1", "--depth", "30"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), golden("pcp_no_solution.txt"));

    let o = chorcheck(&["pcp", "--pairs", "01:0,1:101", "--depth", "16"]);
    assert_eq!(stdout(&o), golden("pcp_report.txt"));
}

#[test]
fn pcp_encoding_is_a_valid_document() {
    let o = chorcheck(&["pcp", "--pairs", "0:01,1:10", "--depth", "0", "--show-encoding"]);
    let text = stdout(&o);
    let doc: String = text.lines().take_while(|l| !l.starts_with("NO SOLUTION")).collect::<Vec<_>>().join("\n");
    let expected = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/pcp_2.gc")).unwrap();
    assert_eq!(doc.trim_end(), expected.trim_end());
}

#[test]
fn malformed_pcp_instance() {
    let o = chorcheck(&["pcp", "--pairs", "0:2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not a word over {0, 1}"));
}

#[test]
fn timeout_exits_with_status_three() {
    let o = chorcheck(&["pcp", "--pairs", "1:101,10:00,011:11", "--depth", "200", "--timeout", "0.2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("configurations explored so far"), "{}", stderr(&o));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["simulate", &model("ob.gc"), "--all"];
    assert_eq!(stdout(&chorcheck(&args)), stdout(&chorcheck(&args)));
}

#[test]
fn fmt_is_idempotent() {
    let o = chorcheck(&["fmt", &model("ob.gc")]);
    assert_eq!(o.status.code(), Some(0));
    let f = scratch("ob_fmt.gc", &stdout(&o));
    let again = chorcheck(&["fmt", &f, "--check"]);
    assert_eq!(again.status.code(), Some(0), "{}", stdout(&again));
    let unformatted = chorcheck(&["fmt", &model("ob.gc"), "--check"]);
    assert_eq!(unformatted.status.code(), Some(1));
}

#[test]
fn color_can_be_forced() {
    let o = Command::new(env!("CARGO_BIN_EXE_chorcheck"))
        .args(["check", &model("ob.gc"), "--formula", &model("usage.gl")])
        .env("CHORCHECK_COLOR", "always")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("\x1b[32mholds\x1b[0m"));
}
