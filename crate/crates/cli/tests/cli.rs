use std::path::PathBuf;
use std::process::{Command, Output};

use skeletron::berkovich::SkeletonTree;
use skeletron::metric_graph::MetricGraph;
use skeletron::rational::rat;
use skeletron::selftest::CriterionOutcome;
use skeletron::slope::{SlopeReport, Verdict};
use skeletron::stable::StabilizationReport;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn skeletron(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skeletron")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const NEGATIVE_F: &str = r#"{"lead_val":"0","factors":[{"root":"0","mult":1}]}"#;
const NEGATIVE_D: &str = r#"[{"type":1,"value":"0"},{"type":1,"value":"1"},{"type":1,"value":"inf"}]"#;

#[test]
fn tate_multiplicative() {
    let o = skeletron(&["tate", "--val-j", "-5/1"]);
    assert_eq!(o.status.code(), Some(0));
    let g: MetricGraph = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(g.edges().len(), 1);
    assert!(g.edges()[0].is_loop());
    assert_eq!(g.edges()[0].length, rat(5, 1));

    let half: MetricGraph = serde_json::from_str(&stdout(&skeletron(&["tate", "--val-j", "-1/2"]))).unwrap();
    assert_eq!(half.edges()[0].length, rat(1, 2));
}

#[test]
fn tate_good_reduction() {
    let o = skeletron(&["tate", "--val-j", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let g: MetricGraph = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(g.vertices().len(), 1);
    assert_eq!(g.vertices()[0].weight, 1);
    assert!(g.edges().is_empty());
}

#[test]
fn tate_rejects_garbage() {
    let o = skeletron(&["tate", "--val-j", "five"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn slope_check_worked_example_passes() {
    let o = skeletron(&[
        "slope-check",
        "--f",
        &fixture("worked_f.json"),
        "--punctures",
        &fixture("worked_punctures.json"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: SlopeReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);
    assert_eq!(report.function.vertex_values["v1"], rat(2, 1));
    assert_eq!(report.function.edge_slopes, vec![2]);
    assert_eq!(report.retraction_samples.len(), 20);
    // emitted JSON re-serializes to the same text
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", stdout(&o));
}

#[test]
fn slope_check_wrong_order_fails() {
    let o = skeletron(&["slope-check", "--f", NEGATIVE_F, "--punctures", NEGATIVE_D, "--orders", r#"{"1": 1}"#]);
    assert_eq!(o.status.code(), Some(1));
    let report: SlopeReport = serde_json::from_str(&stdout(&o)).unwrap();
    let bad: Vec<_> = report.rays.iter().filter(|r| !r.matches).collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].mark, "1");
    assert!(stderr(&o).contains("ray to 1"));
}

#[test]
fn slope_check_unknown_order_mark() {
    let o = skeletron(&["slope-check", "--f", NEGATIVE_F, "--punctures", NEGATIVE_D, "--orders", r#"{"7": 1}"#]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn slope_check_is_deterministic() {
    let args = ["slope-check", "--f", NEGATIVE_F, "--punctures", NEGATIVE_D, "--seed", "12345"];
    assert_eq!(stdout(&skeletron(&args)), stdout(&skeletron(&args)));
}

#[test]
fn emit_plot_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.tsv");
    let o = skeletron(&[
        "slope-check",
        "--f",
        &fixture("worked_f.json"),
        "--punctures",
        &fixture("worked_punctures.json"),
        "--samples",
        "3",
        "--emit-plot",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let table = std::fs::read_to_string(path).unwrap();
    assert!(table.starts_with("edge\tfrom\tto\tslope\tlength\tdelta_F"));
    assert!(table.contains("e0\tv0\tv1\t2\t1\t2"));
}

#[test]
fn stabilize_rejects_euler_zero() {
    let o = skeletron(&["stabilize", "--graph", &fixture("circle.json")]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("g = 1 and #D = 0"), "{err}");
    assert!(err.contains("g = 0 and #D = 2"), "{err}");
}

#[test]
fn stabilize_prunes_tail_and_midpoint() {
    let o = skeletron(&["stabilize", "--graph", &fixture("theta_with_tail.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: StabilizationReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.output.vertices().len(), 2);
    assert_eq!(report.output.edges().len(), 3);
    assert_eq!(report.steps.len(), 2);
    assert_eq!(report.chi, -2);
}

#[test]
fn malformed_json_reports_position() {
    let o = skeletron(&["stabilize", "--graph", "{\"vertices\": [\n  }"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2 column"), "{}", stderr(&o));
}

#[test]
fn missing_file_is_input_error() {
    let o = skeletron(&["stabilize", "--graph", "/nonexistent/graph.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_rejected() {
    let o = skeletron(&["tate", "--val-j", "1", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn skeleton_round_trips() {
    let o = skeletron(&["skeleton", "--punctures", &fixture("worked_punctures.json")]);
    assert_eq!(o.status.code(), Some(0));
    let tree: SkeletonTree = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(tree.graph().vertices().len(), 2);
    assert_eq!(tree.graph().rays().len(), 4);
    assert_eq!(serde_json::to_string_pretty(&tree).unwrap() + "\n", stdout(&o));
}

#[test]
fn eval_at_type2_and_type1() {
    let o = skeletron(&["eval", "--f", &fixture("worked_f.json"), "--point", r#"{"type":2,"center":"0","s":"1/2"}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "1/1");
    let o = skeletron(&["eval", "--f", &fixture("worked_f.json"), "--point", r#"{"type":1,"value":"t"}"#]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn newton_laurent_unit() {
    let o = skeletron(&["newton", "--f", &fixture("laurent.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["unit"]["d"], 1);
    assert_eq!(v["unit"]["val_alpha"], "0/1");
    assert_eq!(v["unit"]["image"]["lo"], "0/1");
    assert_eq!(v["unit"]["image"]["hi"], "1/1");
    assert_eq!(v["breakpoints"].as_array().unwrap().len(), 0);

    let o = skeletron(&["newton", "--f", &fixture("laurent.json"), "--interval", "-inf,+inf"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["unit"], serde_json::Value::Null);
    assert_eq!(v["breakpoints"].as_array().unwrap().len(), 2);
}

#[test]
fn newton_rational_function_counts() {
    let o = skeletron(&["newton", "--f", &fixture("worked_f.json"), "--interval", "-1,3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let bps = v["breakpoints"].as_array().unwrap();
    assert_eq!(bps.len(), 2);
    for bp in bps {
        assert_eq!(bp["slope_change"], bp["predicted_change"]);
    }
    assert_eq!(v["order_at_center"], 1);
}

#[test]
fn selftest_single_criterion() {
    let o = skeletron(&["selftest", "--criterion", "9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let outcomes: Vec<CriterionOutcome> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(outcomes.len(), 1);
    assert!(outcomes[0].passed);
    assert!(stderr(&o).contains("[PASS] criterion 9"));
    assert_eq!(skeletron(&["selftest", "--criterion", "42"]).status.code(), Some(2));
}

#[test]
fn selftest_reads_fixture_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("selftest/worked.json"), dir.path().join("worked.json")).unwrap();
    let bad = format!(r#"{{"f": {NEGATIVE_F}, "punctures": [{{"type":1,"value":"1"}},{{"type":1,"value":"inf"}}]}}"#);
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_skeletron"))
        .args(["selftest", "--criterion", "8"])
        .env("SKELETRON_FIXTURES", dir.path())
        .output()
        .unwrap();
    // a single criterion ignores the directory
    assert_eq!(o.status.code(), Some(0));

    let lib = skeletron::selftest::fixture_directory(dir.path(), 1);
    assert!(!lib.passed);
    assert!(lib.detail.contains("bad.json"), "{}", lib.detail);
    let good = skeletron::selftest::fixture_directory(&PathBuf::from(fixture("selftest")), 1);
    assert!(good.passed, "{}", good.detail);
}
