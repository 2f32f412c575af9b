use std::path::PathBuf;

use topmeasure::harness::run::{EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
use topmeasure::harness::{execute, exit_code, run_scenario, RunOptions, RunReport, Scenario};
use topmeasure::Error;

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

const SMALL: &str = r#"
name = "small"
seed = 3

[frame]
x_min = 0.0
x_max = 10.0
y_min = 0.0
y_max = 10.0
nx = 64
ny = 64

[measures.mu]
kind = "example"

[regions.K]
kind = "rect"
x = [1.0, 7.0]
y = [5.0, 7.0]
role = "compact"

[regions.U]
kind = "rect"
x = [0.5, 7.5]
y = [4.5, 7.5]
role = "open"

[fields.f]
kind = "plateau"
inner = "K"
outer = "U"
height = 1.0
ramp = 0.25

[[checks]]
kind = "quasi_integral"
name = "rho_f"
measure = "mu"
field = "f"
expect = 1.0

[[checks]]
kind = "property"
name = "homogeneity"
measure = "mu"
suite = "homogeneity"
trials = 10

[[checks]]
kind = "distribution"
name = "dist"
measure = "mu"
field = "f"
"#;

fn without_timing(r: &RunReport) -> String {
    let mut v = serde_json::to_value(r).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn same_seed_gives_identical_reports() {
    let s = Scenario::from_toml(SMALL).unwrap();
    let (a, arts_a) = execute(&s, &RunOptions::default()).unwrap();
    let (b, arts_b) = execute(&s, &RunOptions::default()).unwrap();
    assert_eq!(without_timing(&a), without_timing(&b));
    assert_eq!(arts_a.len(), arts_b.len());
    assert!(arts_a.iter().zip(&arts_b).all(|(x, y)| x.file == y.file && x.contents == y.contents));
}

#[test]
fn seed_override_is_recorded() {
    let s = Scenario::from_toml(SMALL).unwrap();
    let (r, _) = execute(&s, &RunOptions { seed: Some(99), ..Default::default() }).unwrap();
    assert_eq!(r.seed, 99);
    assert!(r.pass);
}

#[test]
fn checks_are_sorted_by_name() {
    let s = Scenario::from_toml(SMALL).unwrap();
    let (r, _) = execute(&s, &RunOptions::default()).unwrap();
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["dist", "homogeneity", "rho_f"]);
}

#[test]
fn wrong_expectation_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, SMALL.replace("expect = 1.0", "expect = 1.25")).unwrap();
    let out = run_scenario(&path, &RunOptions { out_dir: Some(dir.path().join("out")), ..Default::default() });
    assert_eq!(exit_code(&out), EXIT_FAIL);
    let report = out.unwrap().report;
    let bad = report.checks.iter().find(|c| c.name == "rho_f").unwrap();
    assert!(!bad.pass);
    assert_eq!(bad.failures, 1);
    assert!(bad.worst.is_some());
}

#[test]
fn unknown_key_reports_its_line() {
    let text = SMALL.replace("seed = 3", "seed = 3\ncolour = \"red\"");
    match Scenario::from_toml(&text) {
        Err(Error::Config(m)) => assert!(m.contains("colour") && m.contains("line"), "{m}"),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn undefined_field_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, SMALL.replace("field = \"f\"\nexpect", "field = \"missing\"\nexpect")).unwrap();
    let out = run_scenario(&path, &RunOptions { out_dir: Some(dir.path().join("out")), ..Default::default() });
    assert_eq!(exit_code(&out), EXIT_CONFIG);
    assert!(matches!(out, Err(Error::Config(m)) if m.contains("missing")));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn json_scenarios_are_accepted() {
    let s = Scenario::from_toml(SMALL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, serde_json::to_string(&s).unwrap()).unwrap();
    let out = run_scenario(&path, &RunOptions { out_dir: Some(dir.path().join("out")), ..Default::default() }).unwrap();
    assert_eq!(out.exit_code, EXIT_PASS);
}

#[test]
fn bundled_example_writes_report_and_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(
        &bundled("nonlinear_example.toml"),
        &RunOptions { out_dir: Some(dir.path().to_path_buf()), ..Default::default() },
    )
    .unwrap();
    assert_eq!(out.exit_code, EXIT_PASS, "{:#?}", out.report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    let triple = out.report.checks.iter().find(|c| c.kind == "nonlinearity_example").unwrap();
    assert_eq!(triple.values["b1.rho_f"], 1.0);
    assert_eq!(triple.values["b1.rho_g"], 1.0);
    assert_eq!(triple.values["b1.rho_f_plus_g"], 1.5);
    assert!(dir.path().join("report.json").is_file());
    let csv = std::fs::read_to_string(dir.path().join("dist_h_F_h.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "t,F"));
    assert!(dir.path().join("roundtrip_K_trace.csv").is_file());
}

#[test]
fn bundled_baseline_passes() {
    let s = Scenario::from_path(&bundled("measure_baseline.toml")).unwrap();
    let (r, _) = execute(&s, &RunOptions { resolution: Some(128), ..Default::default() }).unwrap();
    let failing: Vec<_> = r.checks.iter().filter(|c| !c.pass).collect();
    assert!(failing.is_empty(), "{failing:#?}");
}
