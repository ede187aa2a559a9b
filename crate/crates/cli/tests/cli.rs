use std::path::PathBuf;
use std::process::{Command, Output};

use fraclie::io::validate_csv;

fn fraclie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclie"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fraclie-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn job_file(name: &str, body: &str) -> PathBuf {
    let p = temp_path(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn printed_oscillator_generators_fail_one_check() {
    let o = fraclie(&["symcheck", "--example", "oscillator"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("3/4 residuals zero"));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["generators"][1]["residual"], "S(x) + 2*y");
}

#[test]
fn symcheck_job_with_scaling_generator_passes() {
    let job = job_file(
        "osc.json",
        r#"{
            "command": "symcheck",
            "ode": "y^(2α) + y",
            "generators": [
                {"name": "V1", "xi": "1", "phi": "0"},
                {"name": "V2", "xi": "0", "phi": "y"},
                {"name": "V3", "xi": "0", "phi": "cos(S(x))"},
                {"name": "V4", "xi": "0", "phi": "sin(S(x))"}
            ],
            "options": {"on_shell": true, "closure": true}
        }"#,
    );
    let o = fraclie(&["--job", job.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("4/4 residuals zero"));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["closure"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["closes"] == true));
}

#[test]
fn dimension_row() {
    let o = fraclie(&["dim", "--depth", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let t = validate_csv(&stdout(&o)).unwrap();
    let g = t.column("gamma_hat").unwrap()[0];
    assert!((g - 2f64.ln() / 3f64.ln()).abs() < 0.02, "{g}");
}

#[test]
fn malformed_jobs_exit_2_with_field_diagnostics() {
    let job = job_file("bad.json", r#"{"command": "dim", "depht": 3}"#);
    let o = fraclie(&["--job", job.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("depht"));

    let job = job_file(
        "missing.json",
        r#"{"command": "ode", "coeffs": [1, 0, 1], "figure": 2}"#,
    );
    let o = fraclie(&["--job", job.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("`initial` is required") && err.contains("`figure` does not apply"),
        "{err}"
    );

    assert_eq!(fraclie(&["figure", "4"]).status.code(), Some(2));
    assert_eq!(
        fraclie(&["symcheck", "--example", "oscillator", "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fraclie(&["deriv", "--expr", "S(x) +"]).status.code(),
        Some(2)
    );
    assert_eq!(
        fraclie(&["--job", "/nonexistent/job.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn figure_outputs() {
    let o = fraclie(&["figure", "3", "--depth", "6"]);
    let t = validate_csv(&stdout(&o)).unwrap();
    assert_eq!(t.rows.len(), 64);
    assert_eq!(t.rows[0], [0.0, 0.0]);

    let t = validate_csv(&stdout(&fraclie(&["figure", "1", "--depth", "4"]))).unwrap();
    assert_eq!(t.rows.len(), 256);
    assert!(t.column("f").unwrap().iter().all(|f| f.abs() <= 1.0));

    let t = validate_csv(&stdout(&fraclie(&["figure", "5", "--depth", "10"]))).unwrap();
    let s = t.column("S(x)").unwrap();
    assert!(s.windows(2).all(|w| w[0] <= w[1]));
    for (c, u) in t.column("cos(S(x))").unwrap().iter().zip(&s) {
        assert_eq!(*c, u.cos());
    }
}

#[test]
fn output_is_deterministic_and_validates() {
    let runs: [&[&str]; 6] = [
        &["set", "--depth", "4"],
        &["staircase", "--depth", "5"],
        &[
            "deriv",
            "--expr",
            "S(x)^2",
            "--depth",
            "6",
            "--samples",
            "10",
            "--seed",
            "7",
        ],
        &["integ", "--expr", "S(x)", "--depth", "6"],
        &[
            "ode",
            "--coeffs",
            "1,0,1",
            "--initial",
            "1,0",
            "--depth",
            "5",
        ],
        &["figure", "2", "--depth", "3"],
    ];
    for args in runs {
        let a = fraclie(args);
        let b = fraclie(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let t = validate_csv(&stdout(&a)).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert!(t.metadata.iter().any(|(k, _)| k == "gamma"));
        assert!(t.metadata.iter().any(|(k, _)| k == "normalization"));
    }
}

#[test]
fn derivative_of_staircase_square() {
    let o = fraclie(&[
        "deriv",
        "--expr",
        "S(x)^2",
        "--depth",
        "10",
        "--samples",
        "20",
    ]);
    let t = validate_csv(&stdout(&o)).unwrap();
    for row in &t.rows {
        assert!((row[3] - 2.0 * row[1]).abs() < 1e-6, "{row:?}");
    }
}

#[test]
fn out_flag_and_json_format() {
    let path = temp_path("traj.json");
    let o = fraclie(&[
        "ode",
        "--coeffs",
        "1,0,1",
        "--initial",
        "1,0",
        "--depth",
        "3",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["columns"][2], "y");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 16);
    assert!(doc["metadata"]["assumption"].is_string());
}

#[test]
fn first_order_scenarios() {
    let o = fraclie(&["symcheck", "--example", "first-order"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let bad = &report["candidates"][0]["equations"][1]["by_constant"][0];
    assert_eq!(
        (bad["monomial"].as_str(), bad["coefficient"].as_str()),
        (Some("c2"), Some("-2"))
    );
    assert_eq!(report["candidates"][1]["zero"], true);

    let job = job_file(
        "first.json",
        r#"{"command": "symcheck", "first_order": {"f": "S(x) + S(y)", "candidates": [
            {"xi": "c1*exp(S(x)) + c2", "h": "c1*S(x)*exp(S(x)) + c3*exp(S(x)) - c2"}]}}"#,
    );
    let o = fraclie(&["--job", job.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn prolong_report() {
    let o = fraclie(&["prolong", "--xi", "S(x)", "--phi", "S(y)", "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["etas"], serde_json::json!(["0", "-y^(2α)"]));
    assert_eq!(doc["characteristic"], "-S(x)*y^(α) + S(y)");
}

#[test]
fn noether_runs() {
    let free = [
        "noether",
        "--lagrangian",
        "0.5*2*q^(α)^2",
        "--coeffs",
        "0,0,1",
        "--initial",
        "1,3",
        "--depth",
        "10",
    ];
    let o = fraclie(&free);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = validate_csv(&stdout(&o)).unwrap();
    assert!(t
        .column("J")
        .unwrap()
        .iter()
        .all(|&j| (j - 6.0).abs() < 1e-12));

    let wrong = [
        "noether",
        "--lagrangian",
        "0.5*q^(α)^2 - 0.5*q^2",
        "--coeffs",
        "0,0,1",
        "--initial",
        "0,1",
    ];
    let o = fraclie(&wrong);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not a solution"));
}

#[test]
fn flags_override_job_file() {
    let job = job_file(
        "fig.json",
        r#"{"command": "figure", "figure": 3, "depth": 2}"#,
    );
    let t = validate_csv(&stdout(&fraclie(&[
        "--job",
        job.to_str().unwrap(),
        "--depth",
        "3",
    ])))
    .unwrap();
    assert_eq!(t.rows.len(), 8);
}
