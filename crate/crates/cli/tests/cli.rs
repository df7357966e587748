use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momentforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_field(text: &str, row: usize, col: usize) -> f64 {
    text.lines().nth(row + 1).unwrap().split(',').nth(col).unwrap().parse().unwrap()
}

#[test]
fn verify_all_passes() {
    let o = run(&["verify", "all", "--tol", "1e-8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().len() > 20);
}

#[test]
fn verify_single_suite_csv() {
    let o = run(&["verify", "hermite", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() > 2);
}

#[test]
fn qbeta_moments() {
    let o = run(&["moments", "qbeta:0.5:0.25:0.5:1", "--n-max", "5", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert_eq!(csv_field(&text, 0, 1), 1.0);
    assert!((csv_field(&text, 1, 1) - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn gamma_mellin() {
    let o = run(&["mellin", "gamma:1:2", "--z", "3", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!((csv_field(&text, 0, 2) - 36.0).abs() < 1e-12);
    assert!(csv_field(&text, 0, 3).abs() < 1e-12);
}

#[test]
fn atoms_json_and_csv() {
    let o = run(&["atoms", "qbeta:0.5:0.25:0.5:1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_object());
    let o = run(&["atoms", "qbeta:0.5:0.25:0.5:1", "--output", "csv"]);
    let text = stdout(&o);
    let total: f64 = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn hermite_scan_small_grid() {
    let o = run(&[
        "hermite-scan", "--tmin", "-0.5", "--tmax", "0.5", "--tstep", "0.5", "--xmin", "-1", "--xmax", "1",
        "--xstep", "1", "--output", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 10);
}

#[test]
fn table_has_carleman_column() {
    let o = run(&["table", "gamma:1:1", "--n-max", "4", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("carleman"));
    assert!((csv_field(&text, 4, 1) - 24.0).abs() < 1e-10);
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(run(&["moments", "nosuch:1"]).status.code(), Some(2));
    assert_eq!(run(&["moments", "qbeta:0.5"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["verify", "qseries"]);
    let b = run(&["verify", "qseries"]);
    assert_eq!(a.stdout, b.stdout);
}
