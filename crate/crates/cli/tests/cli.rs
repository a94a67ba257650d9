use std::f64::consts::PI;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kg-green")).args(args).output().expect("binary runs")
}

fn rows(csv: &str) -> Vec<[f64; 4]> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,value,err_est"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

#[test]
fn kernel_csv_marks_singular_cell() {
    let out = run(&["kernel", "--domain", "strip", "--r", "1", "--rep", "auto", "--grid", "-1,1,3,0,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l == "0.0000000000000000e0,0.0000000000000000e0,nan,nan"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("singular"));
    let r = rows(&stdout);
    assert_eq!(r.len(), 9);
    assert_eq!(r[3][0], -1.0);
    assert_eq!(r[3][1], 1.0);
}

#[test]
fn halfplane_kernel_at_zero_mass_is_poisson() {
    let out = run(&["kernel", "--domain", "halfplane", "--r", "0", "--grid", "-2,2,5,0.5,2,4"]);
    assert_eq!(out.status.code(), Some(0));
    for [x, y, v, _] in rows(&String::from_utf8(out.stdout).unwrap()) {
        let poisson = y / (PI * (x * x + y * y));
        assert!((v - poisson).abs() <= 1e-15 * poisson);
    }
}

#[test]
fn solve_constant_halfplane_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.csv");
    let out = run(&[
        "solve", "--domain", "halfplane", "--r", "2", "--boundary", "constant(1)", "--grid", "-1,1,3,0,2,5", "--tol", "1e-9",
        "-o", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for [_, y, v, _] in rows(&std::fs::read_to_string(&path).unwrap()) {
        assert!((v - (-2.0 * y).exp()).abs() <= 1e-9);
    }
}

#[test]
fn solve_cosine_strip_matches_separable_solution() {
    let out = run(&["solve", "--boundary", "cosine(1)", "--r", "1", "--grid", "-1,1,5,0,3.141592653589793,5", "--tol", "1e-7"]);
    assert_eq!(out.status.code(), Some(0));
    let q = 2f64.sqrt();
    for [x, y, v, e] in rows(&String::from_utf8(out.stdout).unwrap()) {
        let exact = x.cos() * ((PI - y) * q).sinh() / (PI * q).sinh();
        assert!((v - exact).abs() <= 1e-6, "({x}, {y}): {v} vs {exact}");
        assert!(e >= 0.0);
    }
}

#[test]
fn output_is_bit_stable() {
    let args = ["solve", "--boundary", "holder_cusp(0.5)", "--r", "0.5", "--grid", "-2,2,7,0,3,4", "--domain", "halfplane"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn unknown_boundary_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.csv");
    let out = run(&["solve", "--boundary", "sawtooth(1)", "--grid", "0,1,2,0,1,2", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn invalid_configurations_exit_with_two() {
    for args in [
        vec!["kernel", "--grid", "0,1,0,0,1,2"],
        vec!["kernel", "--grid", "0,1,2,0,4,2"],
        vec!["kernel", "--grid", "0,1,2"],
        vec!["kernel", "--tol", "-1", "--grid", "0,1,2,0,1,2"],
        vec!["kernel", "--coeffs", "1,1,1.2,0,0", "--grid", "0,1,2,0,1,2"],
        vec!["kernel", "--domain", "halfplane", "--rep", "series", "--grid", "1,2,2,0.5,1,2"],
        vec!["solve", "--domain", "halfplane", "--boundary", "step", "--top", "step", "--grid", "0,1,2,0,1,2"],
        vec!["verify", "--suite", "nonsense"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn json_field_output() {
    let out = run(&["solve", "--boundary", "gaussian(0,0.5)", "--grid", "-1,1,3,0,1,3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["field"]["values"].as_array().unwrap().len(), 9);
    assert_eq!(doc["metadata"]["failed_cells"], 0);
    assert_eq!(doc["field"]["values"][1], 1.0);
}

fn verify(args: &[&str]) -> serde_json::Value {
    let out = run(&[&["verify"], args].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], true);
    doc
}

#[test]
fn verify_sine_transform_identity() {
    let doc = verify(&["--suite", "g3914"]);
    let triples = doc["reports"][0]["metadata"]["triples"].as_array().unwrap();
    assert_eq!(triples.len(), 6);
    assert!(triples.iter().all(|t| t["passed"] == true));
}

#[test]
fn verify_representations_at_zero_mass() {
    let doc = verify(&["--suite", "reps", "--r", "0"]);
    assert_eq!(doc["reports"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_masses() {
    let doc = verify(&["--suite", "mass"]);
    assert!(doc["reports"][0]["max_abs"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn verify_finite_difference_oracle() {
    let doc = verify(&["--suite", "fdoracle", "--coeffs", "canonical"]);
    let rep = &doc["reports"][0];
    assert_eq!(rep["tolerance"], 5e-3);
    assert!(rep["metadata"]["orders"].as_array().unwrap().iter().all(|q| q.as_f64().unwrap() >= 1.8));
}
