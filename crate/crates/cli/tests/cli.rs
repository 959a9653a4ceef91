use assert_cmd::Command;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::cargo_bin("orthotensor")
        .unwrap()
        .args(args)
        .output()
        .unwrap();
    let code = out.status.code().unwrap();
    let body = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (code, body)
}

#[test]
fn gaussian_moments_are_one() {
    let (code, body) = run(&["moments", "--weight", "gaussian", "--dim", "3"]);
    assert_eq!(code, 0);
    let values: Vec<f64> = serde_json::from_value(body["values"].clone()).unwrap();
    assert_eq!(values, vec![1.0; 5]);
}

#[test]
fn legendre_moments_follow_the_delta_normalization() {
    let (_, body) = run(&["moments", "--weight", "legendre", "--dim", "1"]);
    let values: Vec<f64> = serde_json::from_value(body["values"].clone()).unwrap();
    let expect = [2.0, 2.0 / 3.0, 2.0 / 15.0, 2.0 / 105.0, 2.0 / 945.0];
    for (v, e) in values.iter().zip(expect) {
        assert!((v - e).abs() < 1e-13 * e);
    }
}

#[test]
fn yukawa_in_one_dimension_is_a_domain_error() {
    let (code, body) = run(&["moments", "--weight", "yukawa", "--mu", "1", "--dim", "1"]);
    assert_eq!(code, 2);
    assert_eq!(body["error"]["kind"], "domain");
}

#[test]
fn bose_fugacity_out_of_range() {
    let (code, body) = run(&["coeffs", "--weight", "bose_einstein", "--z", "1.2"]);
    assert_eq!(code, 2);
    assert_eq!(body["error"]["kind"], "domain");
}

#[test]
fn gaussian_coefficients() {
    let (code, body) = run(&["coeffs", "--weight", "gaussian", "--dim", "2"]);
    assert_eq!(code, 0);
    assert_eq!(body["c"], serde_json::json!([1.0, 1.0, 1.0, 1.0, 1.0]));
    assert_eq!(body["d4"], 1.0);
}

#[test]
fn legendre_c0_in_one_dimension() {
    let (_, body) = run(&["coeffs", "--weight", "legendre"]);
    let c0 = body["c"][0].as_f64().unwrap();
    assert!((c0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
}

#[test]
fn verify_passes_and_fails_by_tolerance() {
    let (code, body) = run(&[
        "verify", "--weight", "gaussian", "--dim", "3", "--tol", "1e-10",
    ]);
    assert_eq!(code, 0);
    assert_eq!(body["pass"], true);
    let (code, _) = run(&[
        "gram",
        "--weight",
        "chebyshev1",
        "--dim",
        "2",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(code, 0);
    let (code, body) = run(&[
        "verify", "--weight", "legendre", "--dim", "2", "--tol", "1e-18",
    ]);
    assert_eq!(code, 1);
    assert_eq!(body["pass"], false);
}

#[test]
fn hermite_projection() {
    let (_, body) = run(&["project1d", "--weight", "gaussian"]);
    assert_eq!(
        body["polynomials"][4],
        serde_json::json!([3.0, 0.0, -6.0, 0.0, 1.0])
    );
}

#[test]
fn eval_returns_symmetric_components() {
    let (code, body) = run(&[
        "eval", "--weight", "legendre", "--dim", "2", "--order", "2", "--xi", "0.3,0.4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(body["tensor"]["entries"].as_array().unwrap().len(), 3);
}

#[test]
fn multipole_from_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dipole.csv");
    std::fs::write(&path, "# x,y,z,q\n0.125,0,0,1\n-0.125,0,0,-1\n").unwrap();
    let (code, body) = run(&[
        "multipole",
        "--weight",
        "yukawa",
        "--mu",
        "1",
        "--dim",
        "3",
        "--charges",
        path.to_str().unwrap(),
        "--xi",
        "5,0,0",
        "--order",
        "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(body["charges"], 2);
    assert!(
        body["multipoles"][0]["entries"][0][1]
            .as_f64()
            .unwrap()
            .abs()
            < 1e-15
    );
}

#[test]
fn expand_reports_reconstruction() {
    let (code, body) = run(&["expand", "--xi", "1", "--u", "0.1"]);
    assert_eq!(code, 0);
    assert!(body["relative_error"].as_f64().unwrap().abs() < 1e-5);
}

#[test]
fn output_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        Command::cargo_bin("orthotensor")
            .unwrap()
            .args([
                "verify",
                "--weight",
                "legendre",
                "--dim",
                "2",
                "--seed",
                "9",
                "--out",
                p.to_str().unwrap(),
            ])
            .assert()
            .success()
            .stdout("");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bad_input_yields_error_objects() {
    let (code, body) = run(&["moments", "--weight", "nope"]);
    assert_eq!((code, body["error"]["kind"].as_str()), (2, Some("parse")));
    let (code, body) = run(&["frobnicate"]);
    assert_eq!((code, body["error"]["kind"].as_str()), (2, Some("usage")));
    let (code, body) = run(&[
        "multipole",
        "--dim",
        "2",
        "--charges",
        "/nonexistent.csv",
        "--xi",
        "1,0",
    ]);
    assert_eq!((code, body["error"]["kind"].as_str()), (2, Some("io")));
}
