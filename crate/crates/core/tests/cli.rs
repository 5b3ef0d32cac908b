use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use grdm_core::fock::{pdms_from_rho, random_density, slater_density, DensityOptions, TwoPdm};
use grdm_core::io::{ElementJson, MatrixJson, ReportJson};
use grdm_core::linalg::{complex_gaussian, exchange, random_unitary};

fn grdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grdm"))
        .args(args)
        .env_remove("GRDM_THREADS")
        .output()
        .expect("binary runs")
}

fn write(path: &Path, value: &impl serde::Serialize) {
    std::fs::write(path, serde_json::to_string(value).unwrap()).unwrap();
}

fn slater_records() -> Vec<MatrixJson> {
    let u = random_unitary(3, &mut ChaCha8Rng::seed_from_u64(1));
    let (g, big) = pdms_from_rho(&slater_density(&u.columns(0, 2).into_owned()).unwrap());
    vec![MatrixJson::gamma(&g), MatrixJson::big_gamma(&big)]
}

fn reports(path: &Path) -> Vec<ReportJson> {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_slater_fixture_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (input, out) = (dir.path().join("in.json"), dir.path().join("out.json"));
    write(&input, &slater_records());
    let o = grdm(&[
        "check",
        "--in",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = reports(&out);
    let names: Vec<&str> = r.iter().map(|r| r.condition.as_str()).collect();
    assert_eq!(names, ["first-order", "P", "Q", "G", "T1", "T2"]);
    assert!(r.iter().all(|r| r.pass && r.margin.unwrap() >= -1e-9));
    // the atomic write leaves no temporary behind
    let mut files: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["in.json", "out.json"]);
}

#[test]
fn check_injected_negative_eigenvalue_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (input, out) = (dir.path().join("in.json"), dir.path().join("out.json"));
    let rho = random_density(3, 2, DensityOptions::default()).unwrap();
    let (g, big) = pdms_from_rho(&rho);
    let raw = complex_gaussian(9, 1, &mut ChaCha8Rng::seed_from_u64(3));
    let anti = &raw - exchange(3) * &raw;
    let v = anti.unscale(anti.norm());
    let bad = TwoPdm(&big.0 - (&v * v.adjoint()).scale(5.0));
    write(
        &input,
        &vec![MatrixJson::gamma(&g), MatrixJson::big_gamma(&bad)],
    );
    let o = grdm(&[
        "check",
        "--in",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let p = reports(&out)
        .into_iter()
        .find(|r| r.condition == "P")
        .unwrap();
    assert!(!p.pass && p.margin.unwrap() < 0.0);
}

#[test]
fn check_gamma_only_runs_first_order() {
    let dir = tempfile::tempdir().unwrap();
    let (input, out) = (dir.path().join("in.json"), dir.path().join("out.json"));
    write(&input, &slater_records()[..1].to_vec());
    let o = grdm(&[
        "check",
        "--in",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = reports(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].condition, "first-order");
}

#[test]
fn check_rho_adds_grassmann_forms() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    let rho = random_density(3, 4, DensityOptions::default()).unwrap();
    write(&input, &MatrixJson::new(Some("rho"), 3, rho.mat()));
    let o = grdm(&["check", "--in", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: Vec<ReportJson> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.len(), 12);
    assert!(r
        .iter()
        .any(|r| r.method == grdm_core::conditions::Method::GrassmannForm));
}

#[test]
fn malformed_input_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    std::fs::write(
        &input,
        r#"[{"kind": "gamma", "m": 2, "dim": 2, "re": [[1, 0], [0, 1]]}]"#,
    )
    .unwrap();
    let o = grdm(&["check", "--in", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("im"));

    let mut recs = slater_records();
    recs[1].re.pop();
    write(&input, &recs);
    let o = grdm(&["check", "--in", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shape mismatch"));
}

#[test]
fn fuzz_is_deterministic() {
    let run = || grdm(&["fuzz", "--m", "3", "--trials", "10", "--seed", "7"]);
    let (a, b) = (run(), run());
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["failures"], 0);
    assert_eq!(v["seed"], 7);
    assert!(v["worst_margin"]["T2/grassmann-form"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn fuzz_usage_errors() {
    assert_eq!(grdm(&["fuzz", "--m", "7"]).status.code(), Some(2));
    assert_eq!(grdm(&["fuzz", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(
        grdm(&["fuzz", "--m", "3", "--tol", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(grdm(&["fuzz", "--m", "x"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_grdm"))
        .args(["fuzz", "--m", "2", "--trials", "2"])
        .env("GRDM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fuzz_respects_thread_cap() {
    let o = Command::new(env!("CARGO_BIN_EXE_grdm"))
        .args([
            "fuzz", "--m", "2", "--trials", "4", "--sector", "2", "--seed", "3",
        ])
        .env("GRDM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_contraction_dev"].as_f64().unwrap() < 1e-10);
}

#[test]
fn quasifree_command() {
    let dir = tempfile::tempdir().unwrap();
    let (input, out) = (dir.path().join("in.json"), dir.path().join("out.json"));
    let rho = random_density(3, 9, DensityOptions::default()).unwrap();
    let (g, _) = pdms_from_rho(&rho);
    write(&input, &vec![MatrixJson::gamma(&g)]);
    let o = grdm(&[
        "quasifree",
        "--in",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--max-points",
        "6",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["report"]["pdm1_max_dev"].as_f64().unwrap() <= 1e-9);
    assert!(v["report"]["wick_max_dev"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["report"]["points_checked"], 1956);
    let density: ElementJson = serde_json::from_value(v["density"].clone()).unwrap();
    let d = grdm_core::conditions::GrassmannDensity::new(density.to_element().unwrap()).unwrap();
    let back = grdm_core::conditions::pdm1_from_density(&d);
    assert!(grdm_core::linalg::max_abs_diff(&back.0, &g.0) < 1e-9);

    assert_eq!(
        grdm(&[
            "quasifree",
            "--in",
            input.to_str().unwrap(),
            "--max-points",
            "8"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn selftest_command() {
    let o = grdm(&["selftest", "--verbose"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().filter(|l| l.starts_with("PASS")).count(), 20);

    let o = grdm(&["selftest", "--flip-sign"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace-formula (m=1)"));
}
