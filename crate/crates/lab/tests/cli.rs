use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("canetoads-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_canetoads"));
    c.env_remove("CANETOADS_OUTPUT_DIR");
    c
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const SMALL: &str = "model = \"local\"\nt_end = 6.0\ndt = 0.1\nsave_every = 5\n";

fn write_config(dir: &std::path::Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn simulate_writes_artifacts_deterministically() {
    let d = scratch("sim");
    let cfg = write_config(&d, SMALL);
    let a = d.join("a");
    let b = d.join("b");
    for out in [&a, &b] {
        let o = bin().arg("simulate").arg(&cfg).arg("--output-dir").arg(out).output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["rho.csv", "colmax.csv", "fronts.csv", "final_contours.svg", "manifest.json"] {
        let x = fs::read(a.join(f)).unwrap();
        assert_eq!(x, fs::read(b.join(f)).unwrap(), "{f}");
    }
    let rho = fs::read_to_string(a.join("rho.csv")).unwrap();
    assert!(rho.starts_with("# canetoads rho\n# config-sha256 = "));
    assert!(rho.contains("# dt = 0.1\n"));
    assert!(rho.contains("# theta_max = 18.0  # default\n"));
    assert!(rho.contains("\nt,x,rho\n"));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["saved_slices"], 13);
    assert_eq!(m["config"]["model"], "local");
    assert!(m["supersolution"]["amplitude"].as_f64().unwrap() > 0.0);
    assert_eq!(m["files"].as_object().unwrap().len(), 4);
    assert!(m["final_max"].as_f64().unwrap() <= 1.0 + 1e-12);
}

#[test]
fn front_fit_reads_a_run() {
    let d = scratch("fit");
    let cfg = write_config(&d, SMALL);
    let o = bin().args(["--output-dir"]).arg(&d).arg("simulate").arg(&cfg).output().unwrap();
    assert!(o.status.success());
    let o = bin().arg("front-fit").arg(&d).args(["--window", "3,6", "--svg"]).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["source"], "field");
    assert!(v["exponent"].as_f64().unwrap() > 0.5);
    assert_eq!(v["envelope_violations"], 0);
    assert_eq!(v["level_sensitivity"].as_array().unwrap().len(), 2);
    assert!(d.join("front_fit.json").exists() && d.join("front_fit.svg").exists());
}

#[test]
fn config_errors_exit_one_and_name_keys() {
    let d = scratch("bad");
    let cfg = write_config(&d, "model = \"nonlocal\"\ndt = 0.0\nspeed = 2\n");
    let o = bin().arg("simulate").arg(&cfg).arg("--output-dir").arg(&d).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    for k in ["dt:", "theta_max:", "speed:"] {
        assert!(err.contains(k), "{k} missing from {err}");
    }
}

#[test]
fn missing_file_and_bad_args() {
    let o = bin().args(["simulate", "/nonexistent/run.toml"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["hj-eval", "--t", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().args(["hj-eval", "--t", "0", "--x", "-2", "--theta", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(bin().arg("--help").output().unwrap().status.success());
}

#[test]
fn environment_overrides_config_dir() {
    let d = scratch("env");
    let from_cfg = d.join("from-config");
    let from_env = d.join("from-env");
    let text = format!("{SMALL}[output]\ndir = \"{}\"\n", from_cfg.display());
    let cfg = write_config(&d, &text);
    let o = bin().arg("simulate").arg(&cfg).env("CANETOADS_OUTPUT_DIR", &from_env).output().unwrap();
    assert!(o.status.success());
    assert!(from_env.join("manifest.json").exists());
    assert!(!from_cfg.exists());
}

#[test]
fn hj_eval_json() {
    let o = bin().args(["hj-eval", "--t", "2", "--x", "-3", "--theta", "1.5"]).output().unwrap();
    assert!(o.status.success());
    let v = stdout_json(&o);
    let z = v["z"].as_f64().unwrap();
    assert!((z.powi(3) + 4.5 * z - 9.0).abs() < 1e-10);
}

#[test]
fn eigen_and_supersolution_commands() {
    let d = scratch("misc");
    let o = bin().args(["eigen", "--n", "41"]).output().unwrap();
    assert!(o.status.success());
    assert!((stdout_json(&o)["lambda"].as_f64().unwrap() - 5.78).abs() < 0.05);
    let o = bin().args(["eigen", "--family", "fixed", "--radius", "20", "--n", "41"]).output().unwrap();
    assert!(o.status.success());
    let o = bin().args(["eigen", "--family", "fixed", "--radius", "80", "--n", "41"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["verify-supersolution", "--samples", "2000", "--svg", "--output-dir"]).arg(&d).output().unwrap();
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["passed"], true);
    let svg = fs::read_to_string(d.join("supersolution_level_sets.svg")).unwrap();
    assert_eq!(svg.matches("<path").count(), 3);
}

#[test]
fn acceptance_subset() {
    let d = scratch("acc");
    let o = bin().args(["acceptance", "--only", "3,12", "--output-dir"]).arg(&d).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    assert!(d.join("acceptance.json").exists());
    let o = bin().args(["acceptance", "--only", "13"]).arg("--output-dir").arg(&d).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
