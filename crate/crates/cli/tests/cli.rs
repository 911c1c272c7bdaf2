use std::path::Path;
use std::process::Command;

use serde_json::Value;
use slagkit_cli::export::parse_curve_csv;
use slagkit_cli::{run, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION};

fn run_in(dir: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["slagkit".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.extend(["--output-dir".to_string(), dir.to_str().unwrap().to_string()]);
    run(argv)
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn assert_report_shape(v: &Value) {
    assert_eq!(v["schema_version"], 1);
    for key in ["command", "parameters", "checks", "values", "pass"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        for key in ["name", "tolerance", "max_residual", "pass"] {
            assert!(c.get(key).is_some(), "check missing {key}");
        }
    }
    let all = checks.iter().all(|c| c["pass"] == true);
    assert_eq!(v["pass"], all);
}

#[test]
fn special_gamma_curve_is_exported() {
    let dir = tempfile::tempdir().unwrap();
    let code = run_in(
        dir.path(),
        &["curve", "gamma", "--p", "1", "--q", "0", "--special", "--t-max", "10", "--out", "g.csv", "--report", "g.json"],
    );
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,re1,im1,re2,im2,residual_conserved,residual_line");
    let rows = parse_curve_csv(&text).unwrap();
    assert_eq!(rows.len(), 401);
    assert_eq!(rows[0].t, -10.0);
    assert_eq!(rows[400].t, 10.0);
    assert_report_shape(&json(&dir.path().join("g.json")));
}

#[test]
fn membership_report_passes() {
    let dir = tempfile::tempdir().unwrap();
    let code = run_in(dir.path(), &["verify", "corollary2", "--p", "1", "--q", "0", "--a", "1,1", "--grid", "50x50"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&dir.path().join("report.json"));
    assert_report_shape(&v);
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["tolerance"], 1e-8);
        assert!(c["max_residual"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn zero_regularizer_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_slagkit"))
        .args(["pde", "solve", "--p", "1", "--q", "0", "--a1", "0", "--a2", "0.5", "--boundary", "product"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("--a1") && msg.contains("strictly positive"), "{msg}");
}

#[test]
fn usage_errors_name_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run_in(d, &["curve", "alpha", "--p", "1", "--q", "0", "--init", "1,-1"]), EXIT_USAGE);
    assert_eq!(run_in(d, &["curve", "alpha", "--p", "1", "--q", "0", "--init", "1"]), EXIT_USAGE);
    assert_eq!(run_in(d, &["curve", "alpha", "--p", "1", "--q", "0", "--init", "1,1", "--tol", "0"]), EXIT_USAGE);
    assert_eq!(run_in(d, &["curve", "alpha", "--p", "1", "--q", "0", "--init", "1,1", "--bogus", "3"]), EXIT_USAGE);
    assert_eq!(
        run_in(d, &["surface", "product", "--p", "0", "--q", "0", "--a", "1,1", "--special", "--projection", "xyz"]),
        EXIT_USAGE
    );
    assert_eq!(run_in(d, &["orbit", "--variant", "gl", "--n", "1"]), EXIT_USAGE);
    assert_eq!(
        run_in(d, &["ambient", "product", "--p", "2", "--q", "0", "--psi", "circle", "--phi", "point"]),
        EXIT_USAGE
    );
    assert_eq!(run_in(d, &["pde", "solve", "--p", "0", "--q", "0", "--a1", "1", "--a2", "1", "--boundary", "sextic"]), EXIT_USAGE);
    assert!(std::fs::read_dir(d).unwrap().next().is_none());
}

#[test]
fn outputs_are_deterministic() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "surface", "product", "--p", "1", "--q", "1", "--a", "1,2", "--b", "0.9,0.8", "--grid", "20x30",
        "--projection", "moduli-phase", "--report", "s.json",
    ];
    assert_eq!(run_in(d1.path(), &args), EXIT_OK);
    assert_eq!(run_in(d2.path(), &args), EXIT_OK);
    for f in ["surface.obj", "s.json"] {
        assert_eq!(std::fs::read(d1.path().join(f)).unwrap(), std::fs::read(d2.path().join(f)).unwrap());
    }
    let obj = std::fs::read_to_string(d1.path().join("surface.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 600);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 19 * 29);

    let orbit = ["orbit", "--variant", "sym", "--n", "2", "--seed", "7", "--draws", "20"];
    assert_eq!(run_in(d1.path(), &orbit), EXIT_OK);
    assert_eq!(run_in(d2.path(), &orbit), EXIT_OK);
    assert_eq!(std::fs::read(d1.path().join("orbit.json")).unwrap(), std::fs::read(d2.path().join("orbit.json")).unwrap());
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = d.join("alpha.toml");
    std::fs::write(&cfg, "p = 2\nq = 3\ninit = [1, 2]\nt-max = 1.0\nout = \"from_config.csv\"\n").unwrap();
    assert_eq!(run_in(d, &["curve", "alpha", "--config", cfg.to_str().unwrap()]), EXIT_OK);
    let flags = ["curve", "alpha", "--p", "2", "--q", "3", "--init", "1,2", "--t-max", "1.0", "--out", "from_flags.csv"];
    assert_eq!(run_in(d, &flags), EXIT_OK);
    assert_eq!(std::fs::read(d.join("from_config.csv")).unwrap(), std::fs::read(d.join("from_flags.csv")).unwrap());

    let bad = d.join("bad.toml");
    std::fs::write(&bad, "p = 2\nq = 3\ninit = [1, 2]\nunknown-key = 1\n").unwrap();
    assert_eq!(run_in(d, &["curve", "alpha", "--config", bad.to_str().unwrap()]), EXIT_USAGE);
    assert_eq!(run_in(d, &["curve", "alpha", "--config", d.join("missing.toml").to_str().unwrap()]), EXIT_USAGE);
}

#[test]
fn non_legendrian_factor_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let code = run_in(dir.path(), &["ambient", "product", "--p", "1", "--q", "0", "--psi", "hopf", "--phi", "point"]);
    assert_eq!(code, EXIT_VERIFICATION);
    let v = json(&dir.path().join("ambient.json"));
    assert_report_shape(&v);
    assert_eq!(v["pass"], false);
    assert_eq!(v["checks"][0]["max_residual"], Value::Null);

    let code = run_in(dir.path(), &["verify", "legendrian", "--map", "hopf", "--dim", "1"]);
    assert_eq!(code, EXIT_VERIFICATION);
    assert_eq!(json(&dir.path().join("report.json"))["pass"], false);
}

#[test]
fn ambient_and_orbit_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        run_in(d, &["ambient", "product", "--p", "2", "--q", "1", "--psi", "torus", "--phi", "circle", "--samples", "100"]),
        EXIT_OK
    );
    assert_report_shape(&json(&d.join("ambient.json")));
    assert_eq!(run_in(d, &["ambient", "cone", "--n", "3", "--psi", "torus", "--out", "cone.json"]), EXIT_OK);
    for variant in ["gl", "sym", "skew"] {
        let out = format!("{variant}.json");
        assert_eq!(run_in(d, &["orbit", "--variant", variant, "--n", "2", "--out", &out]), EXIT_OK);
        assert_report_shape(&json(&d.join(&out)));
    }
    assert_eq!(run_in(d, &["verify", "legendrian", "--map", "sphere", "--dim", "3"]), EXIT_OK);
}

#[test]
fn curve_family_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run_in(d, &["curve", "alpha", "--p", "0", "--q", "0", "--init", "1,1", "--t-max", "1", "--samples", "1"]), EXIT_OK);
    assert_eq!(parse_curve_csv(&std::fs::read_to_string(d.join("curve.csv")).unwrap()).unwrap().len(), 3);
    assert_eq!(run_in(d, &["curve", "gamma-c", "--n", "3", "--c", "0", "--s-range", "0.5,2"]), EXIT_OK);
    assert_eq!(run_in(d, &["curve", "gamma-c", "--n", "3", "--c", "0", "--s-range", "-1,1", "--samples", "3"]), EXIT_USAGE);
    assert_eq!(run_in(d, &["curve", "period", "--p", "0", "--q", "0", "--init", "1,0.5"]), EXIT_OK);
    let v = json(&d.join("period.json"));
    assert!((v["values"]["period"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-8);
    assert_eq!(v["values"]["closed"], serde_json::json!(["1/2", "1/2"]));
    assert_eq!(run_in(d, &["verify", "conservation", "--p", "2", "--q", "1", "--init", "1,0.7"]), EXIT_OK);
    assert_eq!(
        run_in(d, &["verify", "angle", "--p", "2", "--q", "3", "--a", "1,2", "--b", "0.9,0.8", "--out", "angle.json"]),
        EXIT_OK
    );
}

#[test]
fn curvature_and_pde_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run_in(d, &["verify", "curvature", "--out", "curvature.json"]), EXIT_OK);
    let v = json(&d.join("curvature.json"));
    assert_report_shape(&v);
    let ratio = v["values"]["ratio"].as_f64().unwrap();
    assert!((3.5..=4.5).contains(&ratio));
    assert_eq!(run_in(d, &["verify", "curvature", "--grid", "50x50"]), EXIT_USAGE);

    assert_eq!(run_in(d, &["verify", "pde", "--boundary", "exp-sin", "--out", "pde.json"]), EXIT_OK);
    assert_report_shape(&json(&d.join("pde.json")));
}

#[test]
fn pde_solve_from_catalog_and_edge_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = [
        "pde", "solve", "--p", "1", "--q", "0", "--a1", "0.5", "--a2", "0.5", "--boundary", "product", "--domain",
        "1,2,1,2", "--grid", "17x17", "--report", "solve.json",
    ];
    assert_eq!(run_in(d, &args), EXIT_OK);
    let v = json(&d.join("solve.json"));
    assert_report_shape(&v);
    assert!(!v["values"]["log"].as_array().unwrap().is_empty());
    let h = std::fs::read_to_string(d.join("potential.csv")).unwrap();
    assert_eq!(h.lines().count(), 1 + 17 * 17);

    let mut edges = String::from("edge,k,value\n");
    let f = |x: f64, y: f64| x * y + 2.0 * x - y;
    let n = 9;
    for k in 0..n {
        let u = 1.0 + k as f64 / (n - 1) as f64;
        edges.push_str(&format!("bottom,{k},{}\ntop,{k},{}\nleft,{k},{}\nright,{k},{}\n", f(u, 1.0), f(u, 2.0), f(1.0, u), f(2.0, u)));
    }
    std::fs::write(d.join("edges.csv"), edges).unwrap();
    let edge_path = d.join("edges.csv");
    let edge_args = [
        "pde", "solve", "--p", "2", "--q", "1", "--a1", "1", "--a2", "1", "--boundary-file",
        edge_path.to_str().unwrap(), "--domain", "1,2,1,2", "--out", "edge.csv",
    ];
    assert_eq!(run_in(d, &edge_args), EXIT_OK);
    let text = std::fs::read_to_string(d.join("edge.csv")).unwrap();
    let mut worst = 0.0f64;
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        worst = worst.max((v[2] - f(v[0], v[1])).abs());
    }
    assert!(worst < 1e-10);

    let nonconv = [
        "pde", "solve", "--p", "1", "--q", "0", "--a1", "0.5", "--a2", "0.5", "--boundary", "exp-sin", "--max-iter",
        "1", "--tol", "1e-14", "--grid", "9x9", "--report", "fail.json",
    ];
    assert_eq!(run_in(d, &nonconv), EXIT_VERIFICATION);
    assert_eq!(json(&d.join("fail.json"))["pass"], false);
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run(["slagkit", "--help"]), EXIT_OK);
    assert_eq!(run(["slagkit"]), EXIT_USAGE);
}
