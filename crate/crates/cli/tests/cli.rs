use std::process::{Command, Output};

use serde_json::Value;

fn witsen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_witsen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn bounds_at_benchmark_point() {
    let v = json_of(&witsen(&["bounds", "--m", "1", "--k", "0.01", "--sigma0", "500"]));
    let lower = v["lower_finite"]["value"].as_f64().unwrap();
    assert!((lower / 3.170e-4 - 1.0).abs() < 0.02, "lower {lower}");
    let upper = v["best_upper"]["value"].as_f64().unwrap();
    assert!(upper >= lower);
    assert!((v["ratio"].as_f64().unwrap() - upper / lower).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["bounds", "--k", "-1", "--sigma0", "5"][..],
        &["bounds", "--sigma0", "5"],
        &["bounds", "--m", "3", "--lattice", "hex", "--k", "1", "--sigma0", "1"],
        &["sweep", "--k-range", "1,0"],
        &["simulate", "--sigma0", "5", "--strategy", "zero-input", "--decoder", "packing-sphere"],
        &["scalar-exact", "--m", "2", "--k", "1", "--sigma0", "1"],
        &["frobnicate"],
        &["bounds", "--format", "xml"],
    ] {
        let out = witsen(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn verify_exit_codes() {
    let out = witsen(&["verify", "--suite", "specfn", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = witsen(&["verify", "--suite", "case-analysis", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let args = ["simulate", "--m", "2", "--lattice", "hex", "--k", "0.3", "--sigma0", "4", "--P", "2", "--n", "50000", "--seed", "7"];
    let a = witsen(&args);
    let b = witsen(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["estimate"]["seed"], 7);
    assert!(v["analytic"]["upper_lattice"].is_number());
}

#[test]
fn zero_input_simulation_matches_closed_form() {
    let v = json_of(&witsen(&["simulate", "--m", "1", "--strategy", "zero-input", "--sigma0", "5", "--n", "200000"]));
    let est = &v["estimate"];
    let mean = est["total_mean"].as_f64().unwrap();
    let se = est["stderr"].as_f64().unwrap();
    assert!((mean - 25.0 / 26.0).abs() < 4.0 * se, "{mean} ± {se}");
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"k": 0.2, "sigma0": 5, "m": 2, "lattice": "hex"}"#).unwrap();
    let c = cfg.to_str().unwrap();

    let from_cfg = json_of(&witsen(&["bounds", "--config", c]));
    assert_eq!(from_cfg["m"], 2);
    assert_eq!(from_cfg["lattice"], "hex");
    assert_eq!(from_cfg["k"].as_f64(), Some(0.2));

    let flag_wins = json_of(&witsen(&["bounds", "--config", c, "--k", "0.5", "--m", "1", "--lattice", "grid"]));
    assert_eq!(flag_wins["k"].as_f64(), Some(0.5));
    assert_eq!(flag_wins["m"], 1);
    assert_eq!(flag_wins["sigma0"].as_f64(), Some(5.0));

    std::fs::write(&cfg, r#"{"k": 0.2, "sigma": 5}"#).unwrap();
    assert_eq!(witsen(&["bounds", "--config", c]).status.code(), Some(2));
}

#[test]
fn sweep_csv_schema_and_footer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let p = path.to_str().unwrap();
    let args = ["sweep", "--m", "1", "--k-range=-1,0,3", "--sigma0-range=0,2,3", "--out", p];
    assert!(witsen(&args).status.success());
    let first = std::fs::read(&path).unwrap();
    assert!(witsen(&args).status.success());
    assert_eq!(first, std::fs::read(&path).unwrap());

    let text = String::from_utf8(first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,k,sigma0,upper,upper_branch,P_upper,lower,P_lower,sigmaG_sq,L,ratio,status");
    assert_eq!(lines.len(), 1 + 9 + 1);
    let ratio = |l: &str| l.split(',').nth(10).unwrap().parse::<f64>().unwrap();
    let worst = lines[1..10].iter().map(|l| ratio(l)).fold(f64::MIN, f64::max);
    let footer = lines[10];
    assert!(footer.ends_with(",max_ratio"));
    assert_eq!(ratio(footer), worst);
    for l in &lines[1..10] {
        assert!(l.ends_with(",ok"), "{l}");
        assert!(ratio(l) >= 1.0);
    }
}

#[test]
fn scalar_exact_at_fixed_delta() {
    let v = json_of(&witsen(&["scalar-exact", "--k", "0.2", "--sigma0", "5", "--delta", "4"]));
    assert_eq!(v["optimized"], false);
    let cost = &v["cost"];
    let total = cost["total"].as_f64().unwrap();
    let sum = cost["j1"].as_f64().unwrap() + cost["j2"].as_f64().unwrap();
    assert!((total - sum).abs() < 1e-15);

    let mle = json_of(&witsen(&["scalar-exact", "--k", "0.2", "--sigma0", "5", "--delta", "4", "--decoder", "mle"]));
    assert!(mle["cost"]["j2"].as_f64().unwrap() >= cost["j2"].as_f64().unwrap());
}
