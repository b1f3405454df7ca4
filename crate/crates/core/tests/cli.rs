use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn brp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brp")).args(args).output().expect("spawn brp")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn check_algebra_passes_and_mutation_is_caught() {
    let ok = brp(&["check-algebra", "--n", "3", "--d", "2"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));

    let bad = brp(&["check-algebra", "--n", "3", "--d", "2", "--mutate"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8_lossy(&bad.stdout);
    assert!(text.contains("ck_coproduct_matches_cut_enumeration"), "{text}");
}

#[test]
fn exact_lift_then_solve_with_constant_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "x.json", &json!({"times": [0, 1, 2], "values": [[0, 0], ["1/2", 1], ["3/2", "2/3"]]}));
    let rough = dir.path().join("rough.json");
    let out = brp(&["lift", "--exact", "--input", &path, "--p", "2.5", "--out", rough.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // f_1 = 1, f_2 = 2 on ℝ: the solution is ξ + X¹ + 2X² exactly.
    let field = write(
        dir.path(),
        "f.json",
        &json!({"e": 1, "d": 2, "components": [
            {"monomials": [{"exponents": [0], "coeff": 1}]},
            {"monomials": [{"exponents": [0], "coeff": 2}]},
        ], "box": [[-5, 5]]}),
    );
    let sol = dir.path().join("sol.json");
    let out = brp(&["solve", "--exact", "--rough", rough.to_str().unwrap(), "--field", &field, "--xi", "1/3", "--out", sol.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let traj = &read(&sol)["trajectory"];
    assert_eq!(traj[2][0], json!("19/6"));

    let out = brp(&["solve", "--exact", "--backend", "geodesic", "--rough", rough.to_str().unwrap(), "--field", &field, "--xi", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn realize_reproduces_the_increment() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "x.json", &json!({"times": [0, 1, 2, 3], "values": [[0, 0], [0.3, 0.1], [-0.2, 0.4], [0.1, -0.5]]}));
    let rough = dir.path().join("rough.json");
    assert_eq!(brp(&["lift", "--input", &path, "--p", "2.5", "--out", rough.to_str().unwrap()]).status.code(), Some(0));
    let r = dir.path().join("r.json");
    let out = brp(&["realize", "--input", rough.to_str().unwrap(), "--out", r.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(read(&r)["residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let low_gamma = write(dir.path(), "a.json", &json!({"p": 2.5, "gamma": 2.0}));
    let unknown = write(dir.path(), "b.json", &json!({"instancs": 3}));
    for c in [&low_gamma, &unknown] {
        let out = brp(&["exp-ode-bounds", "--config", c]);
        assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(brp(&["exp-ode-bounds", "--exact"]).status.code(), Some(2));
    assert_eq!(brp(&["lift", "--input", "/nonexistent.json", "--p", "2"]).status.code(), Some(2));
}

#[test]
fn experiment_writes_stamped_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &json!({"instances": 4}));
    let out_dir = dir.path().join("out");
    let out = brp(&["exp-ode-bounds", "--config", &cfg, "--seed", "5", "--threads", "2", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read(&out_dir.join("ode_bounds.json"));
    assert_eq!(report["config"]["seed"], json!(5));
    assert_eq!(report["stamp"]["config_sha256"].as_str().unwrap().len(), 64);
    assert!(out_dir.join("ode_bounds_instances.csv").exists());
}
