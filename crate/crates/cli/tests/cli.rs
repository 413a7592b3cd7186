//! End-to-end tests of the `dirac-halfplane` binary.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use dirac_halfplane::BoundaryCondition;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dirac-halfplane"));
    // Keep the environment of the test runner out of the precedence chain.
    for (k, _) in std::env::vars() {
        if k.starts_with("DHP_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("invalid JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write_bc(dir: &Path, name: &str, a0: [[f64; 4]; 2], a1: [[f64; 4]; 2]) -> String {
    let m = |a: [[f64; 4]; 2]| -> Value { serde_json::json!(a.map(|row| row.map(|x| [x, 0.0]))) };
    let v = serde_json::json!({"A0": m(a0), "A1": m(a1)});
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn edge_branches(csv_bytes: &[u8]) -> (usize, usize) {
    let mut rdr = csv::Reader::from_reader(csv_bytes);
    assert_eq!(rdr.headers().unwrap(), vec!["kx", "omega", "branch_id", "kind"]);
    let mut ids = BTreeSet::new();
    let mut band = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        match &rec[3] {
            "edge" => {
                ids.insert(rec[2].to_string());
            }
            "band_upper" | "band_lower" => {
                assert!(rec[2].is_empty());
                band += 1;
            }
            other => panic!("unexpected kind {other}"),
        }
    }
    (ids.len(), band)
}

#[test]
fn help_documents_environment_and_exit_codes() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("DHP_"), "{text}");
    assert!(text.contains("Exit codes"), "{text}");
    for cmd in ["classify", "spectrum", "winding", "verify", "sweep"] {
        assert!(text.contains(cmd), "{cmd} missing");
    }
    assert!(!text.contains("corrupt"));
}

#[test]
fn classify_dirichlet_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dirichlet.json");
    std::fs::write(&path, serde_json::to_string(&BoundaryCondition::dirichlet()).unwrap()).unwrap();
    let out = run(&["classify", "--bc", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["tag"], "A12");
    assert_eq!(v["params"]["b11"], serde_json::json!([0.0, 0.0]));
}

#[test]
fn classify_rejects_cell_13_and_rank_one() {
    let dir = tempfile::tempdir().unwrap();
    let zero = [[0.0; 4]; 2];
    let cell13 = write_bc(dir.path(), "c13.json", [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]], zero);
    assert_eq!(code(&run(&["classify", "--bc", &cell13])), 2);
    let rank1 = write_bc(dir.path(), "r1.json", [[1.0, 0.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]], zero);
    assert_eq!(code(&run(&["classify", "--bc", &rank1])), 3);
}

#[test]
fn usage_and_io_errors_have_their_own_codes() {
    assert_eq!(code(&run(&[])), 4);
    assert_eq!(code(&run(&["classify"])), 4);
    assert_eq!(code(&run(&["classify", "--example", "b", "--bc", "x.json"])), 4);
    assert_eq!(code(&run(&["--eps", "0.9", "classify", "--example", "a"])), 4);
    assert_eq!(code(&run(&["--delta-seq", "1e-6,1e-5", "verify", "--example", "a"])), 4);
    assert_eq!(code(&run(&["classify", "--class", "A14", "--param", "alpha=0.5i"])), 4);
    assert_eq!(code(&run(&["classify", "--example", "a", "--format", "csv"])), 4);
    assert_eq!(code(&run(&["classify", "--bc", "/nonexistent/bc.json"])), 6);
    assert_eq!(code(&run(&["classify", "--example", "a", "--out", "/nonexistent/dir/out.json"])), 6);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"A0\": 1}").unwrap();
    assert_eq!(code(&run(&["classify", "--bc", bad.to_str().unwrap()])), 4);
}

#[test]
fn classify_from_class_parameters() {
    let out = run(&["classify", "--class", "a34", "--param", "alpha1=1", "--param", "alpha2=1", "--param", "a12=1",
        "--param", "beta1=4", "--param", "beta2=-4", "--param", "b12=-1i"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["tag"], "A34");
    assert_eq!(v["params"]["b12"], serde_json::json!([0.0, -1.0]));
}

#[test]
fn spectrum_branch_counts() {
    for (example, expected) in [("dirichlet", 1), ("b", 3)] {
        let out = run(&["spectrum", "--example", example]);
        assert_eq!(code(&out), 0);
        let (branches, band) = edge_branches(&out.stdout);
        assert_eq!(branches, expected, "{example}");
        assert_eq!(band, 2 * 801);
    }
}

#[test]
fn spectrum_without_edge_modes_has_band_rows_only() {
    let out = run(&["spectrum", "--example", "a-plus", "--kx-window", "0.01", "--n-kx", "11"]);
    assert_eq!(code(&out), 0);
    assert_eq!(edge_branches(&out.stdout), (0, 22));
}

#[test]
fn spectrum_json_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    let out = run(&["spectrum", "--example", "a", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["branches"].as_array().unwrap().len(), 2);
    assert_eq!(v["n_b"], 2);
}

#[test]
fn verify_reference_conditions() {
    let out = run(&["verify", "--example", "dirichlet"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["consistent"], true);
    assert_eq!(v["C_plus"], 1);

    let out = run(&["verify", "--example", "a"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["consistent"], true);
    assert_eq!(v["w_inf"], -1);
    assert_eq!(v["n_b"], 2);
    assert_eq!(v["class"], "A14");
}

#[test]
fn corrupted_prediction_fails_verification() {
    let out = run(&["verify", "--example", "dirichlet", "--corrupt-prediction"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["consistent"], false);
    assert_eq!(v["predicted"], 1);
    assert_eq!(v["w_inf"], 0);
}

#[test]
fn winding_commands_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = run(&["winding", "chern", "--example", "b", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["snapped"], 1);
    assert!(v.get("trace").is_none());
    let mut rdr = csv::Reader::from_path(&trace).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "kx", "kappa", "re_s", "im_s", "cumulative_arg"]);
    let last: Vec<f64> = rdr.records().last().unwrap().unwrap().iter().map(|x| x.parse().unwrap()).collect();
    assert!((last[5] - 1.0).abs() < 0.1);

    let out = run(&["winding", "chern", "--example", "a", "--loop-semi-axes", "2,0.5"]);
    assert_eq!(json(&out)["snapped"], 1);
    assert_eq!(json(&run(&["winding", "levinson", "--example", "b"]))["snapped"], 3);
    assert_eq!(json(&run(&["winding", "infinity", "--example", "b"]))["snapped"], -2);
}

#[test]
fn non_snapping_winding_exits_numerical() {
    // A single coarse level with a tight snapping tolerance cannot settle.
    let out = run(&["--lambda-seq", "0.5", "--delta-seq", "0.3", "--snap-tol", "1e-12", "winding", "infinity", "--example", "b"]);
    assert_eq!(code(&out), 5, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["snapped"], Value::Null);
}

#[test]
fn sweep_schema() {
    let out = run(&["sweep", "--samples", "3", "--seed", "42"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["match_rate"].is_number());
    assert!(v["identity_rate"].is_number());
    assert_eq!(v["seed"], 42);
    assert_eq!(v["samples"].as_array().unwrap().len(), 21);
    let classes = v["classes"].as_object().unwrap();
    assert_eq!(classes.len(), 7);
    assert!(classes.values().all(|c| c["samples"] == 3));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args: [&[&str]; 3] = [
        &["spectrum", "--example", "b", "--n-kx", "201"],
        &["verify", "--example", "b"],
        &["sweep", "--samples", "1", "--seed", "7"],
    ];
    for a in args {
        let first = run(a);
        let second = run(a);
        assert_eq!(code(&first), 0);
        assert!(first.stdout == second.stdout, "{a:?} differs between runs");
    }
}

fn band_centre(out: &Output) -> f64 {
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    for rec in rdr.records() {
        let rec = rec.unwrap();
        if &rec[3] == "band_upper" && rec[0].parse::<f64>().unwrap() == 0.0 {
            return rec[1].parse().unwrap();
        }
    }
    panic!("no band row at kx = 0: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn flags_beat_environment_beat_config_file() {
    // The band limit at kx = 0 equals m, which makes the resolved mass visible.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "m = 2.0\neps = 0.05\nkx_window = 1.0\nn_kx = 3\n").unwrap();
    let base = ["spectrum", "--example", "a-plus", "--config", cfg.to_str().unwrap()];

    let out = bin().args(base).output().unwrap();
    assert_eq!(band_centre(&out), 2.0);
    let out = bin().args(base).env("DHP_M", "3").output().unwrap();
    assert_eq!(band_centre(&out), 3.0);
    let out = bin().args(base).args(["--m", "0.5"]).env("DHP_M", "3").output().unwrap();
    assert_eq!(band_centre(&out), 0.5);
    let out = bin().args(["spectrum", "--example", "a-plus", "--kx-window", "1", "--n-kx", "3"]).output().unwrap();
    assert_eq!(band_centre(&out), 1.0);

    let out = bin().args(["spectrum", "--example", "a-plus", "--n-kx", "3"]).env("DHP_CONFIG", cfg.to_str().unwrap()).output().unwrap();
    assert_eq!(band_centre(&out), 2.0);

    std::fs::write(&cfg, "mass = 2.0\n").unwrap();
    assert_eq!(code(&bin().args(base).output().unwrap()), 4);
    assert_eq!(code(&run(&["classify", "--example", "a", "--config", "/nonexistent.toml"])), 6);
}

#[test]
fn floats_are_written_with_seventeen_digits() {
    let out = run(&["spectrum", "--example", "a-plus", "--kx-window", "1", "--n-kx", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().nth(1).unwrap();
    let kx = first.split(',').next().unwrap();
    assert_eq!(kx, "-1.0000000000000000e0");
}
