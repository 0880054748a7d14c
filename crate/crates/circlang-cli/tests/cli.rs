use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;
use tempfile::TempDir;

fn circlang(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circlang"))
        .args(args)
        .current_dir(dir)
        .env_remove("CIRCLANG_SEED")
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn row<'a>(report: &'a Value, quantity: &str) -> &'a Value {
    report["rows"].as_array().unwrap().iter().find(|r| r["quantity"] == quantity).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn constants_default_run_succeeds() {
    let dir = TempDir::new().unwrap();
    let out = circlang(dir.path(), &["constants"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("sigma ") && text.contains("theta_1"));
    assert!(dir.path().join(circlang_cli::DEFAULT_MANIFEST).exists());
}

#[test]
fn constants_json_schema() {
    let dir = TempDir::new().unwrap();
    let out = circlang(dir.path(), &["constants", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["command"], "constants");
    assert_eq!(report["passed"], true);
    for q in ["sigma", "sigma_prime", "theta_1", "c_squared", "f(pi^2,0)"] {
        let r = row(&report, q);
        assert!(r["value"].is_f64() && r["pass"].is_boolean(), "{q}");
    }
    let sigma = row(&report, "sigma")["value"].as_f64().unwrap();
    assert!((sigma - 1.2437697631083844).abs() < 1e-9);
}

#[test]
fn loose_tolerance_still_meets_bounds() {
    let dir = TempDir::new().unwrap();
    assert_eq!(circlang(dir.path(), &["constants", "--tol", "1e-1"]).status.code(), Some(0));
}

#[test]
fn kernel_regimes() {
    let dir = TempDir::new().unwrap();
    let out = circlang(dir.path(), &["kernel", "--eps", "0.1", "--w", "1", "--y", "0.08", "--z", "0.03", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(row(&json_stdout(&out), "regime")["value"], "NonDegenerate");
    let out = circlang(dir.path(), &["kernel", "--eps", "0.1", "--w", "0", "--y", "-0.05", "--z", "0", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(row(&json_stdout(&out), "regime")["value"], "DegenerateAxis");
}

#[test]
fn kernel_start_shift_equals_unshifted() {
    let dir = TempDir::new().unwrap();
    // Target reached from start (0.5, 1, -2) by the local move (1, 0.08, 0.03).
    let (s, c) = 0.5f64.sin_cos();
    let (y, z) = (1.0 + 0.08 * c - 0.03 * s, -2.0 + 0.08 * s + 0.03 * c);
    let (ys, zs) = (y.to_string(), z.to_string());
    let shifted = circlang(dir.path(), &["kernel", "--eps", "0.1", "--w", "1.5", "--y", &ys, "--z", &zs, "--start", "0.5,1,-2", "--json"]);
    let direct = circlang(dir.path(), &["kernel", "--eps", "0.1", "--w", "1", "--y", "0.08", "--z", "0.03", "--json"]);
    let a = row(&json_stdout(&shifted), "log_density")["value"].as_f64().unwrap();
    let b = row(&json_stdout(&direct), "log_density")["value"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-9 * b.abs(), "{a} vs {b}");
}

#[test]
fn kernel_refuses_targets_outside_support() {
    let dir = TempDir::new().unwrap();
    let out = circlang(dir.path(), &["kernel", "--eps", "0.1", "--w", "1", "--y", "0.5", "--z", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn usage_and_domain_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(circlang(dir.path(), &["kernel", "--w", "1"]).status.code(), Some(2));
    assert_eq!(circlang(dir.path(), &["kernel", "--eps", "0.1", "--w", "1", "--y", "0", "--z", "0", "--start", "1,2"]).status.code(), Some(2));
    let out = circlang(dir.path(), &["kernel", "--eps", "1", "--w", "0", "--y", "0.1", "--z", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("case (iii)"));
}

#[test]
fn manifest_is_key_sorted_and_complete() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("run.json");
    let out = circlang(dir.path(), &["kernel", "--eps", "0.1", "--w", "1", "--y", "0.08", "--z", "0.03", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let keys = ["command", "outputs", "parameters", "seed", "versions", "wall_time"];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
    let m = read_json(&path);
    assert_eq!(m["command"], "kernel");
    assert_eq!(m["parameters"]["eps"].as_f64(), Some(0.1));
    assert!(text.contains("1.0000000000000001e-1"), "17 significant digits: {text}");
}

#[test]
fn seed_precedence_flag_env_default() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("m.json");
    let mpath = m.to_str().unwrap();
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_circlang"));
        cmd.args(["constants", "--tol", "1e-1", "--manifest", mpath]).current_dir(dir.path()).env_remove("CIRCLANG_SEED");
        if let Some(v) = env {
            cmd.env("CIRCLANG_SEED", v);
        }
        if let Some(v) = flag {
            cmd.args(["--seed", v]);
        }
        assert!(cmd.status().unwrap().success());
        read_json(&m)["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("17"), None), 17);
    assert_eq!(run(Some("17"), Some("23")), 23);
}

#[test]
fn export_kernel_csv() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("kernel.csv");
    let out = circlang(dir.path(), &["export", "kernel", "--out", path.to_str().unwrap(), "--count", "12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let mut rd = csv::Reader::from_path(&path).unwrap();
    let headers = rd.headers().unwrap().clone();
    assert_eq!(&headers[0], "eps [time]");
    assert_eq!(&headers[3], "exponent [nats]");
    let exps: Vec<f64> = rd.records().map(|r| r.unwrap()[3].parse().unwrap()).collect();
    assert_eq!(exps.len(), 12);
    assert!(exps.windows(2).all(|w| w[1] > w[0]));
    assert!(dir.path().join("kernel.csv.manifest.json").exists());
}

#[test]
fn export_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("phi.json");
    let out = circlang(dir.path(), &["export", "phi", "--format", "json", "--out", path.to_str().unwrap(), "--count", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = read_json(&path);
    assert_eq!(doc["command"], "export");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 5);
    let x = doc["rows"][4]["x [1]"].as_f64().unwrap();
    let m = doc["rows"][4]["abs_phi [1]"].as_f64().unwrap();
    let direct = circlang::specfun::phi_lift_polar(0.0, x).unwrap();
    assert_eq!(m.to_bits(), direct.modulus.to_bits());
    let reparsed: Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(reparsed, doc);
}

#[test]
fn replay_reproduces_export_bit_exactly() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("wstar.csv");
    assert!(circlang(dir.path(), &["export", "wstar", "--out", path.to_str().unwrap(), "--count", "30", "--from", "0.3"]).status.success());
    let first = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let manifest = dir.path().join("wstar.csv.manifest.json");
    let out = circlang(dir.path(), &["replay", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

fn details(out: &Output) -> Vec<(Value, Value, Value)> {
    json_stdout(out)["rows"].as_array().unwrap().iter().map(|r| (r["id"].clone(), r["result"].clone(), r["detail"].clone())).collect()
}

#[test]
fn mc_suite_is_seed_and_worker_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = ["validate", "mc", "--paths", "3000", "--steps", "32", "--seed", "9", "--json"];
    let a = circlang(dir.path(), &args);
    let b = circlang(dir.path(), &[&args[..], &["--workers", "3"]].concat());
    assert!(matches!(a.status.code(), Some(0 | 1)));
    assert_eq!(details(&a), details(&b));
    let c = circlang(dir.path(), &["validate", "mc", "--paths", "3000", "--steps", "32", "--seed", "10", "--json"]);
    assert_ne!(details(&a), details(&c));
}

#[test]
fn fast_suite_runs_within_budget() {
    let dir = TempDir::new().unwrap();
    let t = Instant::now();
    let out = circlang(dir.path(), &["validate", "fast", "--json"]);
    assert!(t.elapsed() < Duration::from_secs(60));
    assert!(matches!(out.status.code(), Some(0 | 1)));
    let ids: Vec<u64> = json_stdout(&out)["rows"].as_array().unwrap().iter().map(|r| r["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, vec![1, 2, 3, 4, 5, 6, 8, 10, 12, 14]);
}
