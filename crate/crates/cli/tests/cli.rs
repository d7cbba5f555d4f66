use std::path::Path;
use std::process::Command;

use rgf_cli::commands::{run_traces, variance_rows};
use rgf_cli::config::RunConfig;
use rgf_core::estimators::EstimatorMode;
use sha2::{Digest, Sha256};

const SPIN: &str = r#"
schema_version = 1
seed = 11

[model]
kind = "heisenberg"
length = 4

[plan]
total_time = 2.0
steps = 10

[estimator]
total_shots = 512

[observables]
readout_sites = [0, 1, 2, 3]

[dsf]
omega_max = 10.0
omega_points = 41
"#;

const HUBBARD: &str = r#"
schema_version = 1
seed = 5

[model]
kind = "hubbard"
sites = 2
interaction = 4.0

[plan]
total_time = 1.0
steps = 6

[estimator]
total_shots = 256

[observables]
readout_sites = [0]
"#;

fn rgf(args: &[&str], config: &str, out: &Path) -> std::process::Output {
    let path = out.with_extension("toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_rgf"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(out)
        .env_remove("RGF_SEED")
        .env_remove("RGF_OUT")
        .output()
        .unwrap()
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn same_seed_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    for cmd in ["scp", "lcp", "fd"] {
        let (a, b) = (tmp.path().join(format!("{cmd}-a")), tmp.path().join(format!("{cmd}-b")));
        assert!(rgf(&[cmd], SPIN, &a).status.success());
        assert!(rgf(&[cmd], SPIN, &b).status.success());
        let (fa, fb) = (read_dir(&a), read_dir(&b));
        assert_eq!(fa.len(), 4, "{cmd}");
        assert_eq!(fa, fb, "{cmd}");
    }
    let c = tmp.path().join("scp-c");
    assert!(rgf(&["scp", "--seed", "12"], SPIN, &c).status.success());
    assert_ne!(read_dir(&tmp.path().join("scp-a")), read_dir(&c));
}

#[test]
fn seed_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("c.toml");
    std::fs::write(&path, SPIN).unwrap();
    let run = |seed: &str, out: &str| {
        let run = Command::new(env!("CARGO_BIN_EXE_rgf"))
            .args(["scp", "--config"])
            .arg(&path)
            .env("RGF_SEED", seed)
            .env("RGF_OUT", tmp.path().join(out))
            .output()
            .unwrap();
        assert!(run.status.success());
        read_dir(&tmp.path().join(out))
    };
    assert_eq!(run("12", "env"), read_dir_after(tmp.path(), "flag", &["scp", "--seed", "12"]));
}

fn read_dir_after(root: &Path, name: &str, args: &[&str]) -> Vec<(String, Vec<u8>)> {
    let out = root.join(name);
    assert!(rgf(args, SPIN, &out).status.success());
    read_dir(&out)
}

#[test]
fn manifest_hashes_every_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("m");
    assert!(rgf(&["scp"], SPIN, &out).status.success());
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["config"]["model"]["length"], 4);
    let files = manifest["files"].as_array().unwrap();
    let on_disk = read_dir(&out);
    assert_eq!(files.len(), on_disk.len());
    for (name, bytes) in on_disk {
        let entry = files.iter().find(|f| f["path"] == name.as_str()).unwrap();
        assert_eq!(entry["sha256"], hex::encode(Sha256::digest(&bytes)));
    }
}

#[test]
fn trace_csv_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    assert!(rgf(&["scp"], SPIN, &out).status.success());
    let text = std::fs::read_to_string(out.join("scp_xx_R1_r0.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value,stderr"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10);
    assert!((rows[0][0] - 0.2).abs() < 1e-12 && (rows[9][0] - 2.0).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[2] > 0.0));
}

#[test]
fn zero_budget_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = rgf(&["scp"], &SPIN.replace("total_shots = 512", "total_shots = 0"), &tmp.path().join("z"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("estimator.total_shots"));
}

#[test]
fn single_site_dsf_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = SPIN.replace("length = 4", "length = 1").replace("readout_sites = [0, 1, 2, 3]", "readout_sites = [0]");
    let out = rgf(&["dsf", "--oracle"], &cfg, &tmp.path().join("d"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = rgf(&["scp"], &SPIN.replace("length = 4", "length = 4\nlenght = 4"), &tmp.path().join("u"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lenght"));
}

#[test]
fn fd_on_fermions_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = rgf(&["fd"], HUBBARD, &tmp.path().join("f"));
    assert_eq!(out.status.code(), Some(2));
    for cmd in ["scp", "lcp", "oracle"] {
        let dir = tmp.path().join(cmd);
        assert!(rgf(&[cmd], HUBBARD, &dir).status.success(), "{cmd}");
        assert!(read_dir(&dir).iter().any(|(n, _)| n.ends_with("_up_R0_r0_im.csv") || n.ends_with("R0_r0_im.csv")));
    }
}

#[test]
fn oracle_dsf_is_normalized() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert!(rgf(&["dsf", "--oracle"], SPIN, &out).status.success());
    let text = std::fs::read_to_string(out.join("dsf.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,omega,intensity"));
    let values: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 4 * 41);
    assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
    assert_eq!(values.iter().cloned().fold(0.0, f64::max), 1.0);
    assert!(out.join("models.json").exists());
}

#[test]
fn ground_state_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g");
    assert!(rgf(&["ground-state"], SPIN, &out).status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("ground_state.json")).unwrap()).unwrap();
    // Four-site Heisenberg ring: E0 = -8 for Σ σ·σ.
    assert!((v["energy"].as_f64().unwrap() + 8.0).abs() < 1e-9, "{v}");
}

#[test]
fn variance_row_matches_scp_errors() {
    let text = format!(
        "{}\n[variance]\ntotal_shots = [4096]\nsteps = [10]\nrepetitions = 40\nlcp_points = 4\n",
        SPIN.replace("total_shots = 512", "total_shots = 4096").replace("readout_sites = [0, 1, 2, 3]", "readout_sites = [1]")
    );
    let config = RunConfig::parse(&text).unwrap();
    let rows = variance_rows(&config).unwrap();
    let scp = rows.iter().find(|r| r.estimator == EstimatorMode::Scp).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let mut c = config.clone();
    c.outputs = tmp.path().to_path_buf();
    run_traces(&c, EstimatorMode::Scp).unwrap();
    let csv = std::fs::read_to_string(tmp.path().join("scp_xx_R1_r0.csv")).unwrap();
    let errs: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    let reported = errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64;
    let rel = (scp.empirical_variance - reported).abs() / reported;
    assert!(rel < 0.1, "{} vs {reported}", scp.empirical_variance);
    assert!(scp.empirical_variance < scp.predicted_variance);
    assert!(scp.empirical_variance > scp.floor_variance.unwrap());
    let lcp = rows.iter().find(|r| r.estimator == EstimatorMode::Lcp).unwrap();
    assert_eq!(lcp.shots_per_evaluation, 409);
    assert!((lcp.empirical_variance / lcp.predicted_variance - 1.0).abs() < 0.5, "{lcp:?}");
}
