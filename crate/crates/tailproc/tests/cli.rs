use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tailproc::config::ExperimentConfig;
use tailproc::exec::RayonExecutor;
use tailproc::verify::{independence_check, verify, Outcome};
use tailproc_core::RngStream;

const IID: &str = "\
[model]
family = iid
alpha = 1

[analysis]
k = 100
r = power:0.25
n_mc = 20000

[run]
n = 10000
master_seed = 1
";

fn tailproc(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("experiment.ini");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_tailproc"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn minimal_iid_run_succeeds_with_theta_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = tailproc(dir.path(), IID, &["run"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/report.json")).unwrap()).unwrap();
    let records = report["records"].as_array().unwrap();
    for op in ["theta", "runs", "blocks"] {
        assert!(
            records.iter().any(|r| r["operation"] == op && r["statistic"] == "theta"),
            "no theta row for {op}"
        );
    }
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert!(summary.starts_with("model_id,seed,replicate,n,k,r,u,operation,statistic,value,std_error,n_samples,note\n"));
}

#[test]
fn k_not_below_n_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = tailproc(dir.path(), &IID.replace("k = 100", "k = 10000"), &["run"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("analysis.k"), "{}", stderr(&o));
}

#[test]
fn config_errors_name_their_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (IID.replace("[run]", "[run]\nbogus = 1"), "run.bogus"),
        (IID.replace("alpha = 1", "alpha = -1"), "model.alpha"),
        (IID.replace("[run]", "[runs]"), "runs"),
        (IID.replace("r = power:0.25", "r = sometimes"), "analysis.r"),
        (IID.replace("family = iid", "family = garch"), "model.family"),
        (format!("{IID}\n[model]\nd = 2\n"), "model"),
        // a coefficient key does not apply to iid
        (IID.replace("alpha = 1", "alpha = 1\nc0 = 1"), "model.c0"),
    ];
    for (text, key) in cases {
        let o = tailproc(dir.path(), &text, &["run"]);
        assert_eq!(o.status.code(), Some(2), "{key}: {}", stderr(&o));
        assert!(stderr(&o).contains(key), "{key}: {}", stderr(&o));
    }
}

#[test]
fn missing_config_and_unknown_ladder_exit_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_tailproc")).arg("run").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let o = tailproc(dir.path(), IID, &["sweep", "--ladder", "horizon=1,2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sweep.horizon"), "{}", stderr(&o));
}

#[test]
fn zero_model_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[model]\nfamily = mma\nalpha = 1\nspectral = +1\ncoefficients = deterministic\nc0 = 0\nc1 = 0\n\
                [analysis]\noperations = theta\n[run]\nn = 10000\n";
    let o = tailproc(dir.path(), text, &["analytic"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("analysis.operations.theta"));
}

#[test]
fn simulate_writes_readable_paths() {
    let dir = tempfile::tempdir().unwrap();
    let o = tailproc(dir.path(), IID, &["simulate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let p = tailproc::io::read_path(&dir.path().join("out/path-0.csv")).unwrap();
    assert_eq!(p.len(), 10_000);
    let meta = fs::read_to_string(dir.path().join("out/path-0.csv.meta")).unwrap();
    assert!(meta.lines().any(|l| l == "seed=1"), "{meta}");
    // estimating from the file gives the same numbers as simulating again
    let o = tailproc(dir.path(), IID, &["estimate"]);
    assert_eq!(o.status.code(), Some(0));
    let simulated = fs::read(dir.path().join("out/summary.csv")).unwrap();
    let input = dir.path().join("out/path-0.csv").display().to_string();
    let o = tailproc(dir.path(), IID, &["estimate", "--input", &input]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(simulated, fs::read(dir.path().join("out/summary.csv")).unwrap());
}

fn shipped(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

#[test]
fn iid_battery_all_pass() {
    let table = verify(&shipped("iid.ini"), &RayonExecutor::new(2)).unwrap();
    assert_eq!(table.failed(), 0, "\n{table}");
}

#[test]
fn ma1_battery_all_pass() {
    let table = verify(&shipped("ma1-battery.ini"), &RayonExecutor::new(2)).unwrap();
    assert_eq!(table.failed(), 0, "\n{table}");
    // time-change identity at every lag of the battery
    for i in -2..=2 {
        assert!(table.rows.iter().any(|r| r.name.ends_with(&format!("@i={i}")) && r.outcome == Outcome::Pass));
    }
}

#[test]
fn corrupted_seed_splitting_fails_independence() {
    let parent = RngStream::new(7, 0);
    let good = independence_check(&|s: &RngStream, t| s.substream(t), &parent, &[1, 2, 3, 4]);
    assert_eq!(good.outcome, Outcome::Pass, "{good:?}");
    let bad = independence_check(&|s: &RngStream, _| *s, &parent, &[1, 2, 3, 4]);
    assert_eq!(bad.outcome, Outcome::Fail, "{bad:?}");
}

#[test]
fn verify_exit_code_reflects_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = tailproc(dir.path(), IID, &["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(dir.path().join("out/verify.csv").exists());
}
