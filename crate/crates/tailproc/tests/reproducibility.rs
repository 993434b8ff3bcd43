use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tailproc::config::ExperimentConfig;
use tailproc::exec::RayonExecutor;
use tailproc::run::{execute, sweep, Command as Sub, RunReport};

fn config_file() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/ma1-battery.ini")
}

/// The shipped battery, shrunk so a run takes a fraction of a second.
fn small_text() -> String {
    fs::read_to_string(config_file())
        .unwrap()
        .replace("n = 1000000", "n = 100000")
        .replace("k = 1000", "k = 100")
        .replace("n_mc = 100000", "n_mc = 20000")
}

fn small() -> ExperimentConfig {
    ExperimentConfig::parse(&small_text()).unwrap()
}

fn run_cli(cfg: &Path, out: &Path, workers: usize) -> Vec<(String, Vec<u8>)> {
    let o = Command::new(env!("CARGO_BIN_EXE_tailproc"))
        .args(["run", "--workers", &workers.to_string(), "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timing.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.ini");
    fs::write(&cfg, small_text()).unwrap();
    let a = run_cli(&cfg, &dir.path().join("a"), 2);
    let b = run_cli(&cfg, &dir.path().join("b"), 2);
    assert!(a.len() >= 3);
    assert_eq!(a, b);
    // a different worker count changes nothing but the timing file
    let c = run_cli(&cfg, &dir.path().join("c"), 1);
    let d = run_cli(&cfg, &dir.path().join("d"), 4);
    assert_eq!(a, c);
    assert_eq!(a, d);
}

fn json(rep: &RunReport) -> String {
    serde_json::to_string(rep).unwrap()
}

#[test]
fn statistics_do_not_depend_on_workers() {
    let cfg = small();
    let one = execute(&cfg, Sub::Run, &RayonExecutor::new(1), None).unwrap();
    let three = execute(&cfg, Sub::Run, &RayonExecutor::new(3), None).unwrap();
    assert_eq!(json(&one), json(&three));
    assert_eq!(
        serde_json::to_string(&one.distributions).unwrap(),
        serde_json::to_string(&three.distributions).unwrap()
    );
}

#[test]
fn seed_changes_the_empirical_rows() {
    let cfg = small();
    let mut other = cfg.clone();
    other.run.master_seed += 1;
    let exec = RayonExecutor::new(2);
    let a = execute(&cfg, Sub::Run, &exec, None).unwrap();
    let b = execute(&other, Sub::Run, &exec, None).unwrap();
    assert_ne!(a.find("runs", "theta").unwrap().value, b.find("runs", "theta").unwrap().value);
    // the closed form does not
    assert_eq!(a.find("theta", "theta").unwrap().value, b.find("theta", "theta").unwrap().value);
}

#[test]
fn config_hash_is_of_the_file_bytes() {
    use sha2::{Digest, Sha256};
    let bytes = fs::read(config_file()).unwrap();
    let cfg = ExperimentConfig::load(&config_file()).unwrap();
    assert_eq!(cfg.hash, hex::encode(Sha256::digest(&bytes)));
}

#[test]
fn empty_ladder_is_run() {
    let cfg = small();
    let exec = RayonExecutor::new(2);
    let run = execute(&cfg, Sub::Run, &exec, None).unwrap();
    let sw = sweep(&cfg, &Vec::new(), &exec).unwrap();
    assert_eq!(json(&run), json(&sw));
}
