//! Acceptance battery: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails. Tolerances are the criteria's own; see the README
//! for the criteria expected to fail and why.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use tailproc::exec::{default_workers, RayonExecutor};
use tailproc::run::{write_outputs, RunReport};
use tailproc_validation::{config, record, run, se, value, Criterion, Model, Verdict, K, N};

/// The block rule the battery criteria name, `ceil(n^0.6)`.
const R_LONG: &str = "power:0.6";
/// `ceil(n^0.25) = 32`, with `r k / n = 0.032`.
const R_SHORT: &str = "power:0.25";
const SE_FACTOR: f64 = 3.0;
/// Rounding slack for comparisons whose Monte Carlo SE is exactly zero.
const FP_SLACK: f64 = 1e-12;

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn runs_blocks(model: Model, r: &str, exec: &RayonExecutor) -> (f64, f64, usize) {
    let rep = run(&config(model, "runs, blocks", r, ""), exec).unwrap();
    let rv = record(&rep, "runs", "theta", None);
    (rv.value, value(&rep, "blocks", "theta"), rv.r.unwrap())
}

fn ac1(exec: &RayonExecutor) -> Verdict {
    let mut c = Criterion::default();
    for m in &Model::BATTERY[1..4] {
        let theta = m.theta();
        let (runs, blocks, r) = runs_blocks(*m, R_LONG, exec);
        c.check(
            within(runs, theta, 0.05) && within(blocks, theta, 0.05),
            format!("{m} theta={theta:.4} r={r}: runs={runs:.4} blocks={blocks:.4}"),
        );
        let (runs, blocks, r) = runs_blocks(*m, R_SHORT, exec);
        c.diagnostic(format!(
            "{m} at r={r}: runs={runs:.4} blocks={blocks:.4} (|d|<=0.05: {})",
            within(runs, theta, 0.05) && within(blocks, theta, 0.05)
        ));
    }
    c.finish("AC1")
}

fn ac2(exec: &RayonExecutor) -> Verdict {
    let mut c = Criterion::default();
    for m in Model::BATTERY {
        let (runs, blocks, r) = runs_blocks(m, R_LONG, exec);
        c.check(within(runs, blocks, 0.05), format!("{m} r={r}: |runs-blocks|={:.4}", (runs - blocks).abs()));
        let (runs, blocks, r) = runs_blocks(m, R_SHORT, exec);
        c.diagnostic(format!("{m} at r={r}: |runs-blocks|={:.4}", (runs - blocks).abs()));
    }
    c.finish("AC2")
}

fn size_pmf(rep: &RunReport) -> Vec<f64> {
    rep.distributions
        .iter()
        .find(|d| d.operation == "clusters" && d.name == "size-pmf")
        .expect("size pmf")
        .values
        .clone()
}

fn ac3(exec: &RayonExecutor) -> Verdict {
    let mut c = Criterion::default();
    let rep = run(&config(Model::BATTERY[1], "clusters", R_SHORT, ""), exec).unwrap();
    let p2 = value(&rep, "clusters", "pr-size-2");
    let mean = value(&rep, "clusters", "mean-size");
    c.check(p2 >= 0.85, format!("ma1 Pr(size=2)={p2:.4}"));
    c.check(within(mean, 2.0, 0.2), format!("ma1 mean size={mean:.4}"));
    let rep = run(&config(Model::HalfAr, "clusters", R_SHORT, ""), exec).unwrap();
    let pmf = size_pmf(&rep);
    // geometric(1/2) mass beyond the observed sizes is 2^-len
    let tv = 0.5
        * (pmf.iter().enumerate().map(|(j, p)| (p - 0.5f64.powi(j as i32 + 1)).abs()).sum::<f64>()
            + 0.5f64.powi(pmf.len() as i32));
    c.check(tv <= 0.1, format!("rcar TV to geometric(1/2)={tv:.4}"));
    c.finish("AC3")
}

fn ac4(exec: &RayonExecutor) -> Verdict {
    let mut c = Criterion::default();
    for m in Model::BATTERY {
        let rep = run(&config(m, "theta, theta-forward", R_SHORT, ""), exec).unwrap();
        let (reference, rse) = (value(&rep, "theta", "theta"), se(&rep, "theta", "theta"));
        let (fwd, fse) = (value(&rep, "theta-forward", "theta"), se(&rep, "theta-forward", "theta"));
        let tol = SE_FACTOR * rse.hypot(fse) + FP_SLACK;
        c.check(
            within(fwd, reference, tol),
            format!("{m}: forward={fwd:.5}±{fse:.1e} reference={reference:.5}±{rse:.1e}"),
        );
    }
    c.finish("AC4")
}

fn ac5(exec: &RayonExecutor) -> Verdict {
    let mut c = Criterion::default();
    let rep = run(&config(Model::BATTERY[1], "time-change, lag-reversal", R_SHORT, ""), exec).unwrap();
    let diffs: Vec<_> = rep
        .records
        .iter()
        .filter(|r| r.operation == "time-change" && r.statistic.ends_with(":difference"))
        .collect();
    let bad: Vec<String> = diffs
        .iter()
        .filter(|r| r.value.abs() > SE_FACTOR * r.std_error.unwrap() + FP_SLACK)
        .map(|r| r.statistic.clone())
        .collect();
    let worst = diffs
        .iter()
        .map(|r| r.value.abs() / r.std_error.unwrap().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    c.check(
        diffs.len() == 25 && bad.is_empty(),
        format!("{} time-change checks, worst |d|/se={worst:.2}{}", diffs.len(), if bad.is_empty() { String::new() } else { format!(", failing {bad:?}") }),
    );
    let m1 = value(&rep, "lag-reversal", "moment-lag1");
    let nz = value(&rep, "lag-reversal", "nonzero-lag-minus1");
    let d = record(&rep, "lag-reversal", "difference", None);
    c.check(
        within(m1, 0.5, SE_FACTOR * se(&rep, "lag-reversal", "moment-lag1") + FP_SLACK)
            && within(nz, 0.5, SE_FACTOR * se(&rep, "lag-reversal", "nonzero-lag-minus1") + FP_SLACK)
            && d.value.abs() <= SE_FACTOR * d.std_error.unwrap() + FP_SLACK,
        format!("E|Theta_1|={m1:.4} Pr(Theta_-1!=0)={nz:.4}"),
    );
    c.finish("AC5")
}

fn ac6(exec: &RayonExecutor) -> Verdict {
    let mut c = Criterion::default();
    let rep = run(&config(Model::BATTERY[1], "laplace", R_SHORT, "laplace_s = 1"), exec).unwrap();
    let d = record(&rep, "laplace", "difference", None);
    c.check(
        d.value.abs() <= SE_FACTOR * d.std_error.unwrap() + FP_SLACK,
        format!("general-simplified={:.2e}±{:.1e}", d.value, d.std_error.unwrap()),
    );
    let g = value(&rep, "laplace", "general");
    let target = (-2f64).exp();
    c.check(
        within(g, target, SE_FACTOR * se(&rep, "laplace", "general") + FP_SLACK),
        format!("value={g:.5} target exp(-2)={target:.5}"),
    );
    c.finish("AC6")
}

fn ac7(exec: &RayonExecutor) -> Verdict {
    let mut c = Criterion::default();
    let rep = run(&config(Model::BATTERY[1], "point-process", R_SHORT, "u = 1, 2"), exec).unwrap();
    let c1 = record(&rep, "point-process", "cluster-count", Some(1.0)).value;
    let c2 = record(&rep, "point-process", "cluster-count", Some(2.0)).value;
    let disp = record(&rep, "point-process", "dispersion-quarters", Some(1.0)).value;
    c.check(within(c1, 500.0, 4.0 * 500f64.sqrt()), format!("C(1)={c1}"));
    c.check((0.7..=1.3).contains(&disp), format!("dispersion over quarters={disp:.3}"));
    c.check(within(c2 / c1, 0.5, 0.1), format!("C(2)/C(1)={:.4}", c2 / c1));
    c.diagnostic(format!(
        "dispersion over halves={:.3}",
        record(&rep, "point-process", "dispersion-halves", Some(1.0)).value
    ));
    c.finish("AC7")
}

fn ac8(exec: &RayonExecutor) -> Verdict {
    let mut c = Criterion::default();
    let rep = run(&config(Model::BATTERY[1], "tail-ratio", R_SHORT, ""), exec).unwrap();
    let ratio = value(&rep, "tail-ratio", "tail-ratio");
    c.check(within(ratio, 2.0, 0.2), format!("Pr(X>x)/Pr(Z>x)={ratio:.4}"));
    c.finish("AC8")
}

fn ac9(exec: &RayonExecutor) -> Verdict {
    let mut c = Criterion::default();
    for m in Model::BATTERY {
        let rep = run(&config(m, "tail-process", R_SHORT, ""), exec).unwrap();
        let p = value(&rep, "tail-process", "radii-ks-p-value");
        let d = value(&rep, "tail-process", "radii-ks-statistic");
        c.check(p >= 0.01, format!("{m}: D={d:.4} p={p:.4}"));
    }
    c.finish("AC9")
}

fn outputs(rep: &RunReport, cfg: &tailproc::config::ExperimentConfig) -> BTreeMap<String, Vec<u8>> {
    let dir = tempfile::tempdir().unwrap();
    write_outputs(rep, cfg, dir.path()).unwrap();
    fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timing.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn ac10(workers: usize) -> Verdict {
    let mut c = Criterion::default();
    let ops = "theta, theta-forward, cluster-law, laplace, time-change, lag-reversal, tail-equivalence, \
               runs, blocks, clusters, point-process, tail-process, anticluster, tail-ratio, hill";
    let cfg = config(Model::BATTERY[1], ops, R_SHORT, "u = 1, 2, 4");
    let exec = RayonExecutor::new(workers);
    let a = outputs(&run(&cfg, &exec).unwrap(), &cfg);
    let b = outputs(&run(&cfg, &exec).unwrap(), &cfg);
    c.check(a == b, format!("repeat at {workers} workers: {} files identical", a.len()));
    let other = if workers == 1 { 4 } else { 1 };
    let o = outputs(&run(&cfg, &RayonExecutor::new(other)).unwrap(), &cfg);
    c.check(a == o, format!("{workers} vs {other} workers identical"));
    c.finish("AC10")
}

type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() -> ExitCode {
    // libtest flags (e.g. from `cargo test -- --nocapture`) are ignored
    let workers = default_workers();
    let exec = RayonExecutor::new(workers);
    println!("acceptance battery: n={N} k={K} seed={} workers={workers}", tailproc_validation::SEED);
    let criteria: [(&str, Check<'_>); 10] = [
        ("AC1", Box::new(|| ac1(&exec))),
        ("AC2", Box::new(|| ac2(&exec))),
        ("AC3", Box::new(|| ac3(&exec))),
        ("AC4", Box::new(|| ac4(&exec))),
        ("AC5", Box::new(|| ac5(&exec))),
        ("AC6", Box::new(|| ac6(&exec))),
        ("AC7", Box::new(|| ac7(&exec))),
        ("AC8", Box::new(|| ac8(&exec))),
        ("AC9", Box::new(|| ac9(&exec))),
        ("AC10", Box::new(|| ac10(workers))),
    ];
    let mut failed = Vec::new();
    for (id, f) in &criteria {
        let start = Instant::now();
        let v = f();
        print!("{v}");
        println!("      ({id} took {:.1}s)", start.elapsed().as_secs_f64());
        if !v.pass {
            failed.push(v.id);
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
