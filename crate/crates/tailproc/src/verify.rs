//! Invariant battery behind `tailproc verify`.

use std::fmt;

use serde::Serialize;
use tailproc_core::analytic::{
    cluster_size_law, lag_reversal, laplace_functional, mma_theta, tail_equivalence_constant,
    theta_forward, time_change_check, PointFunctional, WindowFunctional,
};
use tailproc_core::estimators::{
    blocks_estimator, empirical_tail_process, runs_estimator, select_threshold,
};
use tailproc_core::mc::McPlan;
use tailproc_core::stats::{correlation, ks_one_sample};
use tailproc_core::{RngStream, ThetaEstimate};

use crate::config::{ExperimentConfig, Operation};
use crate::error::{CliError, CliResult};
use crate::exec::RayonExecutor;
use crate::fmt::g17;
use crate::model::{Model, ModelKind};
use crate::run::{mc_stream, path_stream, MC, PATH};

/// Monte Carlo comparisons pass within this many standard errors.
pub const SE_FACTOR: f64 = 3.0;
/// Absolute slack for comparisons whose standard error is exactly zero.
pub const FP_SLACK: f64 = 1e-12;
pub const RUNS_BLOCKS_TOL: f64 = 0.05;
pub const KS_LEVEL: f64 = 0.01;
pub const TAIL_RATIO_TOL: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantRow {
    pub name: String,
    pub statistic: f64,
    pub tolerance: f64,
    pub outcome: Outcome,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyTable {
    pub model_id: String,
    pub rows: Vec<InvariantRow>,
}

impl VerifyTable {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome == Outcome::Fail).count()
    }

    pub fn row(&self, name: &str) -> Option<&InvariantRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn into_result(self) -> CliResult<Self> {
        match self.failed() {
            0 => Ok(self),
            failed => Err(CliError::VerifyFailed {
                failed,
                total: self.rows.len(),
            }),
        }
    }

    pub fn csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["model_id", "invariant", "statistic", "tolerance", "outcome", "note"])
            .expect("in-memory write");
        for r in &self.rows {
            let outcome = match r.outcome {
                Outcome::Pass => "pass",
                Outcome::Fail => "fail",
                Outcome::Skip => "skip",
            };
            w.write_record([
                self.model_id.as_str(),
                &r.name,
                &g17(r.statistic),
                &g17(r.tolerance),
                outcome,
                &r.note,
            ])
            .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

impl fmt::Display for VerifyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.model_id)?;
        writeln!(f, "{:<36} {:>14} {:>14}  result", "invariant", "statistic", "tolerance")?;
        for r in &self.rows {
            let tag = match r.outcome {
                Outcome::Pass => "PASS",
                Outcome::Fail => "FAIL",
                Outcome::Skip => "SKIP",
            };
            write!(f, "{:<36} {:>14.6e} {:>14.6e}  {tag}", r.name, r.statistic, r.tolerance)?;
            if !r.note.is_empty() {
                write!(f, "  {}", r.note)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Seed-splitting function under test by the independence check.
pub type Splitter = dyn Fn(&RngStream, u64) -> RngStream + Sync;

fn row(name: impl Into<String>, statistic: f64, tolerance: f64, note: impl Into<String>) -> InvariantRow {
    InvariantRow {
        name: name.into(),
        statistic,
        tolerance,
        outcome: if statistic <= tolerance { Outcome::Pass } else { Outcome::Fail },
        note: note.into(),
    }
}

fn skip(name: impl Into<String>, note: impl Into<String>) -> InvariantRow {
    InvariantRow {
        name: name.into(),
        statistic: f64::NAN,
        tolerance: f64::NAN,
        outcome: Outcome::Skip,
        note: note.into(),
    }
}

fn core_err(name: &str) -> impl Fn(tailproc_core::Error) -> CliError + '_ {
    move |e| CliError::from_core(name, e)
}

/// Draws from sibling streams produced by `split` and checks that no two
/// coincide and no pair is correlated beyond `5 / sqrt(N)`.
pub fn independence_check(split: &Splitter, parent: &RngStream, tags: &[u64]) -> InvariantRow {
    const N: usize = 4096;
    let draws: Vec<Vec<f64>> = tags
        .iter()
        .map(|&t| {
            let mut rng = split(parent, t).rng();
            (0..N).map(|_| rng.uniform()).collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut identical = 0;
    for i in 0..draws.len() {
        for j in i + 1..draws.len() {
            if draws[i] == draws[j] {
                identical += 1;
                worst = f64::INFINITY;
            } else {
                worst = worst.max(correlation(&draws[i], &draws[j]).abs());
            }
        }
    }
    row(
        "rng-independence",
        worst,
        5.0 / (N as f64).sqrt(),
        format!("{} streams, {identical} identical pairs", tags.len()),
    )
}

pub fn verify(cfg: &ExperimentConfig, exec: &RayonExecutor) -> CliResult<VerifyTable> {
    verify_with_splitter(cfg, exec, &|s: &RngStream, t| s.substream(t))
}

/// The battery with a caller-supplied seed splitter for the independence
/// check; everything else uses the library streams.
pub fn verify_with_splitter(
    cfg: &ExperimentConfig,
    exec: &RayonExecutor,
    split: &Splitter,
) -> CliResult<VerifyTable> {
    cfg.validate()?;
    let model = Model::build(&cfg.model)?;
    let a = &cfg.analysis;
    let seed = cfg.run.master_seed;
    let process = model.process.as_ref();
    let plan = |op: Operation| McPlan::new(a.n_mc, mc_stream(seed, op)).with_shards(cfg.run.shards);
    let mut rows = Vec::new();

    // extremal index: two forward forms, and against the reference value
    let fwd = theta_forward(process, a.horizon, &plan(Operation::ThetaForward), exec)
        .map_err(core_err("theta-forward"))?;
    rows.push(row(
        "theta-forward-forms",
        fwd.difference.value.abs(),
        SE_FACTOR * fwd.difference.std_error + FP_SLACK,
        "",
    ));
    let reference: Option<ThetaEstimate> = match (&model.kind, model.known_theta()) {
        (_, Some(t)) => Some(ThetaEstimate::closed_form(t)),
        (ModelKind::Mma(spec), None) => {
            Some(mma_theta(spec, &plan(Operation::Theta), exec).map_err(core_err("theta"))?)
        }
        _ => None,
    };
    let truncation = process.truncation_bound().unwrap_or(0.0);
    match &reference {
        Some(t) => {
            let pooled = fwd.estimate.std_error.hypot(t.std_error);
            rows.push(row(
                "theta-forward-vs-reference",
                (fwd.estimate.value - t.value).abs(),
                SE_FACTOR * pooled + FP_SLACK + truncation,
                format!("forward={} reference={} ({})", g17(fwd.estimate.value), g17(t.value), t.method),
            ));
        }
        None => rows.push(skip("theta-forward-vs-reference", "no reference value for this model")),
    }
    let theta = reference.unwrap_or(fwd.estimate);

    // cluster-size law
    let law = cluster_size_law(process, &theta, a.horizon, a.k_max, &plan(Operation::ClusterLaw), exec)
        .map_err(core_err("cluster-law"))?;
    let nu0_se = law.nu_std_error[0].hypot(theta.std_error);
    rows.push(row(
        "nu0-vs-theta",
        (law.nu[0] - theta.value).abs(),
        SE_FACTOR * nu0_se + FP_SLACK + truncation,
        "",
    ));
    rows.push(row(
        "mean-kappa-vs-inverse-theta",
        (law.mean_kappa - 1.0 / theta.value).abs(),
        SE_FACTOR * law.mean_kappa_std_error + FP_SLACK + truncation / theta.value,
        format!("mean={} k_max={}", g17(law.mean_kappa), a.k_max),
    ));

    // Laplace functional of s·1(‖x‖ > 1), general against simplified form
    let f = PointFunctional::Indicator {
        scale: a.laplace_s,
        level: 1.0,
    };
    let lap = laplace_functional(process, &f, a.horizon, &plan(Operation::Laplace), exec)
        .map_err(core_err("laplace"))?;
    match &lap.difference {
        Some(d) => rows.push(row(
            "laplace-forms",
            d.value.abs(),
            SE_FACTOR * d.std_error + FP_SLACK + truncation,
            format!("general={}", g17(lap.general.value)),
        )),
        None => rows.push(skip("laplace-forms", "simplified form not available")),
    }

    // time-change identity and lag reversal need negative lags
    if process.two_sided() {
        let base = plan(Operation::TimeChange);
        for (fi, wf) in WindowFunctional::battery().iter().enumerate() {
            for &i in &a.time_change_lags {
                let p = base.derive(fi as u64).derive(i as u64);
                let c = time_change_check(process, i, wf, &p, exec).map_err(core_err("time-change"))?;
                rows.push(row(
                    format!("time-change:{}@i={i}", wf.name),
                    c.difference().abs(),
                    SE_FACTOR * c.pooled_se + FP_SLACK,
                    "",
                ));
            }
        }
        let c = lag_reversal(process, 1, &plan(Operation::LagReversal), exec)
            .map_err(core_err("lag-reversal"))?;
        rows.push(row(
            "lag-reversal",
            c.difference().abs(),
            SE_FACTOR * c.pooled_se + FP_SLACK,
            format!("moment={}", g17(c.lhs.value)),
        ));
    } else {
        rows.push(skip("time-change", "forward-only spectral sampler"));
        rows.push(skip("lag-reversal", "forward-only spectral sampler"));
    }

    // empirical checks on replicate 0
    let path = model
        .simulate(cfg.run.n, path_stream(seed, 0))
        .map_err(core_err("simulate"))?;
    let thr = select_threshold(&path, a.k, &model.norm).map_err(core_err("threshold"))?;
    let r = a.r.resolve(path.len()).map_err(core_err("blocks"))?;
    let runs = runs_estimator(&path, &thr, r).map_err(core_err("runs"))?;
    let blocks = blocks_estimator(&path, &thr, r).map_err(core_err("blocks"))?;
    rows.push(row(
        "runs-vs-blocks",
        (runs.value - blocks.value).abs(),
        RUNS_BLOCKS_TOL,
        format!("runs={} blocks={} r={r}", g17(runs.value), g17(blocks.value)),
    ));
    let tp = empirical_tail_process(&path, &thr, a.tail_lags.0, a.tail_lags.1)
        .map_err(core_err("tail-process"))?;
    let alpha = model.alpha;
    let ks = ks_one_sample(&tp.radii, |y| if y <= 1.0 { 0.0 } else { 1.0 - y.powf(-alpha) })
        .map_err(core_err("tail-process"))?;
    // reported as 1 - p so that small is good, like the other rows
    rows.push(row(
        "anchor-radii-pareto-ks",
        1.0 - ks.p_value,
        1.0 - KS_LEVEL,
        format!("D={} p={} anchors={}", g17(ks.statistic), g17(ks.p_value), ks.n),
    ));
    if let ModelKind::Mma(spec) = &model.kind {
        let c = tail_equivalence_constant(spec, &plan(Operation::TailEquivalence), exec)
            .map_err(core_err("tail-equivalence"))?;
        let x = spec.innovation.radial.quantile_from_uniform(1e-3);
        let q = thr.norms().iter().filter(|&&v| v > x).count() as f64 / path.len() as f64;
        let ratio = q / 1e-3;
        rows.push(row(
            "tail-ratio-vs-c",
            (ratio / c.value - 1.0).abs(),
            TAIL_RATIO_TOL,
            format!("ratio={} c={}", g17(ratio), g17(c.value)),
        ));
    }

    // stream independence over the tags the runner actually uses
    let mc_parent = RngStream::new(seed, 0).substream(MC);
    let tags: Vec<u64> = Operation::ALL.iter().map(Operation::stream_tag).collect();
    rows.push(independence_check(split, &mc_parent, &tags));
    let mut path_row = independence_check(
        split,
        &RngStream::new(seed, 0).substream(PATH),
        &(0..cfg.run.replicates.max(8) as u64).collect::<Vec<_>>(),
    );
    path_row.name = "rng-independence-paths".into();
    rows.push(path_row);

    Ok(VerifyTable {
        model_id: model.model_id(),
        rows,
    })
}
