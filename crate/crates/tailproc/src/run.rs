//! Operation runner behind the `simulate`, `analytic`, `estimate`, `run` and
//! `sweep` subcommands.
//!
//! Every random quantity is drawn from a stream derived from the master
//! seed and a fixed tag, never from the worker layout:
//!
//! - path of replicate `j`: `seed → PATH → j`
//! - Monte Carlo of operation `op`: `seed → MC → op`
//! - bootstrap of replicate `j`: `seed → BOOTSTRAP → j`

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use tailproc_core::analytic::{
    cluster_size_law, lag_reversal, laplace_functional, linear_projection_theta, mma_theta,
    tail_equivalence_constant, theta_forward, time_change_check, PointFunctional, Sided,
    WindowFunctional,
};
use tailproc_core::estimators::{
    anticluster_diagnostic, block_bootstrap_se, blocks_estimator, empirical_tail_process,
    exceedances_per_block, extract_clusters, point_process_summary, runs_estimator,
    select_threshold, Estimator, ResolvedThreshold, ThresholdWarning,
};
use tailproc_core::mc::{McPlan, RatioEstimate};
use tailproc_core::models::PathMatrix;
use tailproc_core::stats::{hill_estimator, ks_one_sample};
use tailproc_core::{RngStream, ThetaEstimate};

use crate::config::{ExperimentConfig, Family, Ladder, Operation};
use crate::error::{CliError, CliResult};
use crate::exec::RayonExecutor;
use crate::io::{self, Distribution, Record};
use crate::model::{Model, ModelKind};

pub const PATH: u64 = 1;
pub const MC: u64 = 2;
pub const BOOTSTRAP: u64 = 3;

/// Above this many expected exceedances per block the runs and blocks
/// estimators are biased towards zero.
pub const MAX_EXCEEDANCES_PER_BLOCK: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Analytic,
    Estimate,
    Run,
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Analytic => "analytic",
            Command::Estimate => "estimate",
            Command::Run => "run",
            Command::Sweep => "sweep",
        }
    }
}

pub fn path_stream(seed: u64, replicate: usize) -> RngStream {
    RngStream::new(seed, 0).substream(PATH).substream(replicate as u64)
}

pub fn mc_stream(seed: u64, op: Operation) -> RngStream {
    RngStream::new(seed, 0).substream(MC).substream(op.stream_tag())
}

/// Results of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub model_id: String,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ladder: Vec<(String, Vec<f64>)>,
    pub warnings: Vec<String>,
    pub records: Vec<Record>,
    #[serde(skip)]
    pub distributions: Vec<Distribution>,
    #[serde(skip)]
    pub paths: Vec<PathMatrix>,
    /// Seconds; written to `timing.json` only, so the other outputs are
    /// byte-comparable across runs.
    #[serde(skip)]
    pub wall_clock: f64,
    #[serde(skip)]
    pub workers: usize,
}

impl RunReport {
    /// First record with the given operation and statistic.
    pub fn find(&self, operation: &str, statistic: &str) -> Option<&Record> {
        self.records
            .iter()
            .find(|r| r.operation == operation && r.statistic == statistic)
    }
}

#[derive(Default)]
struct Out {
    records: Vec<Record>,
    distributions: Vec<Distribution>,
    warnings: Vec<String>,
}

impl Out {
    fn extend(&mut self, o: Out) {
        self.records.extend(o.records);
        self.distributions.extend(o.distributions);
        self.warnings.extend(o.warnings);
    }
}

/// Coordinates stamped on every row.
#[derive(Clone)]
struct Stamp {
    model_id: String,
    seed: u64,
    replicate: Option<usize>,
    n: Option<usize>,
    k: Option<usize>,
    r: Option<usize>,
    u: Option<f64>,
}

impl Stamp {
    fn record(&self, op: Operation, statistic: impl Into<String>, value: f64) -> Record {
        Record {
            model_id: self.model_id.clone(),
            seed: self.seed,
            replicate: self.replicate,
            n: self.n,
            k: self.k,
            r: self.r,
            u: self.u,
            operation: op.name().into(),
            statistic: statistic.into(),
            value,
            std_error: None,
            n_samples: None,
            note: String::new(),
        }
    }

    fn ratio(&self, op: Operation, statistic: impl Into<String>, e: &RatioEstimate) -> Record {
        Record {
            std_error: Some(e.std_error),
            n_samples: Some(e.n),
            ..self.record(op, statistic, e.value)
        }
    }

    fn theta(&self, op: Operation, e: &ThetaEstimate) -> Record {
        let mut note = format!("method={}", e.method);
        if let Some(t) = e.truncation {
            note.push_str(&format!(" truncation_bound={}", crate::fmt::g17(t)));
        }
        if e.clamped {
            note.push_str(" clamped");
        }
        Record {
            std_error: Some(e.std_error),
            n_samples: Some(e.n_samples),
            note,
            ..self.record(op, "theta", e.value)
        }
    }

    fn distribution(
        &self,
        op: Operation,
        name: impl Into<String>,
        support: Option<Vec<f64>>,
        values: Vec<f64>,
        std_errors: Option<Vec<f64>>,
    ) -> Distribution {
        Distribution {
            model_id: self.model_id.clone(),
            seed: self.seed,
            replicate: self.replicate,
            n: self.n,
            k: self.k,
            r: self.r,
            u: self.u,
            operation: op.name().into(),
            name: name.into(),
            support,
            values,
            std_errors,
        }
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    model: &'a Model,
    exec: &'a RayonExecutor,
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.cfg.run.master_seed
    }

    fn plan(&self, op: Operation) -> McPlan {
        McPlan::new(self.cfg.analysis.n_mc, mc_stream(self.seed(), op)).with_shards(self.cfg.run.shards)
    }

    fn stamp(&self) -> Stamp {
        Stamp {
            model_id: self.model.model_id(),
            seed: self.seed(),
            replicate: None,
            n: None,
            k: None,
            r: None,
            u: None,
        }
    }
}

/// Operations an invocation runs: the configured list restricted to the
/// subcommand, or the defaults for the model family.
pub fn operations(cfg: &ExperimentConfig, family: Family, command: Command) -> Vec<Operation> {
    let wanted = |op: &Operation| match command {
        Command::Simulate => false,
        Command::Analytic => !op.is_empirical(),
        Command::Estimate => op.is_empirical(),
        Command::Run | Command::Sweep => true,
    };
    let mut ops: Vec<Operation> = if cfg.analysis.operations.is_empty() {
        Operation::ALL.into_iter().filter(|o| o.default_for(family)).collect()
    } else {
        cfg.analysis.operations.clone()
    };
    ops.retain(wanted);
    ops.sort_unstable();
    ops.dedup();
    ops
}

/// θ from the best available route: closed form where known, otherwise the
/// moving-average routine or the forward formula.
fn best_theta(ctx: &Ctx<'_>, plan: &McPlan) -> CliResult<ThetaEstimate> {
    let core = |e| CliError::from_core(Operation::Theta.name(), e);
    if let Some(t) = ctx.model.known_theta() {
        return Ok(ThetaEstimate::closed_form(t));
    }
    match &ctx.model.kind {
        ModelKind::Mma(spec) => mma_theta(spec, plan, ctx.exec).map_err(core),
        _ => Ok(theta_forward(ctx.model.process.as_ref(), ctx.cfg.analysis.horizon, plan, ctx.exec)
            .map_err(core)?
            .estimate),
    }
}

fn analytic_op(ctx: &Ctx<'_>, op: Operation) -> CliResult<Out> {
    let a = &ctx.cfg.analysis;
    let process = ctx.model.process.as_ref();
    let plan = ctx.plan(op);
    let st = ctx.stamp();
    let core = |e| CliError::from_core(op.name(), e);
    let mut out = Out::default();
    match op {
        Operation::Theta => {
            let t = best_theta(ctx, &plan)?;
            out.records.push(st.theta(op, &t));
        }
        Operation::ThetaForward => {
            let t = theta_forward(process, a.horizon, &plan, ctx.exec).map_err(core)?;
            out.records.push(st.theta(op, &t.estimate));
            out.records.push(st.ratio(op, "sup-form", &t.sup_form));
            out.records.push(st.ratio(op, "max-form", &t.max_form));
            let mut d = st.ratio(op, "forms-difference", &t.difference);
            d.note = format!("forms_agree={}", t.forms_agree);
            out.records.push(d);
        }
        Operation::ClusterLaw => {
            let theta = best_theta(ctx, &plan.derive(1))?;
            let law = cluster_size_law(process, &theta, a.horizon, a.k_max, &plan.derive(0), ctx.exec)
                .map_err(core)?;
            for (j, (p, se)) in law.nu.iter().zip(&law.nu_std_error).enumerate() {
                let mut r = st.record(op, format!("nu-{j}"), *p);
                r.std_error = Some(*se);
                r.n_samples = Some(law.n_samples);
                out.records.push(r);
            }
            for (j, p) in law.kappa.iter().enumerate() {
                out.records.push(st.record(op, format!("kappa-{}", j + 1), *p));
            }
            out.records.push(st.record(op, "kappa-tail", law.kappa_tail));
            let mut m = st.record(op, "mean-kappa", law.mean_kappa);
            m.std_error = Some(law.mean_kappa_std_error);
            m.note = format!("nu0_matches_theta={}", law.nu0_matches_theta);
            out.records.push(m);
            out.records.push(st.theta(op, &law.theta));
            let support: Vec<f64> = (1..=law.kappa.len()).map(|k| k as f64).collect();
            out.distributions.push(st.distribution(op, "kappa-pmf", Some(support), law.kappa.clone(), None));
            out.distributions.push(st.distribution(
                op,
                "nu-pmf",
                Some((0..law.nu.len()).map(|k| k as f64).collect()),
                law.nu.clone(),
                Some(law.nu_std_error.clone()),
            ));
        }
        Operation::Laplace => {
            let f = PointFunctional::Indicator {
                scale: a.laplace_s,
                level: 1.0,
            };
            let v = laplace_functional(process, &f, a.horizon, &plan, ctx.exec).map_err(core)?;
            out.records.push(st.ratio(op, "general", &v.general));
            if let Some(s) = &v.simplified {
                out.records.push(st.ratio(op, "simplified", s));
            }
            if let Some(d) = &v.difference {
                let mut r = st.ratio(op, "difference", d);
                r.note = format!("forms_agree={}", v.forms_agree.unwrap_or(false));
                out.records.push(r);
            }
        }
        Operation::TimeChange => {
            for (fi, f) in WindowFunctional::battery().iter().enumerate() {
                for &i in &a.time_change_lags {
                    let p = plan.derive(fi as u64).derive(i as u64);
                    let c = time_change_check(process, i, f, &p, ctx.exec).map_err(core)?;
                    let tag = format!("{}@i={i}", f.name);
                    out.records.push(st.ratio(op, format!("{tag}:lhs"), &c.lhs));
                    out.records.push(st.ratio(op, format!("{tag}:rhs"), &c.rhs));
                    let mut d = st.record(op, format!("{tag}:difference"), c.difference());
                    d.std_error = Some(c.pooled_se);
                    d.note = format!("holds_3se={}", c.holds(3.0, 1e-12));
                    out.records.push(d);
                }
            }
        }
        Operation::LagReversal => {
            let c = lag_reversal(process, 1, &plan, ctx.exec).map_err(core)?;
            out.records.push(st.ratio(op, "moment-lag1", &c.lhs));
            out.records.push(st.ratio(op, "nonzero-lag-minus1", &c.rhs));
            let mut d = st.record(op, "difference", c.difference());
            d.std_error = Some(c.pooled_se);
            out.records.push(d);
        }
        Operation::TailEquivalence => {
            let ModelKind::Mma(spec) = &ctx.model.kind else {
                return Err(CliError::validation(
                    "analysis.operations",
                    "tail-equivalence needs family = mma",
                ));
            };
            let c = tail_equivalence_constant(spec, &plan, ctx.exec).map_err(core)?;
            out.records.push(st.ratio(op, "c", &c));
        }
        Operation::Projection => {
            let w = a.projection.as_ref().ok_or_else(|| {
                CliError::validation("analysis.projection", "projection needs weights")
            })?;
            let t = linear_projection_theta(w, process, Sided::Abs, a.horizon, &plan, ctx.exec)
                .map_err(core)?;
            out.records.push(st.theta(op, &t));
        }
        _ => unreachable!("empirical operation {op} in the analytic runner"),
    }
    Ok(out)
}

fn threshold_note(thr: &ResolvedThreshold) -> String {
    thr.warnings
        .iter()
        .map(|w| match w {
            ThresholdWarning::LargeFraction => "k>=n/10",
            ThresholdWarning::Ties => "ties-at-level",
            ThresholdWarning::NoExceedances => "no-exceedances",
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn empirical(
    ctx: &Ctx<'_>,
    ops: &[Operation],
    path: &PathMatrix,
    replicate: usize,
) -> CliResult<Out> {
    let a = &ctx.cfg.analysis;
    let n = path.len();
    let thr = select_threshold(path, a.k, &ctx.model.norm).map_err(|e| CliError::from_core("threshold", e))?;
    let r = a.r.resolve(n).map_err(|e| CliError::from_core("blocks", e))?;
    let mut out = Out::default();
    let per_block = exceedances_per_block(r, thr.k, n);
    let bias_note = if per_block > MAX_EXCEEDANCES_PER_BLOCK {
        let w = format!(
            "replicate {replicate}: r*k/n = {per_block:.3} > {MAX_EXCEEDANCES_PER_BLOCK}; \
             extremal-index estimates are biased towards 0 (shorten analysis.r)"
        );
        out.warnings.push(w);
        format!("r*k/n={per_block:.3}")
    } else {
        String::new()
    };
    let tnote = threshold_note(&thr);
    if !tnote.is_empty() {
        out.warnings.push(format!("replicate {replicate}: threshold: {tnote}"));
    }
    let st = Stamp {
        replicate: Some(replicate),
        n: Some(n),
        k: Some(thr.k),
        r: Some(r),
        ..ctx.stamp()
    };
    let boot = RngStream::new(ctx.seed(), 0).substream(BOOTSTRAP).substream(replicate as u64);
    for &op in ops {
        let core = |e| CliError::from_core(op.name(), e);
        match op {
            Operation::Runs | Operation::Blocks => {
                let (est, kind) = if op == Operation::Runs {
                    (runs_estimator(path, &thr, r), Estimator::Runs)
                } else {
                    (blocks_estimator(path, &thr, r), Estimator::Blocks)
                };
                let est = est.map_err(core)?;
                let mut rec = st.theta(op, &est);
                for extra in [&bias_note, &tnote] {
                    if !extra.is_empty() {
                        rec.note.push(' ');
                        rec.note.push_str(extra);
                    }
                }
                out.records.push(rec);
                if a.bootstrap > 0 {
                    let se = block_bootstrap_se(path, &thr, r, kind, a.bootstrap, boot.substream(op.stream_tag()))
                        .map_err(core)?;
                    out.records.push(st.record(op, "bootstrap-se", se));
                }
            }
            Operation::Clusters => {
                let p = extract_clusters(path, &thr, r).map_err(core)?;
                out.records.push(st.record(op, "cluster-count", p.clusters.len() as f64));
                out.records.push(st.record(op, "blocks", p.n_blocks as f64));
                if !p.clusters.is_empty() {
                    out.records.push(st.record(op, "mean-size", p.mean_size()));
                    if let Some(m) = p.modal_size() {
                        out.records.push(st.record(op, "modal-size", m as f64));
                    }
                    let pmf = p.size_pmf();
                    for (j, q) in pmf.iter().enumerate().take(a.k_max) {
                        out.records.push(st.record(op, format!("pr-size-{}", j + 1), *q));
                    }
                    let support = (1..=pmf.len()).map(|k| k as f64).collect();
                    out.distributions.push(st.distribution(op, "size-pmf", Some(support), pmf, None));
                }
            }
            Operation::PointProcess => {
                let s = point_process_summary(path, &thr, r, &a.u).map_err(core)?;
                for lvl in &s.levels {
                    let su = Stamp {
                        u: Some(lvl.u),
                        ..st.clone()
                    };
                    out.records.push(su.record(op, "cluster-count", lvl.cluster_count as f64));
                    out.records.push(su.record(op, "exceedance-count", lvl.exceedance_count as f64));
                    out.records.push(su.record(op, "dispersion-halves", lvl.dispersion_halves));
                    out.records.push(su.record(op, "dispersion-quarters", lvl.dispersion_quarters));
                    if let Some(t) = lvl.theta_log {
                        out.records.push(su.record(op, "theta-log", t));
                    }
                    out.distributions.push(su.distribution(op, "marks", None, lvl.marks.clone(), None));
                }
            }
            Operation::TailProcess => {
                let (s, t) = a.tail_lags;
                let tp = empirical_tail_process(path, &thr, s, t).map_err(core)?;
                let alpha = ctx.model.alpha;
                let ks = ks_one_sample(&tp.radii, |y| if y <= 1.0 { 0.0 } else { 1.0 - y.powf(-alpha) })
                    .map_err(core)?;
                out.records.push(st.record(op, "anchors", tp.len() as f64));
                let mut rk = st.record(op, "radii-ks-statistic", ks.statistic);
                rk.n_samples = Some(ks.n as u64);
                out.records.push(rk);
                out.records.push(st.record(op, "radii-ks-p-value", ks.p_value));
                let norm = &ctx.model.norm;
                let anchor_dev = (0..tp.len())
                    .map(|i| (norm.eval(tp.spectral_at(i, 0)) - 1.0).abs())
                    .fold(0.0, f64::max);
                out.records.push(st.record(op, "anchor-norm-deviation", anchor_dev));
                let lags: Vec<i64> = (s..=t).collect();
                let mean_norm: Vec<f64> = lags
                    .iter()
                    .map(|&l| (0..tp.len()).map(|i| norm.eval(tp.spectral_at(i, l))).sum::<f64>() / tp.len() as f64)
                    .collect();
                let exceed: Vec<f64> = lags
                    .iter()
                    .map(|&l| {
                        (0..tp.len()).filter(|&i| norm.eval(tp.tail_at(i, l)) > 1.0).count() as f64
                            / tp.len() as f64
                    })
                    .collect();
                let support: Vec<f64> = lags.iter().map(|&l| l as f64).collect();
                out.distributions.push(st.distribution(op, "mean-spectral-norm", Some(support.clone()), mean_norm, None));
                out.distributions.push(st.distribution(op, "pr-tail-exceeds-1", Some(support), exceed, None));
            }
            Operation::Anticluster => {
                let rows = anticluster_diagnostic(path, &thr, &a.m_list, r).map_err(core)?;
                for row in &rows {
                    let mut rec = st.record(op, format!("prob-m{}", row.m), row.prob);
                    rec.std_error = Some(row.std_error);
                    rec.n_samples = Some(row.anchors as u64);
                    out.records.push(rec);
                }
                out.distributions.push(st.distribution(
                    op,
                    "prob-by-m",
                    Some(rows.iter().map(|r| r.m as f64).collect()),
                    rows.iter().map(|r| r.prob).collect(),
                    Some(rows.iter().map(|r| r.std_error).collect()),
                ));
            }
            Operation::TailRatio => {
                let law = ctx.model.innovation_law().ok_or_else(|| {
                    CliError::validation("analysis.operations", "tail-ratio needs family = mma")
                })?;
                // innovation norms are Pareto, so the 99.9% quantile `p^{-1/α}` is exact
                let p = 1e-3;
                let x = law.radial.quantile_from_uniform(p);
                let hits = thr.norms().iter().filter(|&&v| v > x).count() as f64;
                let q = hits / n as f64;
                let mut rec = st.record(op, "tail-ratio", q / p);
                rec.std_error = Some((q * (1.0 - q) / n as f64).sqrt() / p);
                rec.n_samples = Some(n as u64);
                rec.note = format!("x={}", crate::fmt::g17(x));
                out.records.push(rec);
            }
            Operation::Hill => {
                let alpha = hill_estimator(thr.norms(), thr.k).map_err(core)?;
                out.records.push(st.record(op, "alpha", alpha));
            }
            _ => unreachable!("analytic operation {op} in the empirical runner"),
        }
    }
    Ok(out)
}

fn simulate_paths(ctx: &Ctx<'_>, n: usize) -> CliResult<Vec<PathMatrix>> {
    ctx.exec
        .map(ctx.cfg.run.replicates, |j| ctx.model.simulate(n, path_stream(ctx.seed(), j)))
        .into_iter()
        .collect::<tailproc_core::Result<Vec<_>>>()
        .map_err(|e| CliError::from_core("simulate", e))
}

fn empirical_over(ctx: &Ctx<'_>, ops: &[Operation], paths: &[PathMatrix]) -> CliResult<Out> {
    let parts = ctx.exec.map(paths.len(), |j| empirical(ctx, ops, &paths[j], j));
    let mut out = Out::default();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn analytic_ops(ctx: &Ctx<'_>, ops: &[Operation]) -> CliResult<Out> {
    let mut out = Out::default();
    for &op in ops.iter().filter(|o| !o.is_empirical()) {
        out.extend(analytic_op(ctx, op)?);
    }
    Ok(out)
}

fn report(cfg: &ExperimentConfig, model: &Model, out: Out, exec: &RayonExecutor, start: Instant) -> RunReport {
    RunReport {
        schema: io::REPORT_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        config_hash: cfg.hash.clone(),
        model_id: model.model_id(),
        master_seed: cfg.run.master_seed,
        ladder: Vec::new(),
        warnings: out.warnings,
        records: out.records,
        distributions: out.distributions,
        paths: Vec::new(),
        wall_clock: start.elapsed().as_secs_f64(),
        workers: exec.workers(),
    }
}

/// Runs one subcommand other than `sweep`. `input` replaces simulation by
/// a path read from disk (`estimate` only).
pub fn execute(
    cfg: &ExperimentConfig,
    command: Command,
    exec: &RayonExecutor,
    input: Option<&Path>,
) -> CliResult<RunReport> {
    let start = Instant::now();
    cfg.validate()?;
    let model = Model::build(&cfg.model)?;
    let ctx = Ctx {
        cfg,
        model: &model,
        exec,
    };
    let ops = operations(cfg, model.family(), command);
    let mut out = analytic_ops(&ctx, &ops)?;
    let needs_path = command == Command::Simulate || ops.iter().any(Operation::is_empirical);
    let mut paths = Vec::new();
    if needs_path {
        paths = match input {
            Some(file) => vec![io::read_path(file)?],
            None => simulate_paths(&ctx, cfg.run.n)?,
        };
        if let (Some(file), Some(p)) = (input, paths.first()) {
            if p.dim() != model.dim() {
                return Err(CliError::validation(
                    "model.d",
                    format!("{} has {} columns, the model has d = {}", file.display(), p.dim(), model.dim()),
                ));
            }
        }
        if command == Command::Simulate {
            let st = ctx.stamp();
            for (j, p) in paths.iter().enumerate() {
                let max = p.norms(&model.norm).into_iter().fold(0.0, f64::max);
                let mut rec = st.record(Operation::Hill, "max-norm", max);
                rec.operation = "simulate".into();
                rec.replicate = Some(j);
                rec.n = Some(p.len());
                rec.note = format!("path-{j}.csv");
                out.records.push(rec);
            }
        }
        let empirical_ops: Vec<Operation> = ops.iter().copied().filter(Operation::is_empirical).collect();
        if !empirical_ops.is_empty() {
            out.extend(empirical_over(&ctx, &empirical_ops, &paths)?);
        }
    }
    let mut rep = report(cfg, &model, out, exec, start);
    if command == Command::Simulate || cfg.output.write_path {
        rep.paths = paths;
    }
    Ok(rep)
}

/// Cross product of the ladder values; analytic operations run once, the
/// empirical ones at every grid point. An empty ladder is exactly `run`.
pub fn sweep(cfg: &ExperimentConfig, ladder: &Ladder, exec: &RayonExecutor) -> CliResult<RunReport> {
    if ladder.is_empty() {
        return execute(cfg, Command::Run, exec, None);
    }
    let start = Instant::now();
    for (k, v) in ladder {
        if v.is_empty() {
            return Err(CliError::validation(format!("sweep.{}", k.name()), "empty value list"));
        }
    }
    let mut grid = vec![cfg.clone()];
    for (key, values) in ladder {
        let mut next = Vec::with_capacity(grid.len() * values.len());
        for c in &grid {
            for &v in values {
                next.push(c.with_ladder_value(*key, v)?);
            }
        }
        grid = next;
    }
    let model = Model::build(&cfg.model)?;
    let ctx = Ctx {
        cfg,
        model: &model,
        exec,
    };
    let ops = operations(cfg, model.family(), Command::Sweep);
    let mut out = analytic_ops(&ctx, &ops)?;
    let empirical_ops: Vec<Operation> = ops.iter().copied().filter(Operation::is_empirical).collect();
    if !empirical_ops.is_empty() {
        for point in &grid {
            let c = Ctx {
                cfg: point,
                model: &model,
                exec,
            };
            let paths = simulate_paths(&c, point.run.n)?;
            out.extend(empirical_over(&c, &empirical_ops, &paths)?);
        }
    }
    let mut rep = report(cfg, &model, out, exec, start);
    rep.ladder = ladder.iter().map(|(k, v)| (k.name().to_string(), v.clone())).collect();
    Ok(rep)
}

/// Writes the summary table, distributions, report, timing and any paths
/// to `dir`; returns the files written.
pub fn write_outputs(rep: &RunReport, cfg: &ExperimentConfig, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> CliResult<()> {
        let f = dir.join(name);
        io::atomic_write(&f, &bytes)?;
        files.push(f);
        Ok(())
    };
    put(io::summary_file_name(cfg.output.format), io::summary_bytes(&rep.records, cfg.output.format))?;
    put("distributions.jsonl", io::jsonl(&rep.distributions))?;
    let mut report = serde_json::to_vec_pretty(rep).expect("serializable");
    report.push(b'\n');
    put("report.json", report)?;
    let timing = serde_json::json!({ "wall_clock_seconds": rep.wall_clock, "workers": rep.workers });
    put("timing.json", format!("{timing}\n").into_bytes())?;
    for (j, p) in rep.paths.iter().enumerate() {
        let f = dir.join(format!("path-{j}.csv"));
        io::write_path(&f, p, cfg.model.alpha)?;
        files.push(f);
    }
    Ok(files)
}
