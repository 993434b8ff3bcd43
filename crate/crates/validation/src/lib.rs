//! Shared pieces of the acceptance battery: the battery models as
//! experiment configs, and a PASS/FAIL ledger with one line per criterion.

use std::fmt;

use tailproc::config::ExperimentConfig;
use tailproc::error::CliResult;
use tailproc::exec::RayonExecutor;
use tailproc::io::Record;
use tailproc::run::{execute, Command, RunReport};

/// Seed shared by every acceptance run, fixed before any run was looked at.
pub const SEED: u64 = 2026;
pub const N: usize = 1_000_000;
pub const K: usize = 1000;

/// A battery model with a known extremal index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Iid,
    /// `X_t = Z_t + c Z_{t-1}`, positive Pareto(α) innovations.
    Ma1 { c: f64, alpha: f64 },
    /// `X_t = 0.5 X_{t-1} + B_t`, positive Pareto(1) `B_t`.
    HalfAr,
}

impl Model {
    pub const BATTERY: [Model; 5] = [
        Model::Iid,
        Model::Ma1 { c: 1.0, alpha: 1.0 },
        Model::Ma1 { c: 2.0, alpha: 1.0 },
        Model::Ma1 { c: 1.0, alpha: 2.0 },
        Model::HalfAr,
    ];

    pub fn theta(&self) -> f64 {
        match *self {
            Model::Iid => 1.0,
            Model::Ma1 { c, alpha } => {
                let ca = c.powf(alpha);
                ca.max(1.0) / (1.0 + ca)
            }
            Model::HalfAr => 0.5,
        }
    }

    fn section(&self) -> String {
        match *self {
            Model::Iid => "family = iid\nalpha = 1\n".into(),
            Model::Ma1 { c, alpha } => format!(
                "family = mma\nalpha = {alpha}\nspectral = +1\ncoefficients = deterministic\nc0 = 1\nc1 = {c}\n"
            ),
            Model::HalfAr => "family = rcar\nalpha = 1\na = 0.5\nforward_spectral = +1\n".into(),
        }
    }

    /// Forward horizon long enough that the tail chain has died out.
    fn horizon(&self) -> usize {
        match self {
            Model::HalfAr => 60,
            _ => 10,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Iid => f.write_str("iid"),
            Model::Ma1 { c, alpha } => write!(f, "ma1(c={c},alpha={alpha})"),
            Model::HalfAr => f.write_str("rcar(a=0.5)"),
        }
    }
}

/// Config for `model` running `operations` at block rule `r`, one path of
/// length [`N`], `k = K`, seed [`SEED`]. `extra` is appended to `[analysis]`.
pub fn config(model: Model, operations: &str, r: &str, extra: &str) -> ExperimentConfig {
    let text = format!(
        "[model]\n{}\n[analysis]\noperations = {operations}\nk = {K}\nr = {r}\nhorizon = {}\nn_mc = 100000\n{extra}\n\
         [run]\nn = {N}\nmaster_seed = {SEED}\n",
        model.section(),
        model.horizon(),
    );
    ExperimentConfig::parse(&text).expect("battery configs are valid")
}

pub fn run(cfg: &ExperimentConfig, exec: &RayonExecutor) -> CliResult<RunReport> {
    execute(cfg, Command::Run, exec, None)
}

/// The record `(operation, statistic)` at level `u` (or without a level).
pub fn record<'a>(rep: &'a RunReport, operation: &str, statistic: &str, u: Option<f64>) -> &'a Record {
    rep.records
        .iter()
        .find(|r| r.operation == operation && r.statistic == statistic && r.u == u)
        .unwrap_or_else(|| panic!("no record {operation}/{statistic} at u = {u:?}"))
}

pub fn value(rep: &RunReport, operation: &str, statistic: &str) -> f64 {
    record(rep, operation, statistic, None).value
}

pub fn se(rep: &RunReport, operation: &str, statistic: &str) -> f64 {
    record(rep, operation, statistic, None).std_error.unwrap_or(0.0)
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: String,
    pub pass: bool,
    pub detail: String,
    /// Extra labelled lines that do not enter the verdict.
    pub diagnostics: Vec<String>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<5} {} {}", self.id, if self.pass { "PASS" } else { "FAIL" }, self.detail)?;
        for d in &self.diagnostics {
            writeln!(f, "      diagnostic: {d}")?;
        }
        Ok(())
    }
}

/// Accumulates sub-checks of one criterion; it passes if every one does.
#[derive(Debug, Default)]
pub struct Criterion {
    parts: Vec<(bool, String)>,
    diagnostics: Vec<String>,
}

impl Criterion {
    pub fn check(&mut self, pass: bool, detail: impl Into<String>) -> &mut Self {
        self.parts.push((pass, detail.into()));
        self
    }

    pub fn diagnostic(&mut self, line: impl Into<String>) -> &mut Self {
        self.diagnostics.push(line.into());
        self
    }

    pub fn finish(self, id: &str) -> Verdict {
        let pass = !self.parts.is_empty() && self.parts.iter().all(|p| p.0);
        let detail = self
            .parts
            .iter()
            .map(|(ok, d)| if *ok { d.clone() } else { format!("[x] {d}") })
            .collect::<Vec<_>>()
            .join("; ");
        Verdict {
            id: id.into(),
            pass,
            detail,
            diagnostics: self.diagnostics,
        }
    }
}
