//! Experiment configs: sectioned `key = value` text.
//!
//! ```ini
//! [model]
//! family = mma
//! alpha = 1
//! c0 = 1
//! c1 = 1
//!
//! [analysis]
//! operations = theta, runs, blocks
//! k = 1000
//! r = power:0.25
//!
//! [run]
//! n = 1000000
//! master_seed = 7
//! ```
//!
//! Lines starting with `#` or `;` are comments, and `#` also starts a
//! trailing comment. Unknown sections and keys, keys that do not apply to the chosen model
//! family and repeated keys are all rejected; every error names its
//! `section.key`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ini::{Ini, ParseOption, Properties};
use sha2::{Digest, Sha256};
use tailproc_core::estimators::{BlockSpec, ThresholdSpec};
use tailproc_core::linalg::Matrix;
use tailproc_core::rv::NormSpec;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Iid,
    Mma,
    Rcar,
}

/// Angular law of a regularly varying vector.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralSpec {
    /// Point mass at `+1` (`d = 1`).
    Positive,
    /// Mass `p` at `+1` and `1 - p` at `-1`.
    TwoSided(f64),
    UniformSphere,
    Points(Vec<(Vec<f64>, f64)>),
}

/// Finite law of a matrix; a single atom is a constant.
pub type MatrixLaw = Vec<(Matrix, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Deterministic(Vec<Matrix>),
    /// Independent draws over lags and time.
    Iid(Vec<MatrixLaw>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub family: Family,
    pub alpha: f64,
    /// Dimension of the series.
    pub d: usize,
    /// Innovation dimension (moving average) or noise dimension.
    pub q: usize,
    pub spectral: SpectralSpec,
    pub norm: NormSpec,
    /// Moving-average coefficients `C_0..C_m`.
    pub coefficients: Option<Coefficients>,
    /// Autoregression: law of `A_t`.
    pub a: Option<MatrixLaw>,
    /// Tail index of `B_t` (defaults to `alpha`).
    pub b_alpha: f64,
    /// Spectral law of the stationary marginal, used by the forward tail chain.
    pub forward_spectral: SpectralSpec,
    pub burn_in: usize,
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operation {
    // analytic
    Theta,
    ThetaForward,
    ClusterLaw,
    Laplace,
    TimeChange,
    LagReversal,
    TailEquivalence,
    Projection,
    // empirical
    Runs,
    Blocks,
    Clusters,
    PointProcess,
    TailProcess,
    Anticluster,
    TailRatio,
    Hill,
}

impl Operation {
    pub const ALL: [Operation; 16] = [
        Operation::Theta,
        Operation::ThetaForward,
        Operation::ClusterLaw,
        Operation::Laplace,
        Operation::TimeChange,
        Operation::LagReversal,
        Operation::TailEquivalence,
        Operation::Projection,
        Operation::Runs,
        Operation::Blocks,
        Operation::Clusters,
        Operation::PointProcess,
        Operation::TailProcess,
        Operation::Anticluster,
        Operation::TailRatio,
        Operation::Hill,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Operation::Theta => "theta",
            Operation::ThetaForward => "theta-forward",
            Operation::ClusterLaw => "cluster-law",
            Operation::Laplace => "laplace",
            Operation::TimeChange => "time-change",
            Operation::LagReversal => "lag-reversal",
            Operation::TailEquivalence => "tail-equivalence",
            Operation::Projection => "projection",
            Operation::Runs => "runs",
            Operation::Blocks => "blocks",
            Operation::Clusters => "clusters",
            Operation::PointProcess => "point-process",
            Operation::TailProcess => "tail-process",
            Operation::Anticluster => "anticluster",
            Operation::TailRatio => "tail-ratio",
            Operation::Hill => "hill",
        }
    }

    /// Whether the operation needs a simulated path.
    pub fn is_empirical(&self) -> bool {
        *self >= Operation::Runs
    }

    /// Fixed tag of the operation's Monte Carlo stream.
    pub fn stream_tag(&self) -> u64 {
        *self as u64 + 1
    }

    /// Whether the operation applies to a model family without extra keys;
    /// used to pick the default operation lists.
    pub fn default_for(&self, family: Family) -> bool {
        match self {
            Operation::TimeChange | Operation::LagReversal => family != Family::Rcar,
            Operation::TailEquivalence | Operation::TailRatio => family == Family::Mma,
            Operation::Projection => false,
            _ => true,
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Operation::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| format!("unknown operation `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    /// Empty means the defaults of the subcommand.
    pub operations: Vec<Operation>,
    pub k: ThresholdSpec,
    pub r: BlockSpec,
    pub u: Vec<f64>,
    pub horizon: usize,
    pub k_max: usize,
    pub n_mc: usize,
    pub m_list: Vec<usize>,
    /// Laplace functional `s · 1(‖x‖ > 1)`.
    pub laplace_s: f64,
    pub time_change_lags: Vec<i64>,
    pub tail_lags: (i64, i64),
    pub projection: Option<Vec<f64>>,
    pub bootstrap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub replicates: usize,
    pub master_seed: u64,
    /// `None`: take `TAILPROC_WORKERS` or the number of CPUs.
    pub workers: Option<usize>,
    pub shards: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(format!("expected csv or jsonl, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: String,
    pub format: Format,
    pub write_path: bool,
}

/// A parameter that sweeps may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKey {
    N,
    K,
    R,
    U,
}

impl FromStr for LadderKey {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "n" => Ok(LadderKey::N),
            "k" => Ok(LadderKey::K),
            "r" => Ok(LadderKey::R),
            "u" => Ok(LadderKey::U),
            _ => Err(format!("cannot sweep over `{s}`; expected one of n, k, r, u")),
        }
    }
}

impl LadderKey {
    pub fn name(&self) -> &'static str {
        match self {
            LadderKey::N => "n",
            LadderKey::K => "k",
            LadderKey::R => "r",
            LadderKey::U => "u",
        }
    }
}

pub type Ladder = Vec<(LadderKey, Vec<f64>)>;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub analysis: AnalysisConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
    pub sweep: Ladder,
    /// Hex SHA-256 of the config text as read.
    pub hash: String,
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

const MODEL_COMMON: &[&str] = &["family", "alpha", "d", "spectral", "norm"];
const MODEL_MMA: &[&str] = &["q", "m", "coefficients"];
const MODEL_RCAR: &[&str] = &["a", "b_alpha", "b_spectral", "forward_spectral", "burn_in", "eps"];
const ANALYSIS: &[&str] = &[
    "operations",
    "k",
    "r",
    "u",
    "horizon",
    "k_max",
    "n_mc",
    "m_list",
    "laplace_s",
    "time_change_lags",
    "tail_lags",
    "projection",
    "bootstrap",
];
const RUN: &[&str] = &["n", "replicates", "master_seed", "workers", "shards"];
const OUTPUT: &[&str] = &["dir", "format", "write_path"];

/// Values of one section, consumed key by key.
struct Section<'a> {
    name: &'static str,
    props: Option<&'a Properties>,
}

impl<'a> Section<'a> {
    fn key(&self, k: &str) -> String {
        format!("{}.{k}", self.name)
    }

    fn raw(&self, k: &str) -> Option<&'a str> {
        self.props.and_then(|p| p.get(k)).map(value)
    }

    fn err(&self, k: &str, msg: impl Into<String>) -> CliError {
        CliError::validation(self.key(k), msg)
    }

    fn parse<T: FromStr>(&self, k: &str) -> CliResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(k)
            .map(|v| v.parse::<T>().map_err(|e| self.err(k, format!("cannot parse `{v}`: {e}"))))
            .transpose()
    }

    fn or<T: FromStr>(&self, k: &str, default: T) -> CliResult<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.parse(k)?.unwrap_or(default))
    }

    fn with<T>(&self, k: &str, f: impl FnOnce(&str) -> Result<T, String>) -> CliResult<Option<T>> {
        self.raw(k).map(|v| f(v).map_err(|e| self.err(k, e))).transpose()
    }

    fn list<T: FromStr>(&self, k: &str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        self.with(k, |v| parse_list(v))
    }
}

pub fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("cannot parse `{s}`: {e}")))
        .collect()
}

/// Value without a trailing `# comment`. `;` only starts a comment at the
/// beginning of a line because it separates matrix rows.
fn value(raw: &str) -> &str {
    raw.split('#').next().unwrap_or_default().trim()
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("cannot parse `{s}`: {e}"))
}

/// `"1 0; 0 1"`, rows separated by `;`.
pub fn parse_matrix(s: &str) -> Result<Matrix, String> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|row| row.split_whitespace().map(parse_f64).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    if rows.is_empty() || rows[0].is_empty() {
        return Err("empty matrix".into());
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(format!("ragged matrix `{s}`"));
    }
    Ok(Matrix::from_rows(&rows))
}

/// `"0 @ 0.5 | 2 @ 0.5"`; an atom without `@` has weight 1.
pub fn parse_matrix_law(s: &str) -> Result<MatrixLaw, String> {
    s.split('|')
        .map(|atom| match atom.split_once('@') {
            Some((m, w)) => Ok((parse_matrix(m)?, parse_f64(w)?)),
            None => Ok((parse_matrix(atom)?, 1.0)),
        })
        .collect()
}

pub fn parse_spectral(s: &str) -> Result<SpectralSpec, String> {
    let s = s.trim();
    if s == "+1" || s == "positive" {
        return Ok(SpectralSpec::Positive);
    }
    if s == "uniform-sphere" {
        return Ok(SpectralSpec::UniformSphere);
    }
    if let Some(p) = s.strip_prefix("two-sided:") {
        return Ok(SpectralSpec::TwoSided(parse_f64(p)?));
    }
    if let Some(pts) = s.strip_prefix("points:") {
        let atoms = pts
            .split('|')
            .map(|atom| {
                let (v, w) = atom
                    .split_once('@')
                    .ok_or_else(|| format!("atom `{}` needs `@ weight`", atom.trim()))?;
                let v = v.split_whitespace().map(parse_f64).collect::<Result<Vec<_>, _>>()?;
                Ok((v, parse_f64(w)?))
            })
            .collect::<Result<Vec<_>, String>>()?;
        return Ok(SpectralSpec::Points(atoms));
    }
    Err(format!(
        "unknown spectral law `{s}`; expected +1, two-sided:p, uniform-sphere or points: ..."
    ))
}

pub fn parse_norm(s: &str) -> Result<NormSpec, String> {
    match s.trim() {
        "euclidean" => Ok(NormSpec::Euclidean),
        "max" => Ok(NormSpec::Max),
        other => {
            let rest = other
                .strip_prefix("block-max:")
                .ok_or_else(|| format!("unknown norm `{other}`"))?;
            let (inner, blocks) = rest
                .rsplit_once(':')
                .ok_or_else(|| "block-max needs `block-max:<inner>:<blocks>`".to_string())?;
            let blocks: usize = blocks.parse().map_err(|e| format!("block count: {e}"))?;
            if blocks == 0 {
                return Err("block count must be >= 1".into());
            }
            Ok(NormSpec::block_max(parse_norm(inner)?, blocks))
        }
    }
}

/// `1000` (order statistic) or `quantile:0.999`.
pub fn parse_threshold(s: &str) -> Result<ThresholdSpec, String> {
    match s.strip_prefix("quantile:") {
        Some(p) => Ok(ThresholdSpec::Quantile(parse_f64(p)?)),
        None => s
            .parse::<usize>()
            .map(ThresholdSpec::OrderStatistic)
            .map_err(|e| format!("cannot parse `{s}`: {e}")),
    }
}

/// `power:0.6` or an explicit length.
pub fn parse_block(s: &str) -> Result<BlockSpec, String> {
    match s.strip_prefix("power:") {
        Some(g) => Ok(BlockSpec::Power(parse_f64(g)?)),
        None => s
            .parse::<usize>()
            .map(BlockSpec::Explicit)
            .map_err(|e| format!("cannot parse `{s}`: {e}")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}

fn check_keys(name: &str, props: &Properties, allowed: &[&str]) -> CliResult<()> {
    for (k, _) in props.iter() {
        if !allowed.contains(&k) {
            return Err(CliError::validation(format!("{name}.{k}"), "unknown key"));
        }
        if props.get_all(k).count() > 1 {
            return Err(CliError::validation(format!("{name}.{k}"), "key given more than once"));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::validation("config", "config is not valid UTF-8"))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let opt = ParseOption {
            enabled_quote: true,
            enabled_escape: false,
            ..ParseOption::default()
        };
        // the parser merges repeated sections, so look at the headers first
        let mut headers: Vec<&str> = Vec::new();
        for line in text.lines().map(str::trim) {
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
                let name = name.trim();
                if headers.contains(&name) {
                    return Err(CliError::validation(name, "section given more than once"));
                }
                headers.push(name);
            }
        }
        let ini = Ini::load_from_str_opt(text, opt)
            .map_err(|e| CliError::validation("config", format!("line {}: {}", e.line, e.msg)))?;
        if let Some((k, _)) = ini.general_section().iter().next() {
            return Err(CliError::validation(k, "key outside any section"));
        }
        for name in ini.sections().flatten() {
            if !["model", "analysis", "run", "output", "sweep"].contains(&name) {
                return Err(CliError::validation(name, "unknown section"));
            }
        }
        let section = |name: &'static str| Section {
            name,
            props: ini.section(Some(name)),
        };
        let model = parse_model(&section("model"))?;
        let analysis = parse_analysis(&section("analysis"))?;
        let run = parse_run(&section("run"))?;
        let output = parse_output(&section("output"))?;
        let sweep = parse_sweep(&section("sweep"))?;
        let cfg = ExperimentConfig {
            model,
            analysis,
            run,
            output,
            sweep,
            hash: config_hash(text.as_bytes()),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Cross-section checks that do not need a simulated path.
    pub fn validate(&self) -> CliResult<()> {
        let n = self.run.n;
        if n < 2 {
            return Err(CliError::validation("run.n", "path length must be >= 2"));
        }
        match self.analysis.k {
            ThresholdSpec::OrderStatistic(k) if k == 0 || k >= n => {
                return Err(CliError::validation(
                    "analysis.k",
                    format!("need 1 <= k < n = {n}, got k = {k}"),
                ));
            }
            ThresholdSpec::Quantile(p) if !(p > 0.0 && p < 1.0) => {
                return Err(CliError::validation("analysis.k", "quantile must lie in (0, 1)"));
            }
            _ => {}
        }
        match self.analysis.r {
            BlockSpec::Explicit(r) if r == 0 || r > n => {
                return Err(CliError::validation(
                    "analysis.r",
                    format!("need 1 <= r <= n = {n}, got r = {r}"),
                ));
            }
            BlockSpec::Power(g) if !(g > 0.0 && g < 1.0) => {
                return Err(CliError::validation("analysis.r", "exponent must lie in (0, 1)"));
            }
            _ => {}
        }
        if self.analysis.u.iter().any(|&u| !(u >= 1.0 && u.is_finite())) {
            return Err(CliError::validation("analysis.u", "levels must be finite and >= 1"));
        }
        if self.analysis.n_mc < 2 {
            return Err(CliError::validation("analysis.n_mc", "need at least two draws"));
        }
        if self.run.replicates == 0 {
            return Err(CliError::validation("run.replicates", "must be >= 1"));
        }
        if self.run.shards == 0 {
            return Err(CliError::validation("run.shards", "must be >= 1"));
        }
        if self.run.workers == Some(0) {
            return Err(CliError::validation("run.workers", "must be >= 1"));
        }
        if let Some(a) = &self.analysis.projection {
            if a.len() != self.model.d {
                return Err(CliError::validation(
                    "analysis.projection",
                    format!("need {} weights, got {}", self.model.d, a.len()),
                ));
            }
        }
        Ok(())
    }

    pub fn with_ladder_value(&self, key: LadderKey, v: f64) -> CliResult<Self> {
        let mut c = self.clone();
        let as_count = |v: f64, name: &str| -> CliResult<usize> {
            if v >= 1.0 && v.fract() == 0.0 && v < 1e15 {
                Ok(v as usize)
            } else {
                Err(CliError::validation(format!("sweep.{name}"), format!("`{v}` is not a count")))
            }
        };
        match key {
            LadderKey::N => c.run.n = as_count(v, "n")?,
            LadderKey::K => c.analysis.k = ThresholdSpec::OrderStatistic(as_count(v, "k")?),
            LadderKey::R => c.analysis.r = BlockSpec::Explicit(as_count(v, "r")?),
            LadderKey::U => c.analysis.u = vec![v],
        }
        c.validate()?;
        Ok(c)
    }
}

fn parse_model(s: &Section<'_>) -> CliResult<ModelConfig> {
    let props = s
        .props
        .ok_or_else(|| CliError::validation("model", "missing [model] section"))?;
    let family = match s.raw("family") {
        Some("iid") => Family::Iid,
        Some("mma") => Family::Mma,
        Some("rcar") => Family::Rcar,
        Some(other) => return Err(s.err("family", format!("unknown family `{other}`"))),
        None => return Err(s.err("family", "missing")),
    };
    // coefficient keys c0, c1, ... are only valid for moving averages
    let mut allowed: Vec<String> = MODEL_COMMON.iter().map(|k| k.to_string()).collect();
    let extra = match family {
        Family::Iid => &[][..],
        Family::Mma => MODEL_MMA,
        Family::Rcar => MODEL_RCAR,
    };
    allowed.extend(extra.iter().map(|k| k.to_string()));
    let mut lags = Vec::new();
    for (k, _) in props.iter() {
        if let Some(i) = k.strip_prefix('c').and_then(|i| i.parse::<usize>().ok()) {
            if family == Family::Mma {
                allowed.push(k.to_string());
                lags.push(i);
            }
        }
    }
    let allowed_ref: Vec<&str> = allowed.iter().map(String::as_str).collect();
    check_keys("model", props, &allowed_ref)?;

    let alpha: f64 = s.parse("alpha")?.ok_or_else(|| s.err("alpha", "missing"))?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(s.err("alpha", "must be positive and finite"));
    }
    let spectral = s.with("spectral", parse_spectral)?.unwrap_or(SpectralSpec::Positive);
    let norm = s.with("norm", parse_norm)?.unwrap_or(NormSpec::Euclidean);
    let spectral_dim = match &spectral {
        SpectralSpec::Points(atoms) => atoms.first().map(|a| a.0.len()),
        SpectralSpec::Positive | SpectralSpec::TwoSided(_) => Some(1),
        SpectralSpec::UniformSphere => None,
    };
    let d: usize = s.or("d", if family == Family::Mma { 1 } else { spectral_dim.unwrap_or(1) })?;
    if d == 0 {
        return Err(s.err("d", "must be >= 1"));
    }

    let mut cfg = ModelConfig {
        family,
        alpha,
        d,
        q: d,
        spectral,
        norm,
        coefficients: None,
        a: None,
        b_alpha: alpha,
        forward_spectral: SpectralSpec::Positive,
        burn_in: 1000,
        eps: 1e-6,
    };
    match family {
        Family::Iid => {}
        Family::Mma => {
            cfg.q = s.or("q", spectral_dim.unwrap_or(d))?;
            lags.sort_unstable();
            let m = lags.len().checked_sub(1).ok_or_else(|| s.err("c0", "missing"))?;
            if lags.iter().enumerate().any(|(i, &l)| i != l) {
                return Err(s.err(&format!("c{}", lags.len()), "lags must be c0, c1, ... without gaps"));
            }
            if let Some(mm) = s.parse::<usize>("m")? {
                if mm != m {
                    return Err(s.err("m", format!("m = {mm} but c0..c{m} are given")));
                }
            }
            let mode = s.raw("coefficients").unwrap_or("deterministic");
            let laws: Vec<MatrixLaw> = (0..=m)
                .map(|i| {
                    let k = format!("c{i}");
                    parse_matrix_law(s.raw(&k).unwrap_or_default()).map_err(|e| s.err(&k, e))
                })
                .collect::<CliResult<_>>()?;
            cfg.coefficients = Some(match mode {
                "deterministic" => Coefficients::Deterministic(
                    laws.into_iter()
                        .enumerate()
                        .map(|(i, law)| match <[_; 1]>::try_from(law) {
                            Ok([(c, _)]) => Ok(c),
                            Err(_) => Err(s.err(
                                &format!("c{i}"),
                                "deterministic coefficients take a single matrix",
                            )),
                        })
                        .collect::<CliResult<_>>()?,
                ),
                "iid" => Coefficients::Iid(laws),
                other => {
                    return Err(s.err(
                        "coefficients",
                        format!("unknown mode `{other}`; expected deterministic or iid"),
                    ))
                }
            });
        }
        Family::Rcar => {
            let a = s.with("a", parse_matrix_law)?.ok_or_else(|| s.err("a", "missing"))?;
            cfg.a = Some(a);
            cfg.b_alpha = s.or("b_alpha", alpha)?;
            if !(cfg.b_alpha > 0.0 && cfg.b_alpha.is_finite()) {
                return Err(s.err("b_alpha", "must be positive and finite"));
            }
            cfg.spectral = s.with("b_spectral", parse_spectral)?.unwrap_or(cfg.spectral);
            cfg.forward_spectral = s
                .with("forward_spectral", parse_spectral)?
                .unwrap_or_else(|| cfg.spectral.clone());
            cfg.burn_in = s.or("burn_in", cfg.burn_in)?;
            cfg.eps = s.or("eps", cfg.eps)?;
            if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
                return Err(s.err("eps", "must lie in (0, 1)"));
            }
        }
    }
    Ok(cfg)
}

fn parse_analysis(s: &Section<'_>) -> CliResult<AnalysisConfig> {
    if let Some(p) = s.props {
        check_keys("analysis", p, ANALYSIS)?;
    }
    let tail_lags = match s.list::<i64>("tail_lags")? {
        None => (-2, 2),
        Some(v) if v.len() == 2 && v[0] <= 0 && v[1] >= 0 => (v[0], v[1]),
        Some(_) => return Err(s.err("tail_lags", "expected `s, t` with s <= 0 <= t")),
    };
    let m_list = s.list("m_list")?.unwrap_or_else(|| vec![1, 2, 3, 5, 10]);
    if m_list.is_empty() || m_list.windows(2).any(|w| w[0] >= w[1]) || m_list[0] == 0 {
        return Err(s.err("m_list", "lags must be >= 1 and strictly increasing"));
    }
    Ok(AnalysisConfig {
        operations: s.list("operations")?.unwrap_or_default(),
        k: s.with("k", parse_threshold)?.unwrap_or(ThresholdSpec::OrderStatistic(1000)),
        r: s.with("r", parse_block)?.unwrap_or_default(),
        u: s.list("u")?.unwrap_or_else(|| vec![1.0, 2.0]),
        horizon: s.or("horizon", 50)?,
        k_max: s.or("k_max", 30)?,
        n_mc: s.or("n_mc", 100_000)?,
        m_list,
        laplace_s: s.or("laplace_s", 1.0)?,
        time_change_lags: s.list("time_change_lags")?.unwrap_or_else(|| vec![-2, -1, 0, 1, 2]),
        tail_lags,
        projection: s.list("projection")?,
        bootstrap: s.or("bootstrap", 0)?,
    })
}

fn parse_run(s: &Section<'_>) -> CliResult<RunConfig> {
    if let Some(p) = s.props {
        check_keys("run", p, RUN)?;
    }
    Ok(RunConfig {
        n: s.or("n", 100_000)?,
        replicates: s.or("replicates", 1)?,
        master_seed: s.or("master_seed", 0)?,
        workers: s.parse("workers")?,
        shards: s.or("shards", tailproc_core::mc::McPlan::DEFAULT_SHARDS)?,
    })
}

fn parse_output(s: &Section<'_>) -> CliResult<OutputConfig> {
    if let Some(p) = s.props {
        check_keys("output", p, OUTPUT)?;
    }
    Ok(OutputConfig {
        dir: s.raw("dir").unwrap_or("out").to_string(),
        format: s.or("format", Format::Csv)?,
        write_path: s.with("write_path", parse_bool)?.unwrap_or(false),
    })
}

fn parse_sweep(s: &Section<'_>) -> CliResult<Ladder> {
    let Some(p) = s.props else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for (k, v) in p.iter() {
        let key = k.parse::<LadderKey>().map_err(|e| s.err(k, e))?;
        if out.iter().any(|(kk, _)| *kk == key) {
            return Err(s.err(k, "key given more than once"));
        }
        out.push((key, parse_list::<f64>(value(v)).map_err(|e| s.err(k, e))?));
    }
    Ok(out)
}

/// `key=v1,v2,...` from the command line.
pub fn parse_ladder_arg(arg: &str) -> CliResult<(LadderKey, Vec<f64>)> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| CliError::validation("sweep", format!("expected key=v1,v2, got `{arg}`")))?;
    let key = k.trim().parse::<LadderKey>().map_err(|e| CliError::validation(format!("sweep.{}", k.trim()), e))?;
    let values = parse_list(v).map_err(|e| CliError::validation(format!("sweep.{}", k.trim()), e))?;
    Ok((key, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MA1: &str = "
[model]
family = mma
alpha = 1
c0 = 1
c1 = 1   # comment

[analysis]
k = 100
r = power:0.25
u = 1, 2, 4

[run]
n = 10000
master_seed = 3
";

    fn key_of(e: CliError) -> String {
        match e {
            CliError::Validation { key, .. } => key,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_minimal_moving_average() {
        let c = ExperimentConfig::parse(MA1).unwrap();
        assert_eq!(c.model.family, Family::Mma);
        assert_eq!(
            c.model.coefficients,
            Some(Coefficients::Deterministic(vec![Matrix::scalar(1.0), Matrix::scalar(1.0)]))
        );
        assert_eq!(c.analysis.k, ThresholdSpec::OrderStatistic(100));
        assert_eq!(c.analysis.r, BlockSpec::Power(0.25));
        assert_eq!(c.analysis.u, vec![1.0, 2.0, 4.0]);
        assert_eq!(c.run.master_seed, 3);
        assert_eq!(c.hash, config_hash(MA1.as_bytes()));
    }

    #[test]
    fn k_not_below_n_names_key() {
        let text = MA1.replace("k = 100", "k = 10000");
        assert_eq!(key_of(ExperimentConfig::parse(&text).unwrap_err()), "analysis.k");
    }

    #[test]
    fn unknown_and_duplicate_keys_rejected() {
        let e = ExperimentConfig::parse(&MA1.replace("k = 100", "k = 100\nkk = 3")).unwrap_err();
        assert_eq!(key_of(e), "analysis.kk");
        let e = ExperimentConfig::parse(&MA1.replace("k = 100", "k = 100\nk = 200")).unwrap_err();
        assert_eq!(key_of(e), "analysis.k");
        // autoregression keys do not apply to a moving average
        let e = ExperimentConfig::parse(&MA1.replace("alpha = 1", "alpha = 1\neps = 0.1")).unwrap_err();
        assert_eq!(key_of(e), "model.eps");
        let e = ExperimentConfig::parse(&format!("{MA1}\n[extra]\nx = 1\n")).unwrap_err();
        assert_eq!(key_of(e), "extra");
    }

    #[test]
    fn coefficient_gaps_rejected() {
        let e = ExperimentConfig::parse(&MA1.replace("c1 = 1", "c2 = 1")).unwrap_err();
        assert!(key_of(e).starts_with("model.c"));
    }

    #[test]
    fn value_grammars() {
        assert_eq!(parse_matrix("1 0; 0 2").unwrap(), Matrix::diag(&[1.0, 2.0]));
        assert!(parse_matrix("1 0; 2").is_err());
        let law = parse_matrix_law("0 @ 0.5 | 2 @ 0.5").unwrap();
        assert_eq!(law, vec![(Matrix::scalar(0.0), 0.5), (Matrix::scalar(2.0), 0.5)]);
        assert_eq!(parse_spectral("two-sided:0.3").unwrap(), SpectralSpec::TwoSided(0.3));
        assert_eq!(
            parse_spectral("points: 1 0 @ 0.5 | 0 1 @ 0.5").unwrap(),
            SpectralSpec::Points(vec![(vec![1.0, 0.0], 0.5), (vec![0.0, 1.0], 0.5)])
        );
        assert_eq!(
            parse_norm("block-max:euclidean:2").unwrap(),
            NormSpec::block_max(NormSpec::Euclidean, 2)
        );
        assert_eq!(parse_threshold("quantile:0.99").unwrap(), ThresholdSpec::Quantile(0.99));
        assert_eq!(parse_block("32").unwrap(), BlockSpec::Explicit(32));
    }

    #[test]
    fn ladder_argument() {
        let (k, v) = parse_ladder_arg("n=1e4,1e5").unwrap();
        assert_eq!(k, LadderKey::N);
        assert_eq!(v, vec![1e4, 1e5]);
        assert_eq!(key_of(parse_ladder_arg("alpha=1,2").unwrap_err()), "sweep.alpha");
    }

    #[test]
    fn rcar_defaults() {
        let c = ExperimentConfig::parse("[model]\nfamily = rcar\nalpha = 1\na = 0.5\n").unwrap();
        assert_eq!(c.model.a, Some(vec![(Matrix::scalar(0.5), 1.0)]));
        assert_eq!(c.model.forward_spectral, SpectralSpec::Positive);
        assert_eq!(c.model.b_alpha, 1.0);
    }
}
