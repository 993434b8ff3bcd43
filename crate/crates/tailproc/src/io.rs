//! Output files: atomic writes, path CSVs with their metadata sidecar,
//! summary tables and JSON lines.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tailproc_core::models::PathMatrix;
use tailproc_core::RngStream;

use crate::config::Format;
use crate::error::{CliError, CliResult};
use crate::fmt::g17;

pub const SUMMARY_SCHEMA: &str = "tailproc.summary.v1";
pub const PATH_SCHEMA: &str = "tailproc.path.v1";
pub const DISTRIBUTION_SCHEMA: &str = "tailproc.distribution.v1";
pub const REPORT_SCHEMA: &str = "tailproc.report.v1";

/// Writes `bytes` to a temporary file next to `path`, syncs it and renames
/// it over `path`, so readers never see a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

/// One row of a summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub model_id: String,
    pub seed: u64,
    pub replicate: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub r: Option<usize>,
    pub u: Option<f64>,
    pub operation: String,
    pub statistic: String,
    pub value: f64,
    pub std_error: Option<f64>,
    pub n_samples: Option<u64>,
    pub note: String,
}

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "model_id",
    "seed",
    "replicate",
    "n",
    "k",
    "r",
    "u",
    "operation",
    "statistic",
    "value",
    "std_error",
    "n_samples",
    "note",
];

/// A vector-valued result (a pmf, a list of marks, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub model_id: String,
    pub seed: u64,
    pub replicate: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub r: Option<usize>,
    pub u: Option<f64>,
    pub operation: String,
    pub name: String,
    /// Points the values refer to (sizes, lags, ...), if not `1..=len`.
    pub support: Option<Vec<f64>>,
    pub values: Vec<f64>,
    pub std_errors: Option<Vec<f64>>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn opt_f(v: Option<f64>) -> String {
    v.map(g17).unwrap_or_default()
}

pub fn summary_csv(records: &[Record]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record([
            r.model_id.clone(),
            r.seed.to_string(),
            opt(&r.replicate),
            opt(&r.n),
            opt(&r.k),
            opt(&r.r),
            opt_f(r.u),
            r.operation.clone(),
            r.statistic.clone(),
            g17(r.value),
            opt_f(r.std_error),
            opt(&r.n_samples),
            r.note.clone(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn jsonl<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("serializable");
        out.push(b'\n');
    }
    out
}

pub fn summary_bytes(records: &[Record], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => summary_csv(records),
        Format::Jsonl => jsonl(records),
    }
}

pub fn summary_file_name(format: Format) -> &'static str {
    match format {
        Format::Csv => "summary.csv",
        Format::Jsonl => "summary.jsonl",
    }
}

/// Sidecar written next to a path CSV, as `key=value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMeta {
    pub schema: String,
    pub model_id: String,
    pub master_seed: u64,
    pub stream_id: u64,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
}

impl PathMeta {
    pub fn to_text(&self) -> String {
        format!(
            "schema={}\nmodel={}\nseed={}\nstream_id={}\nn={}\nd={}\nalpha={}\n",
            self.schema,
            self.model_id,
            self.master_seed,
            self.stream_id,
            self.n,
            self.d,
            g17(self.alpha)
        )
    }

    /// Parses [`PathMeta::to_text`] output; `None` if a key is missing or
    /// malformed.
    pub fn from_text(text: &str) -> Option<Self> {
        let get = |key: &str| {
            text.lines()
                .filter_map(|l| l.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim().to_string())
        };
        Some(PathMeta {
            schema: get("schema")?,
            model_id: get("model")?,
            master_seed: get("seed")?.parse().ok()?,
            stream_id: get("stream_id")?.parse().ok()?,
            n: get("n")?.parse().ok()?,
            d: get("d")?.parse().ok()?,
            alpha: get("alpha")?.parse().ok()?,
        })
    }
}

pub fn meta_path(csv: &Path) -> PathBuf {
    let mut p = csv.as_os_str().to_owned();
    p.push(".meta");
    PathBuf::from(p)
}

/// `t,x1,...,xd` with one-based `t`, every value printed with 17
/// significant digits so it reads back exactly.
pub fn path_csv(path: &PathMatrix) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=path.dim()).map(|j| format!("x{j}")));
    w.write_record(&header).expect("in-memory write");
    let mut row = Vec::with_capacity(path.dim() + 1);
    for (t, x) in path.rows().enumerate() {
        row.clear();
        row.push((t + 1).to_string());
        row.extend(x.iter().map(|&v| g17(v)));
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_path(file: &Path, path: &PathMatrix, alpha: f64) -> CliResult<()> {
    atomic_write(file, &path_csv(path))?;
    let meta = PathMeta {
        schema: PATH_SCHEMA.into(),
        model_id: path.model_id.clone(),
        master_seed: path.seed.master_seed,
        stream_id: path.seed.stream_id,
        n: path.len(),
        d: path.dim(),
        alpha,
    };
    atomic_write(&meta_path(file), meta.to_text().as_bytes())
}

/// Reads a path CSV; model id and seed come from the sidecar if present.
pub fn read_path(file: &Path) -> CliResult<PathMatrix> {
    let bad = |msg: String| CliError::validation("input", format!("{}: {msg}", file.display()));
    let mut rdr = csv::Reader::from_path(file).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(file, io),
        other => bad(format!("{other:?}")),
    })?;
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.get(0) != Some("t") || header.len() < 2 {
        return Err(bad("expected a header `t,x1,...`".into()));
    }
    let d = header.len() - 1;
    let mut data = Vec::new();
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        for field in rec.iter().skip(1) {
            let v: f64 = field.parse().map_err(|_| bad(format!("row {}: bad value `{field}`", i + 1)))?;
            if !v.is_finite() {
                return Err(bad(format!("row {}: non-finite value", i + 1)));
            }
            data.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(bad("no rows".into()));
    }
    let meta = fs::read_to_string(meta_path(file))
        .ok()
        .and_then(|t| PathMeta::from_text(&t));
    let (model_id, seed) = match meta {
        Some(m) => (m.model_id, RngStream::new(m.master_seed, m.stream_id)),
        None => ("external".to_string(), RngStream::new(0, 0)),
    };
    Ok(PathMatrix::new(data, n, d, model_id, seed))
}
