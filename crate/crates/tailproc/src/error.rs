use std::path::PathBuf;

use tailproc_core::Error as CoreError;

/// Errors of the experiment runner. Each one maps to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A config value is missing, malformed or out of range.
    #[error("`{key}`: {msg}")]
    Validation { key: String, msg: String },

    /// The model or data do not support the requested estimate.
    #[error("`{key}`: {source}")]
    Degenerate {
        key: String,
        #[source]
        source: CoreError,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// One or more invariants of the verification battery failed.
    #[error("{failed} of {total} invariants failed")]
    VerifyFailed { failed: usize, total: usize },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn validation(key: impl Into<String>, msg: impl Into<String>) -> Self {
        CliError::Validation {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for validation errors, 3 for degenerate estimates, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Degenerate { .. } => 3,
            CliError::Io { .. } | CliError::VerifyFailed { .. } => 1,
        }
    }

    /// Converts a library error raised while running `op`, naming the config
    /// key the failing parameter came from.
    pub fn from_core(op: &str, e: CoreError) -> Self {
        match &e {
            CoreError::InvalidParameter { name, reason } => {
                CliError::validation(config_key(name), format!("{reason} (in {op})"))
            }
            CoreError::DimensionMismatch(msg) => CliError::validation("model", msg.clone()),
            CoreError::NotTwoSided { .. } => {
                CliError::validation("analysis.operations", format!("{op}: {e}"))
            }
            CoreError::Divergence { .. }
            | CoreError::DegenerateModel(_)
            | CoreError::DegenerateProjection(_)
            | CoreError::EmptyEstimate(_) => CliError::Degenerate {
                key: format!("analysis.operations.{op}"),
                source: e,
            },
        }
    }
}

/// Config key holding a library parameter.
fn config_key(param: &str) -> String {
    let key = match param {
        "n" => "run.n",
        "replicates" => "run.replicates",
        "k" | "p" => "analysis.k",
        "r" | "gamma" => "analysis.r",
        "u" => "analysis.u",
        "n_mc" => "analysis.n_mc",
        "m_list" => "analysis.m_list",
        "horizon" => "analysis.horizon",
        "k_max" => "analysis.k_max",
        "f" => "analysis.laplace_s",
        "alpha" => "model.alpha",
        "eps" => "model.eps",
        "coefficients" => "model.coefficients",
        "window" => "analysis.tail_lags",
        other => return format!("model.{other}"),
    };
    key.to_string()
}
