use alloc::string::String;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("recursion diverged at time step {step}")]
    Divergence { step: usize },

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("degenerate projection: {0}")]
    DegenerateProjection(String),

    #[error("empty estimate: {0}")]
    EmptyEstimate(String),

    #[error("lag window [{s}, {t}] needs a two-sided spectral sampler")]
    NotTwoSided { s: i64, t: i64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
