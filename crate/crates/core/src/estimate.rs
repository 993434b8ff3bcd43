//! Extremal-index estimates shared by the analytic and empirical routes.

use core::fmt;

/// How a [`ThetaEstimate`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    ClosedForm,
    McForward,
    McMma,
    Runs,
    Blocks,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::McForward => "mc-forward",
            Method::McMma => "mc-mma",
            Method::Runs => "runs",
            Method::Blocks => "blocks",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An extremal-index value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThetaEstimate {
    pub method: Method,
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    /// Upper bound on the bias from truncating infinite suprema, if any.
    pub truncation: Option<f64>,
    /// Set when the raw estimate fell outside `[0, 1]` and was clamped.
    pub clamped: bool,
}

impl ThetaEstimate {
    pub fn closed_form(value: f64) -> Self {
        ThetaEstimate {
            method: Method::ClosedForm,
            value,
            std_error: 0.0,
            n_samples: 0,
            truncation: None,
            clamped: false,
        }
    }

    pub(crate) fn new(method: Method, raw: f64, std_error: f64, n_samples: u64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        ThetaEstimate {
            method,
            value,
            std_error,
            n_samples,
            truncation: None,
            clamped: value != raw,
        }
    }

    /// `|self - other| <= k * pooled SE + slack`.
    pub fn agrees_with(&self, other: &ThetaEstimate, k: f64, slack: f64) -> bool {
        let pooled = libm::sqrt(self.std_error * self.std_error + other.std_error * other.std_error);
        (self.value - other.value).abs() <= k * pooled + slack
    }
}
