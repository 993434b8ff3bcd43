use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::models::PathMatrix;
use crate::rv::norm::NormSpec;

/// How the exceedance level is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ThresholdSpec {
    /// Level = `(k+1)`-th largest norm, so `k` strict exceedances.
    OrderStatistic(usize),
    /// `k = round(n (1 - p))`.
    Quantile(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ThresholdWarning {
    /// `k >= n / 10`: far from the tail.
    LargeFraction,
    /// Ties at the level: fewer than `k` strict exceedances.
    Ties,
    /// No strict exceedance at all.
    NoExceedances,
}

/// A threshold bound to one path.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedThreshold {
    pub spec: ThresholdSpec,
    pub norm: NormSpec,
    /// Requested number of exceedances.
    pub k: usize,
    pub level: f64,
    /// Zero-based times with `‖X_t‖ > level`, increasing.
    pub exceedances: Vec<usize>,
    pub warnings: Vec<ThresholdWarning>,
    norms: Vec<f64>,
}

impl ResolvedThreshold {
    pub fn n(&self) -> usize {
        self.norms.len()
    }

    /// `‖X_t‖` for every `t`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn exceedance_count(&self) -> usize {
        self.exceedances.len()
    }

    pub(crate) fn check_path(&self, path: &PathMatrix) -> Result<()> {
        if path.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "threshold resolved on a path of length {}, applied to length {}",
                self.n(),
                path.len()
            )));
        }
        Ok(())
    }
}

/// Resolves `spec` on `path` under `norm`.
pub fn select_threshold(
    path: &PathMatrix,
    spec: ThresholdSpec,
    norm: &NormSpec,
) -> Result<ResolvedThreshold> {
    let n = path.len();
    let k = match spec {
        ThresholdSpec::OrderStatistic(k) => k,
        ThresholdSpec::Quantile(p) => {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::invalid("p", "quantile must lie in [0, 1)"));
            }
            libm::round(n as f64 * (1.0 - p)) as usize
        }
    };
    if k == 0 {
        return Err(Error::invalid("k", "need at least one exceedance"));
    }
    if k >= n {
        return Err(Error::invalid(
            "k",
            format!("k = {k} must be smaller than the path length n = {n}"),
        ));
    }
    let norms = path.norms(norm);
    let mut sorted = norms.clone();
    // (k+1)-th largest = element n-k-1 in increasing order
    let (_, level, _) = sorted.select_nth_unstable_by(n - k - 1, f64::total_cmp);
    let level = *level;
    let exceedances: Vec<usize> = (0..n).filter(|&t| norms[t] > level).collect();
    let mut warnings = Vec::new();
    if k * 10 >= n {
        warnings.push(ThresholdWarning::LargeFraction);
    }
    if exceedances.is_empty() {
        warnings.push(ThresholdWarning::NoExceedances);
    } else if exceedances.len() < k {
        warnings.push(ThresholdWarning::Ties);
    }
    Ok(ResolvedThreshold {
        spec,
        norm: norm.clone(),
        k,
        level,
        exceedances,
        warnings,
        norms,
    })
}
