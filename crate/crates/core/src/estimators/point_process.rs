use alloc::vec;
use alloc::vec::Vec;

use super::threshold::ResolvedThreshold;
use crate::error::{Error, Result};
use crate::models::PathMatrix;

/// Exceedance point process at one level `x·u`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LevelSummary {
    pub u: f64,
    pub level: f64,
    /// Blocks with at least one exceedance of `x·u`.
    pub cluster_count: usize,
    pub exceedance_count: usize,
    /// Variance over mean of the cluster counts of the two path halves.
    pub dispersion_halves: f64,
    /// Same over the four quarters.
    pub dispersion_quarters: f64,
    /// `‖X_τ‖ / (x u)` for the counted exceedances.
    pub marks: Vec<f64>,
    /// `-log(1 - C/k_n) · n / (r · N)`, from the frequency of blocks
    /// without exceedance; `None` when every or no block exceeds.
    pub theta_log: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CompoundPoissonSummary {
    pub r: usize,
    pub n_blocks: usize,
    pub levels: Vec<LevelSummary>,
}

fn dispersion(counts: &[f64]) -> f64 {
    let g = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / g;
    if mean == 0.0 {
        return f64::NAN;
    }
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (g - 1.0);
    var / mean
}

/// Cluster counts, exceedance counts, dispersion over sub-periods and marks
/// at the levels `x·u` for each `u >= 1`, using blocks of length `r`.
pub fn point_process_summary(
    path: &PathMatrix,
    threshold: &ResolvedThreshold,
    r: usize,
    levels: &[f64],
) -> Result<CompoundPoissonSummary> {
    threshold.check_path(path)?;
    let n = path.len();
    if r == 0 || r > n {
        return Err(Error::invalid("r", alloc::format!("need 1 <= r <= n = {n}, got {r}")));
    }
    let kn = n / r;
    let norms = threshold.norms();
    let mut out = Vec::with_capacity(levels.len());
    for &u in levels {
        if !(u >= 1.0 && u.is_finite()) {
            return Err(Error::invalid("u", "levels must be finite multipliers >= 1"));
        }
        let level = threshold.level * u;
        let mut hit = vec![false; kn];
        let mut marks = Vec::new();
        // exceedances of x·u are a subset of those of x
        for &tau in &threshold.exceedances {
            if tau / r < kn && norms[tau] > level {
                hit[tau / r] = true;
                marks.push(norms[tau] / level);
            }
        }
        let per_group = |g: usize| -> Vec<f64> {
            let size = kn / g;
            (0..g)
                .map(|j| hit[j * size..(j + 1) * size].iter().filter(|&&h| h).count() as f64)
                .collect()
        };
        let cluster_count = hit.iter().filter(|&&h| h).count();
        let all = marks.len();
        let theta_log = (cluster_count > 0 && cluster_count < kn && all > 0).then(|| {
            -libm::log(1.0 - cluster_count as f64 / kn as f64) * n as f64 / (r as f64 * all as f64)
        });
        out.push(LevelSummary {
            u,
            level,
            cluster_count,
            exceedance_count: all,
            dispersion_halves: dispersion(&per_group(2)),
            dispersion_quarters: dispersion(&per_group(4)),
            marks,
            theta_log,
        });
    }
    Ok(CompoundPoissonSummary {
        r,
        n_blocks: kn,
        levels: out,
    })
}
