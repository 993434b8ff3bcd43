use alloc::vec;
use alloc::vec::Vec;

use super::threshold::ResolvedThreshold;
use crate::error::{Error, Result};
use crate::models::PathMatrix;

/// Exceedances of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub block: usize,
    /// Zero-based exceedance times inside the block.
    pub times: Vec<usize>,
    /// `X_τ / x` for each time, flattened.
    pub points: Vec<f64>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.times.len()
    }
}

/// Disjoint blocks of length `r` holding at least one exceedance.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPartition {
    pub level: f64,
    pub r: usize,
    pub dim: usize,
    /// Number of complete blocks, `floor(n / r)`.
    pub n_blocks: usize,
    pub clusters: Vec<Cluster>,
}

impl ClusterPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Cluster::size).collect()
    }

    /// Empirical `Pr(κ = k)` for `k = 1..=max size` (index `k - 1`).
    pub fn size_pmf(&self) -> Vec<f64> {
        let sizes = self.sizes();
        let top = sizes.iter().copied().max().unwrap_or(0);
        let mut pmf = vec![0.0; top];
        for s in &sizes {
            pmf[s - 1] += 1.0;
        }
        let c = sizes.len() as f64;
        pmf.iter_mut().for_each(|p| *p /= c);
        pmf
    }

    pub fn mean_size(&self) -> f64 {
        let sizes = self.sizes();
        sizes.iter().sum::<usize>() as f64 / sizes.len() as f64
    }

    /// Most frequent size (smallest on ties).
    pub fn modal_size(&self) -> Option<usize> {
        let pmf = self.size_pmf();
        let mut best: Option<(usize, f64)> = None;
        for (i, &p) in pmf.iter().enumerate() {
            if best.map_or(true, |(_, q)| p > q) {
                best = Some((i + 1, p));
            }
        }
        best.map(|b| b.0)
    }
}

/// Groups the exceedances of `path` into disjoint blocks of length `r`.
pub fn extract_clusters(
    path: &PathMatrix,
    threshold: &ResolvedThreshold,
    r: usize,
) -> Result<ClusterPartition> {
    threshold.check_path(path)?;
    if r == 0 {
        return Err(Error::invalid("r", "block length must be >= 1"));
    }
    let kn = path.len() / r;
    let x = threshold.level;
    let mut clusters: Vec<Cluster> = Vec::new();
    for &tau in &threshold.exceedances {
        let block = tau / r;
        if block >= kn {
            break;
        }
        if clusters.last().map_or(true, |c| c.block != block) {
            clusters.push(Cluster {
                block,
                times: Vec::new(),
                points: Vec::new(),
            });
        }
        let c = clusters.last_mut().expect("pushed above");
        c.times.push(tau);
        c.points.extend(path.row(tau).iter().map(|v| v / x));
    }
    Ok(ClusterPartition {
        level: x,
        r,
        dim: path.dim(),
        n_blocks: kn,
        clusters,
    })
}
