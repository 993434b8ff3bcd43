use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::threshold::ResolvedThreshold;
use crate::error::{Error, Result};
use crate::estimate::{Method, ThetaEstimate};
use crate::models::PathMatrix;
use crate::rv::rng::RngStream;

/// Runs estimator: the fraction of exceedances `τ` not followed by another
/// exceedance within `τ+1..=τ+r`. Anchors with `τ + r` past the end of the
/// path are dropped. The binomial SE ignores dependence between anchors.
pub fn runs_estimator(
    path: &PathMatrix,
    threshold: &ResolvedThreshold,
    r: usize,
) -> Result<ThetaEstimate> {
    threshold.check_path(path)?;
    let (succ, total) = runs_counts(threshold, r)
        .into_iter()
        .fold((0usize, 0usize), |(a, b), (_, ok)| (a + usize::from(ok), b + 1));
    if total == 0 {
        return Err(Error::EmptyEstimate(format!(
            "no exceedance with a full run window of length {r}"
        )));
    }
    let p = succ as f64 / total as f64;
    Ok(ThetaEstimate::new(
        Method::Runs,
        p,
        libm::sqrt(p * (1.0 - p) / total as f64),
        total as u64,
    ))
}

/// `(τ, no exceedance in τ+1..=τ+r)` for each usable anchor.
fn runs_counts(threshold: &ResolvedThreshold, r: usize) -> Vec<(usize, bool)> {
    let n = threshold.n();
    let ex = &threshold.exceedances;
    ex.iter()
        .enumerate()
        .filter(|(_, &tau)| tau + r < n)
        .map(|(j, &tau)| (tau, ex.get(j + 1).map_or(true, |&next| next > tau + r)))
        .collect()
}

/// Blocks estimator: the fraction of the `floor(n/r)` disjoint blocks that
/// contain an exceedance, divided by `r k / n` with `k` the number of
/// exceedances. Clamped to `[0, 1]`.
pub fn blocks_estimator(
    path: &PathMatrix,
    threshold: &ResolvedThreshold,
    r: usize,
) -> Result<ThetaEstimate> {
    threshold.check_path(path)?;
    let n = threshold.n();
    if r == 0 || r > n {
        return Err(Error::invalid("r", format!("need 1 <= r <= n = {n}, got {r}")));
    }
    let kn = n / r;
    let hit = block_hits(threshold, r).iter().filter(|&&c| c > 0).count();
    if hit == 0 {
        return Err(Error::EmptyEstimate(format!("no block of length {r} exceeds the level")));
    }
    let p = hit as f64 / kn as f64;
    let scale = r as f64 * threshold.exceedance_count() as f64 / n as f64;
    Ok(ThetaEstimate::new(
        Method::Blocks,
        p / scale,
        libm::sqrt(p * (1.0 - p) / kn as f64) / scale,
        kn as u64,
    ))
}

/// Exceedance counts per complete block.
pub(crate) fn block_hits(threshold: &ResolvedThreshold, r: usize) -> Vec<usize> {
    let kn = threshold.n() / r;
    let mut hits = vec![0usize; kn];
    for &tau in &threshold.exceedances {
        if tau / r < kn {
            hits[tau / r] += 1;
        }
    }
    hits
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Runs,
    Blocks,
}

/// Standard error of the runs or blocks estimator by resampling the
/// `floor(n/r)` blocks with replacement. Slower than the binomial SE but
/// accounts for dependence within blocks.
pub fn block_bootstrap_se(
    path: &PathMatrix,
    threshold: &ResolvedThreshold,
    r: usize,
    estimator: Estimator,
    replicates: usize,
    stream: RngStream,
) -> Result<f64> {
    threshold.check_path(path)?;
    if replicates < 2 {
        return Err(Error::invalid("replicates", "need at least two bootstrap replicates"));
    }
    let kn = threshold.n() / r.max(1);
    if kn == 0 {
        return Err(Error::invalid("r", "block longer than the path"));
    }
    // per block: (numerator, denominator) of the estimator's ratio form
    let mut parts = vec![(0.0f64, 0.0f64); kn];
    match estimator {
        Estimator::Runs => {
            for (tau, ok) in runs_counts(threshold, r) {
                if tau / r < kn {
                    parts[tau / r].0 += f64::from(u8::from(ok));
                    parts[tau / r].1 += 1.0;
                }
            }
        }
        Estimator::Blocks => {
            for (p, c) in parts.iter_mut().zip(block_hits(threshold, r)) {
                *p = (f64::from(u8::from(c > 0)), c as f64);
            }
        }
    }
    let mut rng = stream.rng();
    let mut values = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..kn {
            let j = ((rng.uniform() * kn as f64) as usize).min(kn - 1);
            a += parts[j].0;
            b += parts[j].1;
        }
        if b > 0.0 {
            values.push(a / b);
        }
    }
    if values.len() < 2 {
        return Err(Error::EmptyEstimate("bootstrap replicates without exceedances".into()));
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    Ok(libm::sqrt(var))
}
