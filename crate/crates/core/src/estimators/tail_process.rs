use alloc::vec::Vec;

use super::threshold::ResolvedThreshold;
use crate::error::{Error, Result};
use crate::models::PathMatrix;

/// Windows `(X_{τ+s}, ..., X_{τ+t}) / x` around the exceedance anchors `τ`,
/// and their spectral versions divided by `‖X_τ‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalTailProcess {
    pub s: i64,
    pub t: i64,
    pub dim: usize,
    pub level: f64,
    /// Zero-based anchor times whose window fits inside the path.
    pub anchors: Vec<usize>,
    /// `‖X_τ‖ / x` per anchor.
    pub radii: Vec<f64>,
    tail: Vec<f64>,
    spectral: Vec<f64>,
}

impl EmpiricalTailProcess {
    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    fn offset(&self, i: usize, lag: i64) -> usize {
        assert!(lag >= self.s && lag <= self.t, "lag {lag} outside [{}, {}]", self.s, self.t);
        let width = (self.t - self.s + 1) as usize;
        (i * width + (lag - self.s) as usize) * self.dim
    }

    /// `X_{τ_i + lag} / x`.
    pub fn tail_at(&self, i: usize, lag: i64) -> &[f64] {
        let o = self.offset(i, lag);
        &self.tail[o..o + self.dim]
    }

    /// `X_{τ_i + lag} / ‖X_{τ_i}‖`.
    pub fn spectral_at(&self, i: usize, lag: i64) -> &[f64] {
        let o = self.offset(i, lag);
        &self.spectral[o..o + self.dim]
    }
}

/// Collects windows on lags `s..=t` around every exceedance; anchors whose
/// window leaves the path are dropped.
pub fn empirical_tail_process(
    path: &PathMatrix,
    threshold: &ResolvedThreshold,
    s: i64,
    t: i64,
) -> Result<EmpiricalTailProcess> {
    threshold.check_path(path)?;
    if s > 0 || t < 0 {
        return Err(Error::invalid("window", "need s <= 0 <= t"));
    }
    let n = path.len() as i64;
    let d = path.dim();
    let x = threshold.level;
    let anchors: Vec<usize> = threshold
        .exceedances
        .iter()
        .copied()
        .filter(|&tau| tau as i64 + s >= 0 && tau as i64 + t < n)
        .collect();
    if anchors.is_empty() {
        return Err(Error::EmptyEstimate(alloc::format!(
            "no exceedance anchor with a full window [{s}, {t}] inside the path"
        )));
    }
    let width = (t - s + 1) as usize;
    let mut tail = Vec::with_capacity(anchors.len() * width * d);
    let mut spectral = Vec::with_capacity(anchors.len() * width * d);
    let mut radii = Vec::with_capacity(anchors.len());
    for &tau in &anchors {
        let r0 = threshold.norms()[tau];
        radii.push(r0 / x);
        for lag in s..=t {
            let row = path.row((tau as i64 + lag) as usize);
            tail.extend(row.iter().map(|v| v / x));
            spectral.extend(row.iter().map(|v| v / r0));
        }
    }
    Ok(EmpiricalTailProcess {
        s,
        t,
        dim: d,
        level: x,
        anchors,
        radii,
        tail,
        spectral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::fixtures::{iid_path, ma1_path, univariate_path};
    use crate::estimators::{select_threshold, ThresholdSpec};
    use crate::rv::NormSpec;
    use crate::stats::ks_one_sample;

    fn k1000(path: &PathMatrix) -> ResolvedThreshold {
        select_threshold(path, ThresholdSpec::OrderStatistic(1000), &NormSpec::Euclidean).unwrap()
    }

    #[test]
    fn iid_lag_one_is_small() {
        let path = iid_path(1.0, 1_000_000, 1);
        let tp = empirical_tail_process(&path, &k1000(&path), 0, 1).unwrap();
        let big = (0..tp.len()).filter(|&i| tp.tail_at(i, 1)[0].abs() > 0.1).count();
        assert!((big as f64) / (tp.len() as f64) <= 0.01, "{big} of {}", tp.len());
    }

    #[test]
    fn ma1_spectral_lag_one_mass_half() {
        let path = ma1_path(1.0, 1.0, 1_000_000, 2);
        let tp = empirical_tail_process(&path, &k1000(&path), -1, 1).unwrap();
        let near_one = (0..tp.len())
            .filter(|&i| {
                let v = tp.spectral_at(i, 1)[0];
                v > 0.9 && v < 1.1
            })
            .count();
        let frac = near_one as f64 / tp.len() as f64;
        assert!((frac - 0.5).abs() < 0.05, "fraction {frac}");
        for i in 0..tp.len() {
            assert!((tp.spectral_at(i, 0)[0].abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn anchor_radii_are_pareto() {
        let path = ma1_path(1.0, 1.0, 1_000_000, 3);
        let tp = empirical_tail_process(&path, &k1000(&path), 0, 0).unwrap();
        let ks = ks_one_sample(&tp.radii, |y| 1.0 - 1.0 / y).unwrap();
        assert!(ks.passes(0.01), "{ks:?}");
    }

    #[test]
    fn edge_anchors_dropped() {
        let path = univariate_path(&[9.0, 0.0, 0.0, 0.0, 8.0]);
        let th = select_threshold(&path, ThresholdSpec::OrderStatistic(2), &NormSpec::Euclidean).unwrap();
        assert!(matches!(
            empirical_tail_process(&path, &th, -1, 1),
            Err(Error::EmptyEstimate(_))
        ));
        assert_eq!(empirical_tail_process(&path, &th, 0, 1).unwrap().anchors, alloc::vec![0]);
    }
}
