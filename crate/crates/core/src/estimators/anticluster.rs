use alloc::vec::Vec;

use super::threshold::ResolvedThreshold;
use crate::error::{Error, Result};
use crate::models::PathMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AnticlusterRow {
    pub m: usize,
    /// Estimate of `Pr(max_{m <= |t| <= r} ‖X_t‖ > x | ‖X_0‖ > x)`.
    pub prob: f64,
    pub std_error: f64,
    pub anchors: usize,
}

/// Conditional probability of a further exceedance at distance between `m`
/// and `r` from an exceedance, for each `m` in `m_list` (increasing).
/// Anchors closer than `r` to either end of the path are dropped.
pub fn anticluster_diagnostic(
    path: &PathMatrix,
    threshold: &ResolvedThreshold,
    m_list: &[usize],
    r: usize,
) -> Result<Vec<AnticlusterRow>> {
    threshold.check_path(path)?;
    if m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("m_list", "must be strictly increasing"));
    }
    if m_list.first() == Some(&0) {
        return Err(Error::invalid("m_list", "lags must be >= 1"));
    }
    let n = threshold.n();
    let ex = &threshold.exceedances;
    // for each usable anchor, the largest distance <= r to another exceedance
    let mut far = Vec::new();
    for (j, &tau) in ex.iter().enumerate() {
        if tau < r || tau + r >= n {
            continue;
        }
        let back = ex[..j].iter().rev().take_while(|&&e| tau - e <= r).last().map(|&e| tau - e);
        let fwd = ex[j + 1..].iter().take_while(|&&e| e - tau <= r).last().map(|&e| e - tau);
        far.push(back.unwrap_or(0).max(fwd.unwrap_or(0)));
    }
    if far.is_empty() {
        return Err(Error::EmptyEstimate("no anchor at distance >= r from both ends".into()));
    }
    let total = far.len() as f64;
    Ok(m_list
        .iter()
        .map(|&m| {
            let p = far.iter().filter(|&&d| d >= m).count() as f64 / total;
            AnticlusterRow {
                m,
                prob: p,
                std_error: libm::sqrt(p * (1.0 - p) / total),
                anchors: far.len(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::fixtures::{iid_path, ma1_path, univariate_path};
    use crate::estimators::{select_threshold, ThresholdSpec};
    use crate::rv::NormSpec;

    #[test]
    fn by_hand() {
        // exceedances at 3, 4, 8 (n = 12, r = 3): anchors 3, 4, 8 usable
        let mut xs = [0.0; 12];
        for t in [3, 4, 8] {
            xs[t] = 1.0;
        }
        let path = univariate_path(&xs);
        let th = select_threshold(&path, ThresholdSpec::OrderStatistic(3), &NormSpec::Euclidean).unwrap();
        let rows = anticluster_diagnostic(&path, &th, &[1, 2], 3).unwrap();
        // distances: 3 -> {1}, 4 -> {1}, 8 -> {} (4 is at distance 4 > r)
        assert_eq!(rows[0].prob, 2.0 / 3.0);
        assert_eq!(rows[1].prob, 0.0);
    }

    #[test]
    fn ma1_beyond_order_matches_iid_baseline() {
        let r = 32;
        let k = ThresholdSpec::OrderStatistic(1000);
        let ma = ma1_path(1.0, 1.0, 1_000_000, 51);
        let th = select_threshold(&ma, k, &NormSpec::Euclidean).unwrap();
        let rows = anticluster_diagnostic(&ma, &th, &[1, 2, 3], r).unwrap();
        assert!(rows[0].prob > 0.4);
        let iid = iid_path(1.0, 1_000_000, 52);
        let thi = select_threshold(&iid, k, &NormSpec::Euclidean).unwrap();
        let base = anticluster_diagnostic(&iid, &thi, &[2], r).unwrap()[0];
        let se = libm::hypot(rows[1].std_error, base.std_error);
        assert!((rows[1].prob - base.prob).abs() <= 4.0 * se, "{:?} vs {base:?}", rows[1]);
        assert!(rows.windows(2).all(|w| w[1].prob <= w[0].prob));
    }

    #[test]
    fn rejects_non_increasing_lags() {
        let path = univariate_path(&[1.0, 2.0, 3.0]);
        let th = select_threshold(&path, ThresholdSpec::OrderStatistic(1), &NormSpec::Euclidean).unwrap();
        assert!(anticluster_diagnostic(&path, &th, &[2, 2], 1).is_err());
    }
}
