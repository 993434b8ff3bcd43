//! Threshold-exceedance estimators on simulated paths.
//!
//! Conventions: exceedance means `‖X_t‖ > x` strictly; times are zero-based;
//! blocks are disjoint, consecutive, of length `r`, and a trailing partial
//! block is discarded. Standard errors are binomial or delta-method and
//! ignore serial dependence unless stated otherwise.

mod anticluster;
mod blocks;
mod clusters;
mod extremal_index;
mod point_process;
mod tail_process;
mod threshold;

pub use anticluster::{anticluster_diagnostic, AnticlusterRow};
pub use blocks::{exceedances_per_block, BlockSpec};
pub use clusters::{extract_clusters, Cluster, ClusterPartition};
pub use extremal_index::{block_bootstrap_se, blocks_estimator, runs_estimator, Estimator};
pub use point_process::{point_process_summary, CompoundPoissonSummary, LevelSummary};
pub use tail_process::{empirical_tail_process, EmpiricalTailProcess};
pub use threshold::{select_threshold, ResolvedThreshold, ThresholdSpec, ThresholdWarning};

#[cfg(test)]
pub(crate) mod fixtures {
    use alloc::string::String;

    use crate::models::{simulate_mma, MmaSpec, PathMatrix};
    use crate::rv::{RadialLaw, RngStream, RvLaw, SpectralMeasure};

    pub fn univariate_path(xs: &[f64]) -> PathMatrix {
        PathMatrix::new(xs.to_vec(), xs.len(), 1, String::from("fixture"), RngStream::new(0, 0))
    }

    pub fn ma1_path(c: f64, alpha: f64, n: usize, seed: u64) -> PathMatrix {
        let law = RvLaw::new(RadialLaw::new(alpha).unwrap(), SpectralMeasure::positive_unit());
        let spec = MmaSpec::univariate(&[1.0, c], law).unwrap();
        simulate_mma(&spec, n, RngStream::new(seed, 0)).unwrap()
    }

    pub fn iid_path(alpha: f64, n: usize, seed: u64) -> PathMatrix {
        ma1_path(0.0, alpha, n, seed)
    }
}
