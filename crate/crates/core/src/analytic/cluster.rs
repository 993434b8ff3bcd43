use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::process::SpectralProcess;
use crate::error::{Error, Result};
use crate::estimate::ThetaEstimate;
use crate::mc::{Executor, McPlan, RatioAcc};
use crate::rv::radial::RadialLaw;

/// Laws of `ν = #{i >= 1 : ‖Y_i‖ > 1}` and of the limiting cluster size `κ`,
/// truncated at `k_max`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClusterSizeLaw {
    pub k_max: usize,
    /// `Pr(ν = k)` for `k = 0..=k_max`.
    pub nu: Vec<f64>,
    pub nu_std_error: Vec<f64>,
    /// `Pr(ν > k_max)`.
    pub nu_tail: f64,
    /// `Pr(κ = k)` for `k = 1..=k_max` (index `k - 1`).
    pub kappa: Vec<f64>,
    /// Mass of `κ` above `k_max`, `Pr(ν = k_max) / θ`.
    pub kappa_tail: f64,
    /// `Σ_{k <= k_max} k Pr(κ = k)`.
    pub mean_kappa: f64,
    pub mean_kappa_std_error: f64,
    pub theta: ThetaEstimate,
    /// `Pr(ν = 0)` within 3 pooled SE of `θ`.
    pub nu0_matches_theta: bool,
    pub truncation: Option<f64>,
    pub n_samples: u64,
}

impl ClusterSizeLaw {
    /// `Pr(κ = k)`, zero outside `1..=k_max`.
    pub fn kappa_pmf(&self, k: usize) -> f64 {
        if k == 0 || k > self.k_max {
            0.0
        } else {
            self.kappa[k - 1]
        }
    }
}

/// Monte Carlo law of `ν` from forward tail windows `Y Θ_0..Y Θ_horizon`,
/// and the cluster-size law `Pr(κ = k) = θ⁻¹ (Pr(ν = k-1) - Pr(ν = k))`.
///
/// `theta` should come from an independent run on the same process.
pub fn cluster_size_law<P, E>(
    process: &P,
    theta: &ThetaEstimate,
    horizon: usize,
    k_max: usize,
    plan: &McPlan,
    exec: &E,
) -> Result<ClusterSizeLaw>
where
    P: SpectralProcess + ?Sized,
    E: Executor,
{
    if !(theta.value > 0.0) {
        return Err(Error::DegenerateModel(format!(
            "extremal index {} is not positive; clusters are not finite",
            theta.value
        )));
    }
    if k_max == 0 {
        return Err(Error::invalid("k_max", "must be >= 1"));
    }
    let radial = RadialLaw::new(process.alpha())?;
    let norm = process.norm();
    let kk = k_max as f64;
    // numerators: 1(ν = k) for k = 0..=K, 1(ν > K), 1(ν < K) - K 1(ν = K)
    let acc = plan.run(
        exec,
        || RatioAcc::new(k_max + 3),
        |rngs, acc| {
            let y = radial.sample(&mut rngs.radial);
            let mut wins = Vec::new();
            process.draw(0, horizon as i64, y, &mut rngs.angular, &mut wins)?;
            let mut row = vec![0.0; k_max + 3];
            let mut total = 0.0;
            for w in &wins {
                let nu = (1..=horizon as i64)
                    .filter(|&j| y * w.norm_at(j, norm) > 1.0)
                    .count();
                if nu <= k_max {
                    row[nu] += w.weight;
                } else {
                    row[k_max + 1] += w.weight;
                }
                let g = if nu < k_max {
                    1.0
                } else if nu == k_max {
                    -kk
                } else {
                    0.0
                };
                row[k_max + 2] += w.weight * g;
                total += w.weight;
            }
            acc.push(&row, total);
            Ok(())
        },
    )?;
    if !(acc.mean_denominator().value > 0.0) {
        return Err(Error::DegenerateModel("all spectral windows had zero weight".into()));
    }
    let th = theta.value;
    let nu: Vec<f64> = (0..=k_max).map(|k| acc.ratio(k).value).collect();
    let nu_std_error = (0..=k_max).map(|k| acc.ratio(k).std_error).collect();
    let kappa = (1..=k_max).map(|k| (nu[k - 1] - nu[k]) / th).collect();
    let g = acc.ratio(k_max + 2);
    let mean_kappa = g.value / th;
    let mean_kappa_std_error = libm::hypot(g.std_error / th, g.value * theta.std_error / (th * th));
    let p0 = acc.ratio(0);
    let pooled = libm::hypot(p0.std_error, theta.std_error);
    Ok(ClusterSizeLaw {
        k_max,
        nu_tail: acc.ratio(k_max + 1).value,
        kappa_tail: nu[k_max] / th,
        nu_std_error,
        kappa,
        mean_kappa,
        mean_kappa_std_error,
        theta: *theta,
        nu0_matches_theta: (p0.value - th).abs() <= 3.0 * pooled + 1e-12,
        truncation: process.truncation_bound(),
        n_samples: acc.count(),
        nu,
    })
}
