use alloc::format;
use alloc::vec::Vec;

use super::pow_alpha;
use super::process::SpectralProcess;
use crate::error::{Error, Result};
use crate::estimate::{Method, ThetaEstimate};
use crate::mc::{Executor, McPlan, RatioAcc};

/// Which part of the projection `a'X_t` is considered extreme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Sided {
    /// `|a'X_t|`.
    Abs,
    /// `(a'X_t)_+`.
    Positive,
}

/// Extremal index of the univariate series `a'X_t`,
/// `E[sup_{i>=0} p_i^α - sup_{i>=1} p_i^α] / E[p_0^α]` with `p_i = |a'Θ_i|`
/// or `(a'Θ_i)_+`.
pub fn linear_projection_theta<P, E>(
    a: &[f64],
    process: &P,
    sided: Sided,
    horizon: usize,
    plan: &McPlan,
    exec: &E,
) -> Result<ThetaEstimate>
where
    P: SpectralProcess + ?Sized,
    E: Executor,
{
    if a.len() != process.dim() {
        return Err(Error::DimensionMismatch(format!(
            "projection of length {} for dimension {}",
            a.len(),
            process.dim()
        )));
    }
    let alpha = process.alpha();
    let t = horizon as i64;
    let p = |x: &[f64]| {
        let v: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
        let v = match sided {
            Sided::Abs => v.abs(),
            Sided::Positive => v.max(0.0),
        };
        pow_alpha(v, alpha)
    };
    let acc = plan.run(
        exec,
        || RatioAcc::new(1),
        |rngs, acc| {
            let mut wins = Vec::new();
            process.draw(0, t, 1.0, &mut rngs.angular, &mut wins)?;
            let (mut num, mut den) = (0.0, 0.0);
            for w in &wins {
                let p0 = p(w.at(0));
                let s1 = (1..=t).map(|i| p(w.at(i))).fold(0.0, f64::max);
                num += w.weight * (p0.max(s1) - s1);
                den += w.weight * p0;
            }
            acc.push(&[num], den);
            Ok(())
        },
    )?;
    let den = acc.mean_denominator();
    if !(den.value > 0.0) || den.value <= 3.0 * den.std_error {
        return Err(Error::DegenerateProjection(format!(
            "E p_0^α estimated as {} (SE {}); the projection has no extremes at lag 0",
            den.value, den.std_error
        )));
    }
    let r = acc.ratio(0);
    let mut est = ThetaEstimate::new(Method::McForward, r.value, r.std_error, r.n);
    est.truncation = process.truncation_bound();
    Ok(est)
}
