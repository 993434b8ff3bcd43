use alloc::vec::Vec;

use super::process::SpectralProcess;
use crate::error::{Error, Result};
use crate::estimate::{Method, ThetaEstimate};
use crate::mc::{Executor, McPlan, RatioAcc, RatioEstimate};

/// Extremal index from the forward spectral process, in both forms.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThetaForward {
    /// The `max(1 - sup_{i>=1} ‖Θ_i‖^α, 0)` form.
    pub estimate: ThetaEstimate,
    /// `E[sup_{i>=0} ‖Θ_i‖^α - sup_{i>=1} ‖Θ_i‖^α]`.
    pub sup_form: RatioEstimate,
    pub max_form: RatioEstimate,
    /// Difference of the two forms on the same draws.
    pub difference: RatioEstimate,
    pub forms_agree: bool,
}

/// Monte Carlo extremal index from forward windows `Θ_0, ..., Θ_horizon`.
pub fn theta_forward<P, E>(
    process: &P,
    horizon: usize,
    plan: &McPlan,
    exec: &E,
) -> Result<ThetaForward>
where
    P: SpectralProcess + ?Sized,
    E: Executor,
{
    let alpha = process.alpha();
    let norm = process.norm();
    let acc = plan.run(
        exec,
        || RatioAcc::new(3),
        |rngs, acc| {
            let mut wins = Vec::new();
            process.draw(0, horizon as i64, 1.0, &mut rngs.angular, &mut wins)?;
            let (mut a, mut b, mut total) = (0.0, 0.0, 0.0);
            for w in &wins {
                let s1 = w.sup_pow(1, alpha, norm);
                let s0 = w.sup_pow(0, alpha, norm);
                a += w.weight * (s0 - s1);
                b += w.weight * (1.0 - s1).max(0.0);
                total += w.weight;
            }
            acc.push(&[a, b, a - b], total);
            Ok(())
        },
    )?;
    if !(acc.mean_denominator().value > 0.0) {
        return Err(Error::DegenerateModel("all spectral windows had zero weight".into()));
    }
    let (sup_form, max_form, difference) = (acc.ratio(0), acc.ratio(1), acc.ratio(2));
    let mut estimate =
        ThetaEstimate::new(Method::McForward, max_form.value, max_form.std_error, acc.count());
    estimate.truncation = process.truncation_bound();
    Ok(ThetaForward {
        estimate,
        sup_form,
        max_form,
        forms_agree: difference.value.abs() <= 3.0 * difference.std_error + 1e-12,
        difference,
    })
}
