use alloc::vec;
use alloc::vec::Vec;

use super::functionals::PointFunctional;
use super::pow_alpha;
use super::process::SpectralProcess;
use crate::error::{Error, Result};
use crate::mc::{Executor, McPlan, RatioAcc, RatioEstimate};
use crate::rv::radial::RadialLaw;

/// Laplace functional `E exp(-Σ_j f(Z_j))` of the cluster point process.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LaplaceValue {
    /// Spectral form, integrating over the radius by Pareto importance
    /// sampling.
    pub general: RatioEstimate,
    /// Tail-process form; only when `f` vanishes on the unit ball.
    pub simplified: Option<RatioEstimate>,
    /// `general - simplified` on the same draws.
    pub difference: Option<RatioEstimate>,
    pub forms_agree: Option<bool>,
    /// `θ` from the same draws.
    pub theta: RatioEstimate,
    pub truncation: Option<f64>,
}

/// Evaluates the Laplace functional from forward windows
/// `Θ_0, ..., Θ_horizon`.
///
/// The general form
/// `θ⁻¹ ∫ E[e^{-Σ_{i>=0} f(yΘ_i)} 1(y S_0 > 1) - e^{-Σ_{i>=1} f(yΘ_i)} 1(y S_1 > 1)] d(-y^{-α})`
/// with `S_k = sup_{i>=k} ‖Θ_i‖` is sampled by substituting `y = Y / S_0`, `Y`
/// Pareto(α), which turns the measure into `S_0^α` times a probability. `θ`
/// is estimated from the same windows, so both forms are ratios over one
/// denominator.
pub fn laplace_functional<P, E>(
    process: &P,
    f: &PointFunctional,
    horizon: usize,
    plan: &McPlan,
    exec: &E,
) -> Result<LaplaceValue>
where
    P: SpectralProcess + ?Sized,
    E: Executor,
{
    let radius = f.vanishing_radius().ok_or_else(|| {
        Error::invalid("f", "a vanishing radius is required; the sums may diverge otherwise")
    })?;
    if !(radius > 0.0) {
        return Err(Error::invalid("f", "vanishing radius must be > 0"));
    }
    let exact_one = RatioEstimate {
        value: 1.0,
        std_error: 0.0,
        n: 0,
    };
    if let PointFunctional::Zero = f {
        return Ok(LaplaceValue {
            general: exact_one,
            simplified: Some(exact_one),
            difference: Some(RatioEstimate {
                value: 0.0,
                ..exact_one
            }),
            forms_agree: Some(true),
            theta: RatioEstimate {
                value: f64::NAN,
                std_error: f64::NAN,
                n: 0,
            },
            truncation: None,
        });
    }
    let simplified = radius >= 1.0;
    let alpha = process.alpha();
    let norm = process.norm();
    let radial = RadialLaw::new(alpha)?;
    let t = horizon as i64;
    let accs = plan.run(
        exec,
        || vec![RatioAcc::new(3), RatioAcc::new(1)],
        |rngs, accs| {
            let y_big = radial.sample(&mut rngs.radial);
            let mut wins = Vec::new();
            process.draw(0, t, y_big, &mut rngs.angular, &mut wins)?;
            let mut buf = Vec::new();
            let (mut a_gen, mut a_simp, mut th, mut total) = (0.0, 0.0, 0.0, 0.0);
            for w in &wins {
                let s0 = (0..=t).map(|i| w.norm_at(i, norm)).fold(0.0, f64::max);
                let s1 = (1..=t).map(|i| w.norm_at(i, norm)).fold(0.0, f64::max);
                let th_w = pow_alpha(s0, alpha) - pow_alpha(s1, alpha);
                let sum_from = |y: f64, buf: &mut Vec<f64>| {
                    let tail: f64 = (1..=t).map(|i| f.eval_scaled(w.at(i), y, norm, buf)).sum();
                    (f.eval_scaled(w.at(0), y, norm, buf) + tail, tail)
                };
                let y = y_big / s0;
                let (g0, g1) = sum_from(y, &mut buf);
                let mut gen = libm::exp(-g0);
                if y * s1 > 1.0 {
                    gen -= libm::exp(-g1);
                }
                a_gen += w.weight * pow_alpha(s0, alpha) * gen;
                if simplified {
                    let (h0, h1) = sum_from(y_big, &mut buf);
                    a_simp += w.weight * (libm::exp(-h1) - libm::exp(-h0));
                }
                th += w.weight * th_w;
                total += w.weight;
            }
            accs[0].push(&[a_gen, a_simp, a_gen + a_simp - th], th);
            accs[1].push(&[th], total);
            Ok(())
        },
    )?;
    let theta = accs[1].ratio(0);
    if !(theta.value > 0.0) {
        return Err(Error::DegenerateModel(
            "extremal index estimate is not positive".into(),
        ));
    }
    let general = accs[0].ratio(0);
    let (simplified, difference) = if simplified {
        let b = accs[0].ratio(1);
        (
            Some(RatioEstimate {
                value: 1.0 - b.value,
                ..b
            }),
            Some(accs[0].ratio(2)),
        )
    } else {
        (None, None)
    };
    Ok(LaplaceValue {
        general,
        forms_agree: difference.map(|d| d.value.abs() <= 3.0 * d.std_error + 1e-12),
        simplified,
        difference,
        theta,
        truncation: process.truncation_bound(),
    })
}
