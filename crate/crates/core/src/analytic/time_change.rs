use alloc::vec::Vec;

use super::functionals::{WindowFunctional, WindowView};
use super::pow_alpha;
use super::process::SpectralProcess;
use crate::error::Result;
use crate::mc::{Executor, McPlan, RatioAcc, RatioEstimate};

/// Two Monte Carlo estimates of quantities that should coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IdentityCheck {
    pub lhs: RatioEstimate,
    pub rhs: RatioEstimate,
    /// `sqrt(se_lhs² + se_rhs²)`; the sides use independent streams.
    pub pooled_se: f64,
}

impl IdentityCheck {
    pub fn difference(&self) -> f64 {
        self.lhs.value - self.rhs.value
    }

    /// `|lhs - rhs| <= k · pooled SE + slack`.
    pub fn holds(&self, k: f64, slack: f64) -> bool {
        self.difference().abs() <= k * self.pooled_se + slack
    }
}

fn mean_over_windows<P, E>(
    process: &P,
    s: i64,
    t: i64,
    plan: &McPlan,
    exec: &E,
    integrand: impl Fn(&super::window::SpectralWindow) -> f64 + Sync + Send,
) -> Result<RatioEstimate>
where
    P: SpectralProcess + ?Sized,
    E: Executor,
{
    let acc = plan.run(
        exec,
        || RatioAcc::new(1),
        |rngs, acc| {
            let mut wins = Vec::new();
            process.draw(s, t, 1.0, &mut rngs.angular, &mut wins)?;
            let (mut a, mut total) = (0.0, 0.0);
            for w in &wins {
                a += w.weight * integrand(w);
                total += w.weight;
            }
            acc.push(&[a], total);
            Ok(())
        },
    )?;
    Ok(acc.ratio(0))
}

fn check(lhs: RatioEstimate, rhs: RatioEstimate) -> IdentityCheck {
    IdentityCheck {
        lhs,
        rhs,
        pooled_se: libm::hypot(lhs.std_error, rhs.std_error),
    }
}

/// Both sides of the time-change identity
/// `E f(Θ_{lo-i}, ..., Θ_{hi-i}) = E[f(Θ_lo/‖Θ_i‖, ..., Θ_hi/‖Θ_i‖) ‖Θ_i‖^α]`,
/// the right-hand integrand being 0 when `Θ_i = 0`.
///
/// The sides are estimated on independent child streams, except for `i = 0`
/// where both use the same draws and therefore coincide.
pub fn time_change_check<P, E>(
    process: &P,
    i: i64,
    f: &WindowFunctional,
    plan: &McPlan,
    exec: &E,
) -> Result<IdentityCheck>
where
    P: SpectralProcess + ?Sized,
    E: Executor,
{
    let alpha = process.alpha();
    let norm = process.norm();
    let lhs = mean_over_windows(
        process,
        (f.lo - i).min(0),
        (f.hi - i).max(0),
        &plan.derive(0),
        exec,
        |w| {
            f.eval(&WindowView {
                win: w,
                shift: -i,
                scale: 1.0,
                norm,
            })
        },
    )?;
    let rhs = mean_over_windows(
        process,
        f.lo.min(i).min(0),
        f.hi.max(i).max(0),
        &plan.derive(if i == 0 { 0 } else { 1 }),
        exec,
        |w| {
            let r = w.norm_at(i, norm);
            if r == 0.0 {
                return 0.0;
            }
            f.eval(&WindowView {
                win: w,
                shift: 0,
                scale: 1.0 / r,
                norm,
            }) * pow_alpha(r, alpha)
        },
    )?;
    Ok(check(lhs, rhs))
}

/// `E‖Θ_t‖^α` against `Pr(Θ_{-t} ≠ 0)`.
pub fn lag_reversal<P, E>(process: &P, t: i64, plan: &McPlan, exec: &E) -> Result<IdentityCheck>
where
    P: SpectralProcess + ?Sized,
    E: Executor,
{
    let alpha = process.alpha();
    let norm = process.norm();
    let (lo, hi) = (-t.abs(), t.abs());
    let lhs = mean_over_windows(process, lo, hi, &plan.derive(0), exec, |w| {
        pow_alpha(w.norm_at(t, norm), alpha)
    })?;
    let rhs = mean_over_windows(process, lo, hi, &plan.derive(1), exec, |w| {
        if w.at(-t).iter().any(|&x| x != 0.0) {
            1.0
        } else {
            0.0
        }
    })?;
    Ok(check(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::MmaSpectral;
    use crate::mc::Sequential;
    use crate::models::MmaSpec;
    use crate::rv::{RadialLaw, RngStream, RvLaw, SpectralMeasure};

    fn ma1() -> MmaSpectral {
        let innov = RvLaw::new(RadialLaw::new(1.0).unwrap(), SpectralMeasure::positive_unit());
        MmaSpectral::new(MmaSpec::univariate(&[1.0, 1.0], innov).unwrap())
    }

    fn plan() -> McPlan {
        McPlan::new(1000, RngStream::new(4, 4))
    }

    #[test]
    fn ma1_indicator_functional_by_hand() {
        let f = &WindowFunctional::battery()[0];
        let c = time_change_check(&ma1(), 1, f, &plan(), &Sequential).unwrap();
        assert_eq!(c.lhs.value, 0.5);
        assert_eq!(c.rhs.value, 0.5);
    }

    #[test]
    fn zero_shift_is_identical() {
        let innov = RvLaw::new(
            RadialLaw::new(1.0).unwrap(),
            SpectralMeasure::two_sided_unit(0.3).unwrap(),
        );
        let p = MmaSpectral::new(MmaSpec::univariate(&[1.0, -0.7, 0.4], innov).unwrap());
        for f in WindowFunctional::battery() {
            let c = time_change_check(&p, 0, &f, &plan(), &Sequential).unwrap();
            assert!(c.difference().abs() < 1e-12, "{}: {c:?}", f.name);
        }
    }

    #[test]
    fn ma1_lag_reversal_is_half() {
        let c = lag_reversal(&ma1(), 1, &plan(), &Sequential).unwrap();
        assert_eq!(c.lhs.value, 0.5);
        assert_eq!(c.rhs.value, 0.5);
    }
}
