use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::pow_alpha;
use super::process::{MmaSpectral, SpectralProcess};
use super::window::SpectralWindow;
use crate::error::{Error, Result};
use crate::estimate::{Method, ThetaEstimate};
use crate::linalg::Matrix;
use crate::mc::{Executor, McPlan, RatioAcc, RatioEstimate};
use crate::models::{CoefficientProcess, MmaSpec};
use crate::rv::rng::StreamRng;

/// One draw of the branch mixture on lags `s..=t`: a window per branch `i`
/// with `‖C_i(0) Θ‖ > 0`. An empty list is a valid draw of weight zero.
pub fn mma_spectral_window(
    spec: &MmaSpec,
    s: i64,
    t: i64,
    rng: &mut StreamRng,
) -> Result<Vec<SpectralWindow>> {
    let mut out = Vec::with_capacity(spec.m + 1);
    MmaSpectral::new(spec.clone()).draw(s, t, 1.0, rng, &mut out)?;
    Ok(out)
}

/// `(max_i ‖C_i(i)Θ‖^α, Σ_i ‖C_i(0)Θ‖^α)` for one Θ; `diag[i]` holds the
/// array at time `i` (equal to `at0` for deterministic coefficients).
fn branch_terms(diag: &[Vec<Matrix>], theta: &[f64], spec: &MmaSpec) -> (f64, f64) {
    let alpha = spec.alpha();
    let mut buf = vec![0.0; spec.d];
    let mut term = |c: &Matrix| {
        buf.fill(0.0);
        c.mul_vec_add(theta, &mut buf);
        pow_alpha(spec.norm.eval(&buf), alpha)
    };
    let mut top = 0.0f64;
    let mut sum = 0.0;
    for i in 0..=spec.m {
        top = top.max(term(&diag[i][i]));
        sum += term(&diag[0][i]);
    }
    (top, sum)
}

/// Exact sums over the atoms of a point-mass spectral measure when the
/// coefficients are deterministic.
fn exact_terms(spec: &MmaSpec) -> Option<(f64, f64)> {
    let c = spec.coefficients.as_deterministic()?;
    let atoms = spec.innovation.spectral.atoms()?;
    let diag = vec![c; spec.m + 1];
    let (mut num, mut den) = (0.0, 0.0);
    for (theta, w) in atoms {
        let (top, sum) = branch_terms(&diag, theta, spec);
        num += w * top;
        den += w * sum;
    }
    Some((num, den))
}

fn mc_terms<E: Executor>(spec: &MmaSpec, plan: &McPlan, exec: &E) -> Result<RatioAcc> {
    let m = spec.m;
    let fixed = match &spec.coefficients {
        CoefficientProcess::Deterministic(c) => Some(vec![c.clone(); m + 1]),
        _ => None,
    };
    plan.run(
        exec,
        || RatioAcc::new(1),
        |rngs, acc| {
            let theta = spec.innovation.spectral.sample(&mut rngs.angular);
            let drawn;
            let diag = match &fixed {
                Some(d) => d,
                None => {
                    drawn = spec.coefficients.window(m + 1, &mut rngs.angular);
                    for a in &drawn {
                        spec.check_array(a)?;
                    }
                    &drawn
                }
            };
            let (top, sum) = branch_terms(diag, &theta, spec);
            acc.push(&[top], sum);
            Ok(())
        },
    )
}

/// The tail-equivalence constant `c = Σ_i E‖C_i(0)Θ‖^α`, so that
/// `Pr(‖X_0‖ > x) ~ c Pr(‖ξ_0‖ > x)`.
pub fn tail_equivalence_constant<E: Executor>(
    spec: &MmaSpec,
    plan: &McPlan,
    exec: &E,
) -> Result<RatioEstimate> {
    if let Some((_, den)) = exact_terms(spec) {
        return Ok(RatioEstimate {
            value: den,
            std_error: 0.0,
            n: 0,
        });
    }
    Ok(mc_terms(spec, plan, exec)?.mean_denominator())
}

/// Extremal index of a moving average,
/// `E max_i ‖C_i(i)Θ‖^α / Σ_i E‖C_i(0)Θ‖^α`, where `C_i(i)` is read off the
/// stationary coefficient process at time `i`.
///
/// Deterministic coefficients with a point-mass spectral measure give the
/// exact value; everything else is Monte Carlo.
pub fn mma_theta<E: Executor>(spec: &MmaSpec, plan: &McPlan, exec: &E) -> Result<ThetaEstimate> {
    if let Some((num, den)) = exact_terms(spec) {
        if den <= 0.0 {
            return Err(degenerate(den));
        }
        return Ok(ThetaEstimate::closed_form(num / den));
    }
    let acc = mc_terms(spec, plan, exec)?;
    let den = acc.mean_denominator();
    if !(den.value > 0.0) {
        return Err(degenerate(den.value));
    }
    let r = acc.ratio(0);
    Ok(ThetaEstimate::new(Method::McMma, r.value, r.std_error, r.n))
}

fn degenerate(den: f64) -> Error {
    Error::DegenerateModel(format!(
        "Σ E‖C_i(0)Θ‖^α estimated as {den}; no lag carries a large innovation"
    ))
}
