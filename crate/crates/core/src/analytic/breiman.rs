use alloc::format;
use alloc::sync::Arc;
use alloc::vec;

use super::pow_alpha;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::mc::{Executor, McPlan, RatioAcc, RatioEstimate};
use crate::rv::norm::NormSpec;
use crate::rv::rng::StreamRng;
use crate::rv::spectral::SpectralMeasure;

/// Sampler of a random matrix independent of the regularly varying vector.
pub type MatrixSampler = Arc<dyn Fn(&mut StreamRng) -> Matrix + Send + Sync>;

pub type BreimanEstimate = RatioEstimate;

/// `E‖AΘ‖^α`, the factor in `Pr(‖AX‖ > x) ~ E‖AΘ‖^α Pr(‖X‖ > x)`.
///
/// `Θ` is drawn from the angular stream of each shard and `A` from the
/// radial one, so the two are independent.
pub fn breiman_constant<E: Executor>(
    a: &MatrixSampler,
    spectral: &SpectralMeasure,
    alpha: f64,
    output: &NormSpec,
    plan: &McPlan,
    exec: &E,
) -> Result<BreimanEstimate> {
    let acc = plan.run(
        exec,
        || RatioAcc::new(1),
        |rngs, acc| {
            let theta = spectral.sample(&mut rngs.angular);
            let m = a(&mut rngs.radial);
            if m.cols() != theta.len() {
                return Err(Error::DimensionMismatch(format!(
                    "matrix with {} columns applied to dimension {}",
                    m.cols(),
                    theta.len()
                )));
            }
            let mut y = vec![0.0; m.rows()];
            m.mul_vec_add(&theta, &mut y);
            acc.push(&[pow_alpha(output.eval(&y), alpha)], 1.0);
            Ok(())
        },
    )?;
    Ok(acc.ratio(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::Sequential;
    use crate::rv::RngStream;

    fn plan(n: usize) -> McPlan {
        McPlan::new(n, RngStream::new(21, 0))
    }

    #[test]
    fn identity_and_scaling() {
        let sphere = SpectralMeasure::uniform_sphere(3, NormSpec::Euclidean).unwrap();
        let id: MatrixSampler = Arc::new(|_| Matrix::identity(3));
        let v = breiman_constant(&id, &sphere, 1.7, &NormSpec::Euclidean, &plan(1000), &Sequential)
            .unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        let two: MatrixSampler = Arc::new(|_| Matrix::identity(3).scaled(2.0));
        let v = breiman_constant(&two, &sphere, 1.7, &NormSpec::Euclidean, &plan(1000), &Sequential)
            .unwrap();
        assert!((v.value - libm::pow(2.0, 1.7)).abs() < 1e-11);
    }

    #[test]
    fn random_scalar_zero_or_two() {
        let a: MatrixSampler =
            Arc::new(|rng| Matrix::scalar(if rng.uniform() < 0.5 { 0.0 } else { 2.0 }));
        let v = breiman_constant(
            &a,
            &SpectralMeasure::positive_unit(),
            1.0,
            &NormSpec::Euclidean,
            &plan(100_000),
            &Sequential,
        )
        .unwrap();
        assert!((v.value - 1.0).abs() < 3.0 * v.std_error, "{v:?}");
    }
}
