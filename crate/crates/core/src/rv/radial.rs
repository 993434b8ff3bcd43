use crate::error::{Error, Result};
use crate::rv::rng::StreamRng;

/// Exact Pareto law on `[1, ∞)`: `Pr(R > y) = y^{-alpha}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadialLaw {
    alpha: f64,
}

impl RadialLaw {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::invalid("alpha", alloc::format!("must be finite and > 0, got {alpha}")));
        }
        Ok(RadialLaw { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Inverse survival function: maps `u ∈ (0, 1]` to `u^{-1/alpha}`.
    pub fn quantile_from_uniform(&self, u: f64) -> f64 {
        libm::pow(u, -1.0 / self.alpha)
    }

    pub fn survival(&self, y: f64) -> f64 {
        if y <= 1.0 {
            1.0
        } else {
            libm::pow(y, -self.alpha)
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        1.0 - self.survival(y)
    }

    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        self.quantile_from_uniform(rng.uniform_open_closed())
    }
}

/// One Pareto radius by inverse transform.
pub fn sample_pareto(law: &RadialLaw, rng: &mut StreamRng) -> f64 {
    law.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rv::rng::RngStream;
    use crate::stats::hill_estimator;
    use alloc::vec::Vec;

    #[test]
    fn quantile_examples() {
        assert_eq!(RadialLaw::new(1.0).unwrap().quantile_from_uniform(0.5), 2.0);
        assert_eq!(RadialLaw::new(2.0).unwrap().quantile_from_uniform(0.25), 2.0);
    }

    #[test]
    fn rejects_bad_alpha() {
        for a in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(RadialLaw::new(a), Err(Error::InvalidParameter { name: "alpha", .. })));
        }
    }

    #[test]
    fn samples_at_least_one() {
        let law = RadialLaw::new(0.5).unwrap();
        let mut rng = RngStream::new(3, 0).rng();
        assert!((0..100_000).all(|_| law.sample(&mut rng) >= 1.0));
    }

    #[test]
    fn hill_recovers_alpha() {
        let law = RadialLaw::new(1.5).unwrap();
        let mut rng = RngStream::new(11, 0).rng();
        let xs: Vec<f64> = (0..100_000).map(|_| sample_pareto(&law, &mut rng)).collect();
        let est = hill_estimator(&xs, 1000).unwrap();
        assert!((est - 1.5).abs() < 0.05, "hill = {est}");
    }

    #[test]
    fn survival_within_four_se() {
        let n = 1_000_000;
        for (k, alpha) in [0.5, 1.0, 2.0].into_iter().enumerate() {
            let law = RadialLaw::new(alpha).unwrap();
            let mut rng = RngStream::new(5, k as u64).rng();
            let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
            for y in [2.0, 5.0, 10.0] {
                let p = law.survival(y);
                let emp = xs.iter().filter(|&&x| x > y).count() as f64 / n as f64;
                let se = libm::sqrt(p * (1.0 - p) / n as f64);
                assert!((emp - p).abs() < 4.0 * se, "alpha={alpha} y={y} emp={emp} p={p}");
            }
        }
    }

    #[test]
    fn tail_ratio_scaling() {
        // Pr(R > u y) / Pr(R > y) = u^{-alpha} for y >= 1
        let law = RadialLaw::new(1.0).unwrap();
        let mut rng = RngStream::new(8, 0).rng();
        let xs: Vec<f64> = (0..1_000_000).map(|_| law.sample(&mut rng)).collect();
        let count = |y: f64| xs.iter().filter(|&&x| x > y).count() as f64;
        for y in [2.0, 10.0] {
            let ratio = count(2.0 * y) / count(y);
            assert!((ratio - 0.5).abs() < 0.03, "ratio {ratio}");
        }
    }
}
