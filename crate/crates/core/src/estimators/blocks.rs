use crate::error::{Error, Result};

/// Block length rule.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BlockSpec {
    Explicit(usize),
    /// `r = ceil(n^gamma)`.
    Power(f64),
}

impl Default for BlockSpec {
    fn default() -> Self {
        BlockSpec::Power(0.6)
    }
}

impl BlockSpec {
    /// Block length for a path of length `n`, in `1..=n`.
    pub fn resolve(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::invalid("n", "path length must be >= 1"));
        }
        match *self {
            BlockSpec::Explicit(r) => {
                if r == 0 || r > n {
                    return Err(Error::invalid("r", alloc::format!("need 1 <= r <= n = {n}, got {r}")));
                }
                Ok(r)
            }
            BlockSpec::Power(g) => {
                if !(g > 0.0 && g < 1.0) {
                    return Err(Error::invalid("gamma", "block exponent must lie in (0, 1)"));
                }
                let x = libm::pow(n as f64, g);
                // do not let rounding push exact powers up by one
                let near = libm::round(x);
                let r = if (x - near).abs() <= 1e-9 * x { near } else { libm::ceil(x) };
                Ok((r as usize).clamp(1, n))
            }
        }
    }
}

/// Expected number of exceedances per block, `r k / n`. Estimators of the
/// extremal index need this to be small; above about 0.1 runs and blocks
/// estimates are biased towards 0.
pub fn exceedances_per_block(r: usize, k: usize, n: usize) -> f64 {
    r as f64 * k as f64 / n as f64
}
