use alloc::string::String;
use alloc::vec::Vec;

use crate::rv::norm::NormSpec;
use crate::rv::rng::RngStream;

/// A simulated path `X_1, ..., X_n` in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMatrix {
    data: Vec<f64>,
    n: usize,
    d: usize,
    pub model_id: String,
    pub seed: RngStream,
}

impl PathMatrix {
    /// Panics unless `data.len() == n * d` and all entries are finite.
    pub fn new(data: Vec<f64>, n: usize, d: usize, model_id: String, seed: RngStream) -> Self {
        assert_eq!(data.len(), n * d, "path data does not match n x d");
        assert!(data.iter().all(|x| x.is_finite()), "path contains non-finite entries");
        PathMatrix {
            data,
            n,
            d,
            model_id,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Row `t` (zero-based).
    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.d..(t + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn norms(&self, norm: &NormSpec) -> Vec<f64> {
        self.rows().map(|r| norm.eval(r)).collect()
    }
}
