use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::path::PathMatrix;
use super::tags;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rv::rng::{RngStream, StreamRng};

/// Sampler of one iid pair `(A_t, B_t)`.
pub type AbSampler = Arc<dyn Fn(&mut StreamRng) -> (Matrix, Vec<f64>) + Send + Sync>;

/// Random-coefficient autoregression `X_t = A_t X_{t-1} + B_t`.
///
/// The caller vouches for the contraction conditions that make the
/// recursion stationary; a recursion that blows up is reported as
/// [`Error::Divergence`].
#[derive(Clone)]
pub struct RcarSpec {
    pub d: usize,
    pub ab: AbSampler,
    pub burn_in: usize,
    pub label: String,
}

impl fmt::Debug for RcarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RcarSpec")
            .field("d", &self.d)
            .field("burn_in", &self.burn_in)
            .field("label", &self.label)
            .finish()
    }
}

impl RcarSpec {
    pub const DEFAULT_BURN_IN: usize = 1000;

    pub fn new(d: usize, ab: AbSampler) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("d", "must be >= 1"));
        }
        Ok(RcarSpec {
            d,
            ab,
            burn_in: Self::DEFAULT_BURN_IN,
            label: String::from("custom"),
        })
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn model_id(&self) -> String {
        format!("rcar(d={},{},burn_in={})", self.d, self.label, self.burn_in)
    }

    pub(crate) fn draw(&self, rng: &mut StreamRng) -> Result<(Matrix, Vec<f64>)> {
        let (a, b) = (self.ab)(rng);
        if a.rows() != self.d || a.cols() != self.d || b.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "(A, B) of shapes {}x{} and {} for d={}",
                a.rows(),
                a.cols(),
                b.len(),
                self.d
            )));
        }
        Ok((a, b))
    }
}

/// Runs the recursion from the zero vector, discards `spec.burn_in` steps
/// and returns the next `n`.
pub fn simulate_rcar(spec: &RcarSpec, n: usize, seed: RngStream) -> Result<PathMatrix> {
    simulate_rcar_from(spec, &vec![0.0; spec.d], spec.burn_in, n, seed)
}

/// Test hook: starts the recursion at `x0` with an explicit burn-in.
pub fn simulate_rcar_from(
    spec: &RcarSpec,
    x0: &[f64],
    burn_in: usize,
    n: usize,
    seed: RngStream,
) -> Result<PathMatrix> {
    if n == 0 {
        return Err(Error::invalid("n", "path length must be >= 1"));
    }
    if x0.len() != spec.d {
        return Err(Error::DimensionMismatch(format!(
            "start vector of length {} for d={}",
            x0.len(),
            spec.d
        )));
    }
    let d = spec.d;
    let mut rng = seed.substream(tags::RECURSION).rng();
    let mut x = x0.to_vec();
    let mut next = vec![0.0; d];
    let mut data = Vec::with_capacity(n * d);
    for step in 1..=burn_in + n {
        let (a, b) = spec.draw(&mut rng)?;
        next.copy_from_slice(&b);
        a.mul_vec_add(&x, &mut next);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step });
        }
        core::mem::swap(&mut x, &mut next);
        if step > burn_in {
            data.extend_from_slice(&x);
        }
    }
    Ok(PathMatrix::new(data, n, d, spec.model_id(), seed))
}
