use alloc::vec::Vec;

use super::pow_alpha;
use crate::rv::norm::NormSpec;

/// Weighted window `(Θ_s, ..., Θ_t)` with `s <= 0 <= t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWindow {
    pub s: i64,
    pub dim: usize,
    /// `t - s + 1` vectors of length `dim`, flattened.
    pub values: Vec<f64>,
    pub weight: f64,
}

impl SpectralWindow {
    pub fn zeros(s: i64, t: i64, dim: usize, weight: f64) -> Self {
        debug_assert!(s <= 0 && 0 <= t);
        SpectralWindow {
            s,
            dim,
            values: alloc::vec![0.0; (t - s + 1) as usize * dim],
            weight,
        }
    }

    pub fn t(&self) -> i64 {
        self.s + (self.values.len() / self.dim) as i64 - 1
    }

    pub fn covers(&self, lag: i64) -> bool {
        lag >= self.s && lag <= self.t()
    }

    /// `Θ_lag`; panics outside the window.
    pub fn at(&self, lag: i64) -> &[f64] {
        assert!(self.covers(lag), "lag {lag} outside window [{}, {}]", self.s, self.t());
        let i = (lag - self.s) as usize * self.dim;
        &self.values[i..i + self.dim]
    }

    pub fn at_mut(&mut self, lag: i64) -> &mut [f64] {
        let i = (lag - self.s) as usize * self.dim;
        &mut self.values[i..i + self.dim]
    }

    pub fn norm_at(&self, lag: i64, norm: &NormSpec) -> f64 {
        norm.eval(self.at(lag))
    }

    /// `max_{from <= j <= t} ‖Θ_j‖^alpha`, zero for an empty range.
    pub fn sup_pow(&self, from: i64, alpha: f64, norm: &NormSpec) -> f64 {
        let sup = (from.max(self.s)..=self.t())
            .map(|j| self.norm_at(j, norm))
            .fold(0.0, f64::max);
        pow_alpha(sup, alpha)
    }
}

/// Why a forward window stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Truncation {
    /// Reached the requested horizon.
    Horizon,
    /// The product norm times the radius dropped below `eps` at this lag;
    /// later values are set to zero.
    BelowEps { lag: i64 },
    /// Exactly zero from this lag on.
    Absorbed { lag: i64 },
}

/// Window of the tail process `Y_j = Y Θ_j` with radius `Y >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailWindow {
    pub radius: f64,
    pub spectral: SpectralWindow,
    pub truncation: Truncation,
}

impl TailWindow {
    pub fn value(&self, lag: i64) -> impl Iterator<Item = f64> + '_ {
        self.spectral.at(lag).iter().map(move |x| self.radius * x)
    }

    pub fn norm_at(&self, lag: i64, norm: &NormSpec) -> f64 {
        self.radius * self.spectral.norm_at(lag, norm)
    }
}
