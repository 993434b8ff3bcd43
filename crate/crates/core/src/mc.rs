//! Sharded Monte Carlo.
//!
//! A [`McPlan`] fixes the number of draws, the number of shards and the
//! parent stream. Shard `i` draws from `stream.substream(i)`; its result is
//! an accumulator that is merged with the others in shard order. Any
//! [`Executor`] may run the shards, in parallel or not, and the merged result
//! is the same bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rv::rng::{RngStream, StreamRng};

/// Runs independent shard jobs and returns their results in shard order.
pub trait Executor: Sync {
    fn map_shards<T, F>(&self, shards: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs shards one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_shards<T, F>(&self, shards: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..shards).map(job).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McPlan {
    pub n_mc: usize,
    pub shards: usize,
    pub stream: RngStream,
}

impl McPlan {
    pub const DEFAULT_SHARDS: usize = 16;

    pub fn new(n_mc: usize, stream: RngStream) -> Self {
        McPlan {
            n_mc,
            shards: Self::DEFAULT_SHARDS,
            stream,
        }
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards.max(1);
        self
    }

    /// Same plan on the child stream `tag`.
    pub fn derive(&self, tag: u64) -> Self {
        McPlan {
            stream: self.stream.substream(tag),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_mc < 2 {
            return Err(Error::invalid("n_mc", "need at least two Monte Carlo draws"));
        }
        Ok(())
    }

    pub fn shard_len(&self, shard: usize) -> usize {
        let base = self.n_mc / self.shards;
        base + usize::from(shard < self.n_mc % self.shards)
    }

    /// Generators for shard `shard`: one for angular parts and coefficient
    /// draws, one for Pareto radii.
    pub fn shard_rngs(&self, shard: usize) -> ShardRngs {
        let s = self.stream.substream(shard as u64);
        ShardRngs {
            angular: s.substream(0).rng(),
            radial: s.substream(1).rng(),
        }
    }

    /// Runs `draw` `n_mc` times across shards and merges the accumulators.
    pub fn run<E, A, F>(&self, exec: &E, init: impl Fn() -> A + Sync + Send, draw: F) -> Result<A>
    where
        E: Executor,
        A: Merge + Send,
        F: Fn(&mut ShardRngs, &mut A) -> Result<()> + Sync + Send,
    {
        self.validate()?;
        let parts = exec.map_shards(self.shards, |shard| {
            let mut rng = self.shard_rngs(shard);
            let mut acc = init();
            for _ in 0..self.shard_len(shard) {
                draw(&mut rng, &mut acc)?;
            }
            Ok(acc)
        });
        let mut out = init();
        for part in parts {
            out.merge(&part?);
        }
        Ok(out)
    }
}

/// Independent generators owned by one shard.
#[derive(Debug, Clone)]
pub struct ShardRngs {
    pub angular: StreamRng,
    pub radial: StreamRng,
}

pub trait Merge {
    fn merge(&mut self, other: &Self);
}

/// Sums for ratio estimation `Σ a_j / Σ b` with several numerators sharing
/// one denominator. Plain means use `b = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioAcc {
    n: u64,
    sb: f64,
    sbb: f64,
    sa: Vec<f64>,
    saa: Vec<f64>,
    sab: Vec<f64>,
}

/// Ratio estimate with delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RatioEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
}

impl RatioAcc {
    pub fn new(numerators: usize) -> Self {
        RatioAcc {
            n: 0,
            sb: 0.0,
            sbb: 0.0,
            sa: vec![0.0; numerators],
            saa: vec![0.0; numerators],
            sab: vec![0.0; numerators],
        }
    }

    pub fn push(&mut self, a: &[f64], b: f64) {
        debug_assert_eq!(a.len(), self.sa.len());
        self.n += 1;
        self.sb += b;
        self.sbb += b * b;
        for (j, &x) in a.iter().enumerate() {
            self.sa[j] += x;
            self.saa[j] += x * x;
            self.sab[j] += x * b;
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// Mean of the denominator.
    pub fn mean_denominator(&self) -> RatioEstimate {
        let n = self.n as f64;
        let mean = self.sb / n;
        let var = ((self.sbb - n * mean * mean) / (n - 1.0)).max(0.0);
        RatioEstimate {
            value: mean,
            std_error: libm::sqrt(var / n),
            n: self.n,
        }
    }

    pub fn ratio(&self, j: usize) -> RatioEstimate {
        let n = self.n as f64;
        if self.sb == 0.0 {
            return RatioEstimate {
                value: f64::NAN,
                std_error: f64::NAN,
                n: self.n,
            };
        }
        let r = self.sa[j] / self.sb;
        let resid = (self.saa[j] - 2.0 * r * self.sab[j] + r * r * self.sbb).max(0.0);
        let mean_b = self.sb / n;
        let se = if self.n > 1 {
            libm::sqrt(resid / (n * (n - 1.0))) / mean_b.abs()
        } else {
            f64::NAN
        };
        RatioEstimate {
            value: r,
            std_error: se,
            n: self.n,
        }
    }
}

impl Merge for RatioAcc {
    fn merge(&mut self, o: &Self) {
        self.n += o.n;
        self.sb += o.sb;
        self.sbb += o.sbb;
        for j in 0..self.sa.len() {
            self.sa[j] += o.sa[j];
            self.saa[j] += o.saa[j];
            self.sab[j] += o.sab[j];
        }
    }
}

impl<T: Merge> Merge for Vec<T> {
    fn merge(&mut self, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}
