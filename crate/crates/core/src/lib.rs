//! Simulation and extremal analysis of stationary, jointly regularly varying
//! multivariate time series.
//!
//! The crate is `no_std` (with `alloc`). It contains
//!
//! - [`rv`]: Pareto radial laws, spectral measures, norms, operator norms and
//!   reproducible random streams;
//! - [`models`]: path simulators for iid vectors, finite moving averages with
//!   random coefficient matrices and random-coefficient autoregressions;
//! - [`analytic`]: Monte Carlo and closed-form evaluation of the limit objects
//!   attached to a model (spectral process windows, extremal index, cluster
//!   size laws, Laplace functionals, the time-change identity);
//! - [`estimators`]: threshold-exceedance estimators on simulated paths;
//! - [`stats`]: small statistical helpers (KS tests, Hill estimator, running
//!   moments) shared by the other modules.
//!
//! Monte Carlo loops are split into a fixed number of shards, each shard
//! drawing from its own stream. Shards may be executed in any order by any
//! [`mc::Executor`]; the reduction is done in shard order, so results do not
//! depend on how many workers run them.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod analytic;
pub mod error;
pub mod estimate;
pub mod estimators;
pub mod linalg;
pub mod mc;
pub mod models;
pub mod rv;
pub mod stats;

pub use error::{Error, Result};
pub use estimate::{Method, ThetaEstimate};
pub use rv::rng::{RngStream, StreamRng};
